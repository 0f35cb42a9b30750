import numpy as np
import pytest

from pilevib.data import DatasetSplit, GeneratorParams, generate_synthetic, split
from pilevib.nn import NetworkSpec
from pilevib.train import TrainConfig, TrainedModel, train


@pytest.fixture(scope="session")
def small_dataset():
    return generate_synthetic(200, GeneratorParams(seed=11))


@pytest.fixture(scope="session")
def small_split(small_dataset) -> DatasetSplit:
    return split(small_dataset, seed=11)


@pytest.fixture(scope="session")
def small_model(small_split) -> TrainedModel:
    """Quickly trained model for persistence/serving/explanation tests."""
    config = TrainConfig(spec=NetworkSpec(seed=11), epochs=30, seed=11)
    return train(config, small_split)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
