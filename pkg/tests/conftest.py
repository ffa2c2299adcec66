import os

import numpy as np
import pytest

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")


@pytest.fixture(scope="session")
def data_dir():
    return DATA_DIR


@pytest.fixture(scope="session")
def iris0_path():
    return os.path.join(DATA_DIR, "iris0.dat")


@pytest.fixture(scope="session")
def iris0(iris0_path):
    from imbkit import load_dataset

    return load_dataset(iris0_path)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
