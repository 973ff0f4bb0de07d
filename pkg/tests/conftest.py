import numpy as np
import pytest
from sklearn import datasets as skdatasets

from mcswap.data import Dataset, save_csv

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def toy_csv_dir(tmp_path_factory):
    """Iris, Wine and Digits from scikit-learn's bundled copies, as CSV files."""
    root = tmp_path_factory.mktemp("toy")
    loaders = {
        "iris": skdatasets.load_iris,
        "wine": skdatasets.load_wine,
        "digits": skdatasets.load_digits,
    }
    for name, loader in loaders.items():
        b = loader()
        n_classes = int(b.target.max()) + 1
        save_csv(Dataset(name, b.data, b.target, n_classes), root / f"{name}.csv")
    return root
