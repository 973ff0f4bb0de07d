"""Write scikit-learn's bundled Iris, Wine and Digits datasets as CSV files.

Usage: python scripts/export_toy_datasets.py [OUT_DIR]
"""

import sys
from pathlib import Path

from sklearn import datasets

from mcswap.data import Dataset, save_csv


def main(out_dir="data"):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name in ("iris", "wine", "digits"):
        bunch = getattr(datasets, f"load_{name}")()
        ds = Dataset(name, bunch.data, bunch.target, int(bunch.target.max()) + 1)
        print(save_csv(ds, out / f"{name}.csv"))


if __name__ == "__main__":
    main(*sys.argv[1:])
