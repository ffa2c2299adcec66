#!/usr/bin/env python3
"""Regenerate the KEEL-format fixtures under data/.

iris0 is built from scikit-learn's bundled iris data (the classic 150x4
matrix) with the setosa class as positive. The other fixtures are synthetic
stand-ins: their attribute counts, sample counts, and class counts match
the published descriptors of the identically named KEEL datasets, but the
feature values are generated Gaussian clusters (the originals are not
redistributable here). Generation is deterministic; run this script only to
rebuild data/ from scratch.
"""

import os

import numpy as np
from sklearn.datasets import load_iris

HERE = os.path.dirname(os.path.abspath(__file__))
DATA = os.path.join(HERE, "..", "data")

# name -> (n_attributes, majority_count, minority_count, cluster separation)
STAND_INS = {
    "glass0": (9, 144, 70, 2.0),
    "glass1": (9, 138, 76, 1.8),
    "glass6": (9, 185, 29, 9.0),
    "haberman": (3, 225, 81, 1.5),
    "new-thyroid1": (5, 180, 35, 4.0),
    "ecoli3": (7, 301, 35, 3.5),
    "pima": (8, 500, 268, 1.6),
}


def write_keel(path, name, attribute_names, rows, labels):
    lines = [f"@relation {name}"]
    for attr in attribute_names:
        lines.append(f"@attribute {attr} real")
    lines.append("@attribute Class {negative, positive}")
    lines.append(f"@inputs {', '.join(attribute_names)}")
    lines.append("@outputs Class")
    lines.append("@data")
    for row, label in zip(rows, labels):
        cells = [f"{v:.4f}" for v in row]
        cells.append("positive" if label == 1 else "negative")
        lines.append(", ".join(cells))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def make_iris0():
    iris = load_iris()
    labels = (iris.target == 0).astype(int)  # setosa is the minority here (50 vs 100)
    names = ["sepalLength", "sepalWidth", "petalLength", "petalWidth"]
    write_keel(os.path.join(DATA, "iris0.dat"), "iris0", names, iris.data, labels)


def make_stand_in(name, d, n_majority, n_minority, separation):
    rng = np.random.default_rng(_seed_for(name))
    # majority cluster at the origin, minority offset along a random direction;
    # a third of the features carry no class signal at all
    direction = rng.normal(size=d)
    direction /= np.linalg.norm(direction)
    noise_dims = rng.choice(d, size=max(1, d // 3), replace=False)
    direction[noise_dims] = 0.0
    scales = rng.uniform(0.5, 3.0, size=d)
    majority = rng.normal(size=(n_majority, d)) * scales
    minority = rng.normal(size=(n_minority, d)) * scales + separation * direction * scales
    rows = np.vstack([majority, minority])
    labels = np.array([0] * n_majority + [1] * n_minority)
    order = rng.permutation(len(labels))
    names = [f"a{i + 1}" for i in range(d)]
    write_keel(os.path.join(DATA, f"{name}.dat"), name, names, rows[order], labels[order])


def _seed_for(name):
    return int.from_bytes(name.encode(), "little") % (2**32)


def main():
    os.makedirs(DATA, exist_ok=True)
    make_iris0()
    for name, (d, n_maj, n_min, sep) in STAND_INS.items():
        make_stand_in(name, d, n_maj, n_min, sep)
    print(f"wrote {1 + len(STAND_INS)} fixtures to {DATA}")


if __name__ == "__main__":
    main()
