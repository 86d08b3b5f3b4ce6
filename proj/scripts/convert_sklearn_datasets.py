#!/usr/bin/env python3
"""Write data/iris.csv and data/wine.csv from the copies bundled with scikit-learn.

The bundled files use a count header ("150,4,setosa,...") and integer class
codes; the CLI loader expects a named header and the label in the last column.
"""
import csv
import os
import sys

import sklearn

SRC = os.path.join(os.path.dirname(sklearn.__file__), "datasets", "data")
OUT = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "data")

IRIS_COLUMNS = ["sepal_length", "sepal_width", "petal_length", "petal_width", "species"]
WINE_COLUMNS = [
    "alcohol", "malic_acid", "ash", "alcalinity_of_ash", "magnesium", "total_phenols",
    "flavanoids", "nonflavanoid_phenols", "proanthocyanins", "color_intensity", "hue",
    "od280_od315", "proline", "class",
]


def convert(name, columns):
    with open(os.path.join(SRC, f"{name}.csv" if name == "iris" else f"{name}_data.csv")) as f:
        rows = list(csv.reader(f))
    class_names = rows[0][2:]
    with open(os.path.join(OUT, f"{name}.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(columns)
        for r in rows[1:]:
            w.writerow(r[:-1] + [class_names[int(r[-1])]])


if __name__ == "__main__":
    os.makedirs(OUT, exist_ok=True)
    convert("iris", IRIS_COLUMNS)
    convert("wine", WINE_COLUMNS)
