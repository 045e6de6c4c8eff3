"""Bundled protograph designs and reference decoder parameters.

Two families ship with the package: threshold-optimized ensembles (maximum VN
degree 20, designed with a 200-iteration budget) for rates 2/3 through 9/10,
one per decoder flavor, and complexity-constrained ensembles (maximum VN
degree 12, 30-iteration budget) for rates 3/4 through 7/8 intended for
finite-length construction. None of the bundled designs puncture columns.

``REFERENCE_WEIGHTS_R34`` is the shipped 30-iteration reliability-weight
schedule for the rate-3/4 finite-length design, in the weight-schedule file
layout (row-major over the 2x8 base), used as a regression reference.
"""

from __future__ import annotations

import numpy as np

from .core import BaseMatrix, validate_base_matrix


def _bm(rows) -> BaseMatrix:
    return validate_base_matrix(BaseMatrix(np.array(rows, dtype=np.int64)))


#: Threshold-optimized designs keyed by (rate string, decoder flavor).
THRESHOLD_DESIGNS: dict[tuple[str, str], BaseMatrix] = {
    ("2/3", "tmp"): _bm([[3, 4, 3, 7, 3, 1],
                         [0, 0, 1, 8, 1, 3]]),
    ("2/3", "bmp"): _bm([[3, 5, 3, 3, 9, 4],
                         [0, 3, 1, 1, 9, 0]]),
    ("3/4", "tmp"): _bm([[3, 5, 4, 10, 3, 4, 7, 3],
                         [0, 11, 0, 3, 1, 0, 3, 1]]),
    ("3/4", "bmp"): _bm([[3, 1, 3, 9, 4, 7, 4, 3],
                         [0, 4, 1, 3, 0, 11, 0, 1]]),
    ("4/5", "tmp"): _bm([[3, 3, 4, 4, 4, 4, 10, 4, 3, 2],
                         [0, 3, 1, 4, 0, 0, 3, 0, 1, 13]]),
    ("4/5", "bmp"): _bm([[3, 4, 4, 4, 13, 4, 2, 13, 3, 4],
                         [0, 0, 0, 2, 4, 1, 16, 3, 2, 0]]),
    ("5/6", "tmp"): _bm([[3, 4, 5, 4, 4, 4, 6, 3, 4, 2, 4, 2],
                         [0, 0, 3, 0, 0, 16, 4, 1, 0, 2, 2, 4]]),
    ("5/6", "bmp"): _bm([[3, 9, 9, 6, 0, 5, 4, 4, 5, 4, 4, 4],
                         [0, 3, 3, 5, 15, 2, 0, 2, 1, 0, 0, 0]]),
    ("7/8", "tmp"): _bm([[3, 5, 4, 4, 3, 1, 4, 5, 1, 7, 4, 4, 0, 4, 4, 3],
                         [0, 3, 0, 0, 4, 3, 0, 2, 3, 3, 6, 0, 18, 0, 0, 1]]),
    ("7/8", "bmp"): _bm([[3, 3, 4, 4, 4, 6, 4, 4, 6, 1, 4, 4, 4, 4, 0, 6],
                         [0, 6, 1, 2, 1, 3, 0, 0, 3, 4, 0, 0, 1, 0, 20, 6]]),
    ("9/10", "tmp"): _bm([[3, 3, 4, 4, 6, 4, 4, 0, 4, 2, 0, 2, 3, 4, 4, 4, 4, 5, 4, 6],
                          [0, 7, 1, 0, 1, 0, 0, 16, 0, 2, 5, 2, 3, 0, 2, 4, 0, 2, 0, 5]]),
    ("9/10", "bmp"): _bm([[3, 0, 4, 3, 5, 4, 4, 9, 4, 4, 6, 4, 8, 5, 3, 3, 4, 4, 3, 3],
                          [0, 4, 0, 1, 3, 0, 16, 1, 0, 0, 2, 9, 6, 2, 3, 4, 0, 0, 1, 1]]),
}

#: Finite-length designs (max VN degree 12, 30-iteration budget) keyed by rate string.
FINITE_LENGTH_DESIGNS: dict[str, BaseMatrix] = {
    "3/4": _bm([[2, 3, 1, 4, 3, 5, 4, 3],
                [1, 1, 7, 0, 1, 6, 0, 1]]),
    "4/5": _bm([[2, 4, 2, 3, 4, 4, 4, 4, 2, 2],
                [1, 6, 2, 1, 0, 0, 1, 0, 10, 2]]),
    "5/6": _bm([[2, 2, 4, 2, 1, 3, 3, 4, 4, 2, 4, 1],
                [1, 2, 0, 2, 3, 9, 1, 0, 0, 2, 0, 11]]),
    "7/8": _bm([[2, 4, 4, 1, 4, 4, 4, 4, 4, 4, 4, 4, 4, 3, 2, 2],
                [1, 0, 8, 11, 0, 1, 1, 6, 1, 3, 0, 0, 0, 1, 4, 2]]),
}

#: Quantizer deadzone the finite-length designs were tuned for.
FINITE_LENGTH_DEADZONE = 1.3

#: 30-iteration reference weight schedule for FINITE_LENGTH_DESIGNS["3/4"].
REFERENCE_WEIGHTS_R34 = np.array([
    [0.72, 0.72, 0.72, 0.72, 0.72, 0.72, 0.72, 0.72, 1.08, 1.08, 1.08, 0.00, 1.08, 1.08, 0.00, 1.08],
    [0.81, 0.81, 0.81, 0.81, 0.81, 0.81, 0.81, 0.81, 1.29, 1.28, 1.27, 0.00, 1.28, 1.27, 0.00, 1.28],
    [0.87, 0.87, 0.86, 0.87, 0.87, 0.86, 0.87, 0.87, 1.42, 1.42, 1.40, 0.00, 1.42, 1.40, 0.00, 1.42],
    [0.92, 0.92, 0.90, 0.92, 0.92, 0.90, 0.92, 0.92, 1.54, 1.54, 1.50, 0.00, 1.54, 1.50, 0.00, 1.54],
    [0.96, 0.96, 0.94, 0.97, 0.96, 0.94, 0.97, 0.96, 1.65, 1.64, 1.59, 0.00, 1.64, 1.60, 0.00, 1.64],
    [1.00, 1.00, 0.98, 1.01, 1.00, 0.98, 1.01, 1.00, 1.75, 1.75, 1.69, 0.00, 1.75, 1.69, 0.00, 1.75],
    [1.05, 1.04, 1.02, 1.05, 1.04, 1.02, 1.05, 1.04, 1.86, 1.85, 1.78, 0.00, 1.85, 1.78, 0.00, 1.85],
    [1.09, 1.09, 1.06, 1.10, 1.09, 1.06, 1.10, 1.09, 1.97, 1.96, 1.87, 0.00, 1.96, 1.87, 0.00, 1.96],
    [1.14, 1.14, 1.11, 1.15, 1.14, 1.11, 1.15, 1.14, 2.08, 2.07, 1.97, 0.00, 2.07, 1.97, 0.00, 2.07],
    [1.19, 1.19, 1.16, 1.20, 1.19, 1.16, 1.20, 1.19, 2.20, 2.19, 2.07, 0.00, 2.19, 2.07, 0.00, 2.19],
    [1.25, 1.24, 1.21, 1.26, 1.24, 1.21, 1.26, 1.24, 2.32, 2.31, 2.17, 0.00, 2.31, 2.17, 0.00, 2.31],
    [1.31, 1.30, 1.27, 1.32, 1.30, 1.27, 1.32, 1.30, 2.44, 2.42, 2.27, 0.00, 2.42, 2.27, 0.00, 2.42],
    [1.37, 1.37, 1.33, 1.39, 1.37, 1.33, 1.39, 1.37, 2.55, 2.53, 2.36, 0.00, 2.53, 2.36, 0.00, 2.53],
    [1.43, 1.43, 1.39, 1.45, 1.43, 1.39, 1.45, 1.43, 2.66, 2.64, 2.45, 0.00, 2.64, 2.45, 0.00, 2.64],
    [1.50, 1.50, 1.46, 1.52, 1.50, 1.46, 1.52, 1.50, 2.77, 2.74, 2.54, 0.00, 2.74, 2.54, 0.00, 2.74],
    [1.57, 1.57, 1.53, 1.59, 1.57, 1.53, 1.59, 1.57, 2.87, 2.83, 2.62, 0.00, 2.83, 2.62, 0.00, 2.83],
    [1.65, 1.64, 1.61, 1.67, 1.64, 1.61, 1.67, 1.64, 2.97, 2.93, 2.70, 0.00, 2.93, 2.70, 0.00, 2.93],
    [1.73, 1.72, 1.69, 1.75, 1.72, 1.69, 1.75, 1.72, 3.07, 3.02, 2.79, 0.00, 3.02, 2.79, 0.00, 3.02],
    [1.82, 1.82, 1.78, 1.85, 1.82, 1.78, 1.85, 1.82, 3.18, 3.12, 2.89, 0.00, 3.12, 2.89, 0.00, 3.12],
    [1.93, 1.92, 1.89, 1.96, 1.92, 1.89, 1.96, 1.92, 3.30, 3.23, 2.99, 0.00, 3.23, 2.99, 0.00, 3.23],
    [2.06, 2.05, 2.02, 2.09, 2.05, 2.02, 2.09, 2.05, 3.45, 3.36, 3.12, 0.00, 3.36, 3.12, 0.00, 3.36],
    [2.23, 2.22, 2.18, 2.25, 2.22, 2.18, 2.25, 2.22, 3.63, 3.52, 3.28, 0.00, 3.52, 3.28, 0.00, 3.52],
    [2.46, 2.44, 2.41, 2.48, 2.44, 2.40, 2.48, 2.44, 3.86, 3.73, 3.48, 0.00, 3.73, 3.48, 0.00, 3.73],
    [2.78, 2.76, 2.72, 2.80, 2.76, 2.72, 2.80, 2.76, 4.20, 4.02, 3.78, 0.00, 4.02, 3.78, 0.00, 4.02],
    [3.27, 3.24, 3.21, 3.28, 3.24, 3.21, 3.28, 3.24, 4.70, 4.45, 4.22, 0.00, 4.45, 4.22, 0.00, 4.45],
    [4.05, 4.02, 3.98, 4.05, 4.02, 3.98, 4.05, 4.02, 5.51, 5.13, 4.93, 0.00, 5.13, 4.93, 0.00, 5.13],
    [5.37, 5.30, 5.27, 5.33, 5.30, 5.27, 5.33, 5.30, 6.87, 6.26, 6.10, 0.00, 6.26, 6.10, 0.00, 6.26],
    [7.53, 7.39, 7.36, 7.41, 7.39, 7.36, 7.41, 7.39, 9.18, 8.07, 7.96, 0.00, 8.07, 7.96, 0.00, 8.07],
    [10.82, 10.46, 10.44, 10.47, 10.46, 10.44, 10.47, 10.46, 12.96, 10.64, 10.61, 0.00, 10.64, 10.61, 0.00, 10.64],
    [15.04, 14.42, 14.42, 14.42, 14.42, 14.42, 14.42, 14.42, 18.74, 14.04, 14.04, 0.00, 14.04, 14.04, 0.00, 14.04],
])
