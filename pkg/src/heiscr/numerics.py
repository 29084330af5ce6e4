"""Small numerical helpers shared by the calculus and asymptotics code."""

from __future__ import annotations

from typing import Sequence

import numpy as np


def richardson(values: Sequence[np.ndarray | float], ratio: float,
               order: int, step: int | None = None) -> np.ndarray:
    """Richardson-extrapolate approximations taken at steps ``h, h/ratio, ...``.

    The error of ``values[k]`` is assumed to expand in powers
    ``h^order, h^(order + step), h^(order + 2 step), ...``; ``step`` defaults
    to ``order``.
    """
    if len(values) < 1:
        raise ValueError("richardson needs at least one value")
    step = order if step is None else step
    table = [np.asarray(v, dtype=float) for v in values]
    for j in range(1, len(table)):
        factor = ratio ** (order + (j - 1) * step)
        table = [(factor * table[k + 1] - table[k]) / (factor - 1.0)
                 for k in range(len(table) - 1)]
    return table[0]
