"""Lorentz-Minkowski 3-space R^3_1 with the timelike coordinate first.

Vectors are numpy arrays whose last axis has length 3, so every function here
also works on stacks of vectors.
"""
from __future__ import annotations

from enum import Enum

import numpy as np

TOL_ZERO = 1e-10
METRIC = np.array([-1.0, 1.0, 1.0])
E0 = np.array([1.0, 0.0, 0.0])


class CausalClass(str, Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"
    ZERO = "zero"


def mvec(*xs) -> np.ndarray:
    x = np.asarray(xs[0] if len(xs) == 1 else xs, dtype=float)
    if x.shape[-1:] != (3,):
        raise ValueError(f"expected 3 components, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector has non-finite components")
    return x


def _check(*xs):
    for x in xs:
        if not np.all(np.isfinite(x)):
            raise ValueError("non-finite input")


def scalar_product(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    _check(x, y)
    return -x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1] + x[..., 2] * y[..., 2]


def lorentz_cross(x, y):
    x, y = np.asarray(x, float), np.asarray(y, float)
    _check(x, y)
    return np.stack(
        [
            -(x[..., 1] * y[..., 2] - x[..., 2] * y[..., 1]),
            -(x[..., 0] * y[..., 2] - x[..., 2] * y[..., 0]),
            x[..., 0] * y[..., 1] - x[..., 1] * y[..., 0],
        ],
        axis=-1,
    )


def flip(x):
    """Turn a Lorentz normal into the Euclidean normal of the same plane (and back)."""
    return np.asarray(x, float) * METRIC


def lorentz_norm(x):
    """sqrt(|<x,x>|)."""
    return np.sqrt(np.abs(scalar_product(x, x)))


def euclid_norm(x):
    return np.linalg.norm(np.asarray(x, float), axis=-1)


def causal_class(x, tol=TOL_ZERO) -> CausalClass:
    """Causal character of a single vector.

    The test is scale aware: x is compared after Euclidean normalisation.
    """
    x = mvec(x)
    n = euclid_norm(x)
    if n <= tol:
        return CausalClass.ZERO
    q = scalar_product(x, x) / n**2
    if q > tol:
        return CausalClass.SPACELIKE
    if q < -tol:
        return CausalClass.TIMELIKE
    return CausalClass.LIGHTLIKE


_PLANE = {
    CausalClass.SPACELIKE: CausalClass.TIMELIKE,
    CausalClass.TIMELIKE: CausalClass.SPACELIKE,
    CausalClass.LIGHTLIKE: CausalClass.LIGHTLIKE,
    CausalClass.ZERO: CausalClass.ZERO,
}


def plane_causal_class(normal, tol=TOL_ZERO) -> CausalClass:
    """Causal character of the plane with the given Lorentz normal."""
    return _PLANE[causal_class(normal, tol)]


def det3(a, b, c):
    """det(a, b, c) as the Euclidean triple product (no LU, so no warnings on singular input)."""
    a, b, c = np.asarray(a, float), np.asarray(b, float), np.asarray(c, float)
    return np.einsum("...i,...i->...", a, np.cross(b, c))
