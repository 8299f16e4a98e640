"""The quadratic family T(z) = z^2 + c and its backward branches.

Everything downstream (covers, lattices, transfer sums) is built out of the
four primitives here: the forward map, its derivative, the two inverse
branches +-sqrt(z - c), and forward orbits with their derivative products.
Functions accept plain complex numbers or numpy arrays and vectorize
elementwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteError

# Direct products of |T'| along an orbit overflow float range for long
# orbits; past this length the product is accumulated as a sum of logs.
_LOG_PRODUCT_CUTOFF = 64


@dataclass(frozen=True)
class QuadraticMap:
    """The map T(z) = z^2 + c."""

    c: complex

    def __post_init__(self) -> None:
        c = complex(self.c)
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            raise ValueError(f"c must be finite, got {self.c!r}")
        object.__setattr__(self, "c", c)


def forward(qmap: QuadraticMap, z):
    """T(z) = z^2 + c, elementwise."""
    return z * z + qmap.c


def derivative(qmap: QuadraticMap, z):
    """T'(z) = 2z, elementwise."""
    return 2.0 * z


def inverse_branches(qmap: QuadraticMap, z):
    """Both preimages of z: (+sqrt(z - c), -sqrt(z - c)).

    The principal square root fixes which preimage is "plus"; negating it
    gives the other, and T maps both back to z.
    """
    w = np.sqrt(np.asarray(z, dtype=complex) - qmap.c)
    if w.ndim == 0:
        w = complex(w)
    return w, -w

def orbit(qmap: QuadraticMap, z: complex, n: int) -> np.ndarray:
    """Forward orbit [z, T z, ..., T^n z] as a complex array of length n + 1."""
    if n < 0:
        raise ValueError(f"orbit length must be >= 0, got {n}")
    out = np.empty(n + 1, dtype=complex)
    out[0] = z
    # Escape to inf/nan is reported as NonFiniteError below, so the numpy
    # warnings on the way there carry no extra information.
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, n + 1):
            out[k] = out[k - 1] * out[k - 1] + qmap.c
    finite = np.isfinite(out)
    if not finite.all():
        bad = int(np.flatnonzero(~finite)[0])
        raise NonFiniteError(f"orbit left float range at step {bad} (of {n})")
    return out


def orbit_derivative_modulus_product(qmap: QuadraticMap, y: complex, n: int) -> float:
    """|(T^n)'(y)| = prod_{k=0}^{n-1} |2 T^k y|, by the chain rule.

    Long products are accumulated in log space to dodge overflow; the
    result itself may still be inf if the true value exceeds float range.
    """
    if n < 0:
        raise ValueError(f"chain length must be >= 0, got {n}")
    if n == 0:
        return 1.0
    pts = orbit(qmap, y, n - 1)
    mods = 2.0 * np.abs(pts)
    if np.any(mods == 0.0):
        return 0.0
    if n <= _LOG_PRODUCT_CUTOFF:
        return float(np.prod(mods))
    return float(np.exp(np.sum(np.log(mods))))
