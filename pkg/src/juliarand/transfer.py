"""Normalized transfer-operator sums and the dimension bisection.

The level-n transfer value at z is

    f_n(z) = 2^(-h n) * sum over the 2^n branch words y of T^-n(z)
             of (prod_{k=0}^{n-1} |T^k y|)^(-h)

Because the two deepest branches +-w share every modulus in their product,
the sum over 2^n words equals exactly twice the sum over the 2^(n-1) words
that end on the plus branch. The iteration below keeps the full preimage
tree one level short and folds the factor 2 into the normalization, halving
work and memory at every level.

For fixed z the tree itself does not depend on h; only the final power sum
does. The dimension estimate exploits this by building one tree and probing
it with many candidate exponents.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from ._util import thread_map
from .dynamics import QuadraticMap, forward
from .errors import (
    BracketError,
    ConvergenceError,
    DomainError,
    NonFiniteError,
    ResourceLimitError,
)
from .lattice import BorelCover

# Level n enumerates 2^(n-1) halved branch words; 25 levels peak around
# 0.7 GB of tree state.
LEVEL_CAP = 25

DEFAULT_TOL = 1e-4


def _check_h(h: float) -> float:
    h = float(h)
    if not (math.isfinite(h) and h > 0.0):
        raise ValueError(f"exponent h must be finite and > 0, got {h}")
    return h


def _halved_levels(
    qmap: QuadraticMap, z: complex, max_level: int
) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (n, halved derivative-modulus products) for n = 1, 2, ...

    The products at level n cover the 2^(n-1) branch words of T^-n(z) whose
    deepest branch is the plus one; f_n(h) = 2^(1 - h n) * sum(products^-h).
    State is one full tree level, discarded as soon as the next is built.
    """
    pts = np.array([complex(z)], dtype=complex)
    prod = np.ones(1)
    for n in range(1, max_level + 1):
        child = np.sqrt(pts - qmap.c)
        p_half = prod * np.abs(child)
        if np.any(p_half == 0.0):
            raise DomainError(
                "preimage tree hit the critical point; the map is not "
                "hyperbolic along this backward orbit"
            )
        if not np.all(np.isfinite(p_half)):
            raise NonFiniteError(f"transfer products non-finite at level {n}")
        yield n, p_half
        if n < max_level:
            pts = np.concatenate([child, -child])
            prod = np.concatenate([p_half, p_half])


def _level_value(p_half: np.ndarray, n: int, h: float) -> float:
    return float(2.0 ** (-h * n + 1.0) * np.sum(p_half ** (-h)))


def transfer_iterate(
    qmap: QuadraticMap,
    z: complex,
    h: float,
    n: int,
    *,
    max_level: int = LEVEL_CAP,
    full_sum: bool = False,
) -> float:
    """f_n(z) for one exponent h at one level n.

    With full_sum=True the two-branch sum over all 2^n words is evaluated
    instead of the folded half; the two agree exactly and the flag exists
    for cross-checking, not speed.
    """
    h = _check_h(h)
    if n < 1:
        raise ValueError(f"level must be >= 1, got {n}")
    if n > max_level:
        raise ResourceLimitError(
            f"level {n} exceeds the cap of {max_level} (2^{n} branch words)"
        )
    for level, p_half in _halved_levels(qmap, z, n):
        if level == n:
            if not full_sum:
                return _level_value(p_half, n, h)
            both = np.concatenate([p_half, p_half])
            return float(2.0 ** (-h * n) * np.sum(both ** (-h)))
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class DensityResult:
    """Outcome of iterating f_n(z) to stabilization.

    levels holds one (n, f_n, f_n/f_{n-1}) triple per computed level; the
    ratio at n = 1 is nan. value is the deepest f_n whether or not the
    tolerance was met.
    """

    z: complex
    h: float
    tol: float
    value: float
    converged: bool
    levels: list[tuple[int, float, float]]


def density(
    qmap: QuadraticMap,
    z: complex,
    h: float,
    *,
    tol: float = DEFAULT_TOL,
    max_level: int = LEVEL_CAP,
) -> DensityResult:
    """Iterate f_n(z) until |f_n - f_{n-1}| <= tol or the level cap.

    At the right exponent the sequence stabilizes to the invariant-density
    value at z; at the wrong one it drifts geometrically and the result
    comes back with converged=False.
    """
    h = _check_h(h)
    if tol <= 0.0:
        raise ValueError(f"tol must be > 0, got {tol}")
    rows: list[tuple[int, float, float]] = []
    prev = math.nan
    value = math.nan
    converged = False
    for n, p_half in _halved_levels(qmap, z, max_level):
        value = _level_value(p_half, n, h)
        rows.append((n, value, value / prev if n > 1 else math.nan))
        if n > 1 and abs(value - prev) <= tol:
            converged = True
            break
        prev = value
    return DensityResult(
        z=complex(z), h=h, tol=tol, value=value, converged=converged,
        levels=rows,
    )


@dataclass(frozen=True)
class CandidateTrace:
    """Transfer values at one bisection candidate, level by level."""

    h: float
    levels: list[tuple[int, float, float]]

    @property
    def ratio(self) -> float:
        """f_n/f_{n-1} at the probe depth: > 1 means h is too small."""
        return self.levels[-1][2]


@dataclass(frozen=True)
class DimensionEstimate:
    h: float
    bracket: tuple[float, float]
    n_probe: int
    tol_h: float
    candidates: list[CandidateTrace]


def estimate_dimension(
    qmap: QuadraticMap,
    z: complex,
    h_lo: float,
    h_hi: float,
    *,
    tol_h: float = DEFAULT_TOL,
    n_probe: int = 18,
    max_level: int = LEVEL_CAP,
) -> DimensionEstimate:
    """Hausdorff dimension by bisection on the tail ratio of f_n.

    f_n grows like 2^(n (dim - h)) in n, so the ratio f_n/f_{n-1} at a deep
    probe level sits above 1 when h < dim and below 1 when h > dim. One
    preimage tree at z serves every candidate since only the final power
    sum involves h.
    """
    if not (math.isfinite(h_lo) and math.isfinite(h_hi) and h_lo < h_hi):
        raise ValueError(f"invalid bracket [{h_lo}, {h_hi}]")
    if h_lo <= 0.0:
        raise ValueError(f"bracket must be positive, got h_lo={h_lo}")
    if tol_h <= 0.0:
        raise ValueError(f"tol_h must be > 0, got {tol_h}")
    if n_probe < 2:
        raise ValueError(f"n_probe must be >= 2, got {n_probe}")
    if n_probe > max_level:
        raise ResourceLimitError(
            f"probe level {n_probe} exceeds the cap of {max_level}"
        )

    tiers = [p_half for _, p_half in _halved_levels(qmap, z, n_probe)]

    def trace(h: float) -> CandidateTrace:
        rows: list[tuple[int, float, float]] = []
        prev = math.nan
        for n, p_half in enumerate(tiers, start=1):
            val = _level_value(p_half, n, h)
            rows.append((n, val, val / prev if n > 1 else math.nan))
            prev = val
        return CandidateTrace(h=h, levels=rows)

    candidates = [trace(h_lo), trace(h_hi)]
    r_lo, r_hi = candidates[0].ratio, candidates[1].ratio
    if not (r_lo > 1.0 and r_hi < 1.0):
        raise BracketError(
            f"bracket [{h_lo}, {h_hi}] does not straddle the dimension: "
            f"tail ratios {r_lo:.6f}, {r_hi:.6f} (need > 1 and < 1)"
        )

    lo, hi = float(h_lo), float(h_hi)
    while hi - lo > tol_h:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        t = trace(mid)
        candidates.append(t)
        if t.ratio > 1.0:
            lo = mid
        else:
            hi = mid
    return DimensionEstimate(
        h=0.5 * (lo + hi),
        bracket=(lo, hi),
        n_probe=n_probe,
        tol_h=tol_h,
        candidates=candidates,
    )


@dataclass(frozen=True)
class DensityCache:
    """Invariant-density values at every cover center and its image.

    f_center[i] = f(center_i); f_image[i] = f(T center_i). Paired centers
    +-w share one image evaluation, so f_image[2k] and f_image[2k+1] are
    the same float.
    """

    cover: BorelCover
    h: float
    tol: float
    f_center: np.ndarray
    f_image: np.ndarray

    def pair(self, i: int) -> tuple[float, float]:
        return float(self.f_center[i]), float(self.f_image[i])


def density_cache(
    cover: BorelCover,
    h: float,
    *,
    tol: float = DEFAULT_TOL,
    max_level: int = LEVEL_CAP,
    threads: int | None = None,
) -> DensityCache:
    """Evaluate the density at all centers, sharing work across +- pairs."""
    h = _check_h(h)
    qmap = cover.qmap
    centers = cover.centers

    def value_at(z: complex, what: str) -> float:
        res = density(qmap, z, h, tol=tol, max_level=max_level)
        if not res.converged:
            raise ConvergenceError(
                f"density at {what} did not stabilize within "
                f"{max_level} levels (last value {res.value:.6g})"
            )
        return res.value

    if len(centers) == 1:
        f0 = value_at(complex(centers[0]), "center 0")
        f_center = np.array([f0])
        f_image = np.array([f0])
    else:
        def one_pair(k: int) -> tuple[float, float, float]:
            plus = complex(centers[2 * k])
            minus = complex(centers[2 * k + 1])
            image = complex(forward(qmap, plus))
            return (
                value_at(plus, f"center {2 * k}"),
                value_at(minus, f"center {2 * k + 1}"),
                value_at(image, f"image of centers {2 * k},{2 * k + 1}"),
            )

        pair_vals = thread_map(one_pair, range(len(centers) // 2), threads)
        f_center = np.empty(len(centers))
        f_image = np.empty(len(centers))
        for k, (fp, fm, fi) in enumerate(pair_vals):
            f_center[2 * k] = fp
            f_center[2 * k + 1] = fm
            f_image[2 * k] = fi
            f_image[2 * k + 1] = fi
    f_center.flags.writeable = False
    f_image.flags.writeable = False
    return DensityCache(
        cover=cover, h=h, tol=tol, f_center=f_center, f_image=f_image
    )
