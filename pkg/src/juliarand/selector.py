"""Least-squares selection of pseudo-random points from a lattice.

For a candidate trajectory x, T x, ..., each cover ball A with center z*
contributes the squared mismatch between two length-n Birkhoff sums: the
occupation count of the image ball T(A), weighted 1/f(T z*), against the
|T'|^h-weighted occupation of A itself, weighted 1/f(z*). On a trajectory
that equidistributes for the invariant measure both sums estimate the same
integral, so small objectives flag good pseudo-random points. The lattice
row minimizing the total is selected.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .dynamics import QuadraticMap, inverse_branches
from .errors import DomainError
from .lattice import Lattice, forward_window
from .transfer import DensityCache


def indicator_a(z: complex, center: complex, radius: float) -> int:
    """Ball membership, strict: 1 iff |z - center| < radius."""
    if radius <= 0.0:
        raise ValueError(f"radius must be > 0, got {radius}")
    return 1 if abs(z - center) < radius else 0


def indicator_ta(
    z: complex, center: complex, radius: float, qmap: QuadraticMap
) -> int:
    """Image-ball membership: 1 iff either preimage of z is in the ball."""
    if radius <= 0.0:
        raise ValueError(f"radius must be > 0, got {radius}")
    plus, minus = inverse_branches(qmap, z)
    return 1 if (abs(plus - center) < radius or abs(minus - center) < radius) else 0


@dataclass(frozen=True)
class ObjectiveParams:
    """Knobs for the selection objective.

    n_sum is the Birkhoff sum length n; the cover geometry, the exponent h
    and both density tables ride along inside the cache. shift_weights
    switches the image-ball indicator from the same point T^k x to the
    advanced point T^(k+1) x (the alternative pairing of the occupation
    sums); the default tests both indicators at the same point.
    """

    n_sum: int
    densities: DensityCache
    shift_weights: bool = False

    def __post_init__(self) -> None:
        if self.n_sum < 1:
            raise ValueError(f"n_sum must be >= 1, got {self.n_sum}")


@dataclass(frozen=True)
class PseudoPoint:
    """A selected lattice row: its forward trajectory and residuals.

    beta_sq is the raw squared residual; normalized divides it by n^2
    (equivalently, it is the objective with the 1/n factors kept inside
    the sums).
    """

    lattice_row: int
    trajectory: np.ndarray
    beta_sq: float
    normalized: float


@dataclass(frozen=True)
class AdaptiveResult:
    point: PseudoPoint
    p_used: int
    attained: bool


def _row_objectives(
    w: np.ndarray, ta_w: np.ndarray, params: ObjectiveParams
) -> np.ndarray:
    """Objective per row; w and ta_w are (rows, n) forward-orbit windows."""
    cache = params.densities
    cover = cache.cover
    n = params.n_sum
    pre_plus = np.sqrt(ta_w - cover.qmap.c)
    pre_minus = -pre_plus
    weights = (2.0 * np.abs(w)) ** cache.h
    total = np.zeros(w.shape[0])
    for j, z in enumerate(cover.centers):
        hits_ta = (np.abs(pre_plus - z) < cover.radius) | (
            np.abs(pre_minus - z) < cover.radius
        )
        lhs = hits_ta.sum(axis=1) / (n * cache.f_image[j])
        rhs = ((np.abs(w - z) < cover.radius) * weights).sum(axis=1) / (
            n * cache.f_center[j]
        )
        total += (lhs - rhs) ** 2
    return total


def objective(trajectory, params: ObjectiveParams) -> float:
    """Total squared residual over all cover balls for one trajectory.

    The trajectory must carry n_sum + 1 forward-orbit points so the
    advanced-point indicator variant has T^(k+1) x available for every k.
    """
    traj = np.asarray(trajectory, dtype=complex)
    n = params.n_sum
    if traj.ndim != 1 or traj.size < n + 1:
        raise ValueError(
            f"trajectory needs >= {n + 1} points for n_sum={n}, "
            f"got shape {traj.shape}"
        )
    w = traj[np.newaxis, :n]
    ta_w = traj[np.newaxis, 1:n + 1] if params.shift_weights else w
    return float(_row_objectives(w, ta_w, params)[0])


def select_pseudorandom(lattice: Lattice, params: ObjectiveParams) -> PseudoPoint:
    """Evaluate the objective on every lattice row and take the argmin.

    Rows are scored on their stored forward windows, so no fresh map
    evaluations happen. Ties go to the lowest row index.
    """
    n = params.n_sum
    win = forward_window(lattice, n)
    w = win[:, :n]
    ta_w = win[:, 1:] if params.shift_weights else w
    vals = _row_objectives(w, ta_w, params)
    row = int(np.argmin(vals))
    norm = float(vals[row])
    return PseudoPoint(
        lattice_row=row,
        trajectory=win[row].copy(),
        beta_sq=norm * n * n,
        normalized=norm,
    )


def adaptive_select(
    lattice_source: Lattice | Callable[[], Lattice],
    params: ObjectiveParams,
    threshold: float,
    p_max: int,
) -> AdaptiveResult:
    """Lengthen the Birkhoff sum until the normalized minimum is small.

    Selection runs at p = n_sum, n_sum + 1, ... and stops the first time
    the normalized minimum drops to the threshold; hitting p_max without
    that is reported as non-attainment (the minimum does shrink as p grows,
    but with no computable rate, so the cap is the caller's budget).
    """
    lattice = lattice_source() if callable(lattice_source) else lattice_source
    if math.isnan(threshold) or threshold < 0.0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    if p_max < params.n_sum:
        raise ValueError(
            f"p_max={p_max} is below the starting sum length {params.n_sum}"
        )
    if p_max > lattice.depth:
        raise ValueError(
            f"p_max={p_max} exceeds the lattice depth {lattice.depth}"
        )
    point = None
    for p in range(params.n_sum, p_max + 1):
        point = select_pseudorandom(lattice, replace(params, n_sum=p))
        if point.normalized <= threshold:
            return AdaptiveResult(point=point, p_used=p, attained=True)
    assert point is not None
    return AdaptiveResult(point=point, p_used=p_max, attained=False)


def opteval_compat(
    lattice: Lattice, n: int, densities: DensityCache
) -> tuple[int, float]:
    """Selection the way the reference Matlab routine computes it.

    Kept verbatim for cross-validation, quirks included: the A-side window
    is the stored steps [depth-n-1, depth-1] and the image-ball window
    [depth-n, depth] (both n+1 wide); the image-ball test compares real
    parts of complex differences instead of moduli and adds the two branch
    tests; the derivative weight is 2|w|^h rather than (2|w|)^h; residuals
    carry no 1/n; and the final score divides by depth. Returns (argmin
    row, min score).
    """
    cover = densities.cover
    depth = lattice.depth
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if depth < n + 1:
        raise ValueError(
            f"depth {depth} too small for n={n} (needs depth >= n + 1)"
        )
    if densities.h <= 0.0:
        raise DomainError(f"exponent must be positive, got {densities.h}")
    rows = lattice.rows
    a_win = rows[:, depth - n - 1:depth]
    ta_win = rows[:, depth - n:depth + 1]
    score = np.zeros(lattice.ell)
    for j, z in enumerate(cover.centers):
        in_a = np.abs(a_win - z) < cover.radius
        rhs = 2.0 * ((in_a * np.abs(a_win)) ** densities.h).sum(axis=1)
        lhs = ((ta_win - z).real < cover.radius).sum(axis=1) + (
            (-ta_win - z).real < cover.radius
        ).sum(axis=1)
        score += (lhs / densities.f_image[j] - rhs / densities.f_center[j]) ** 2
    score /= depth
    row = int(np.argmin(score))
    return row, float(score[row])
