"""Birkhoff-average validation and ensemble experiments.

A selected point is only as good as its time averages, so this module
averages test functions along trajectories, compares against the
deterministic reference value obtained by averaging over all cover
preimages, and repeats the whole lattice-plus-selection pipeline over many
independently seeded trials to get ensemble statistics.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._util import thread_map
from .dynamics import QuadraticMap
from .errors import JuliaRandError
from .lattice import BorelCover, Lattice, borel_centers, make_lattice
from .selector import ObjectiveParams, adaptive_select, select_pseudorandom
from .transfer import DEFAULT_TOL, DensityCache, density_cache


@dataclass(frozen=True)
class TestFunction:
    """A named observable, vectorized over complex arrays."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]


BUILTIN_TEST_FUNCTIONS: dict[str, TestFunction] = {
    "abs": TestFunction("abs", np.abs),
    "re": TestFunction("re", np.real),
    "im": TestFunction("im", np.imag),
    "abs2": TestFunction("abs2", lambda z: np.abs(z) ** 2),
}


def birkhoff_average(trajectory, g: TestFunction) -> float:
    """Arithmetic mean of g over the trajectory points."""
    traj = np.asarray(trajectory, dtype=complex)
    if traj.size == 0:
        raise ValueError("trajectory is empty")
    return float(np.mean(g.fn(traj)))


def reference_integral(cover: BorelCover, g: TestFunction) -> float:
    """Mean of g over all cover centers.

    The preimages of the fixed point equidistribute for the invariant
    measure as the pullback depth grows, so this mean converges to the
    integral of g and serves as the deterministic yardstick for the
    stochastic trajectory averages.
    """
    return float(np.mean(g.fn(cover.centers)))


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one ensemble trial needs, minus its seed."""

    qmap: QuadraticMap
    m_cover: int
    ell: int
    depth: int
    n_sum: int
    h: float
    g: TestFunction
    tol_density: float = DEFAULT_TOL
    threshold: float | None = None
    p_max: int | None = None


@dataclass(frozen=True)
class TrialResult:
    seed: int
    row: int | None
    average: float
    beta_sq: float
    normalized: float
    p_used: int | None
    trajectory_head: tuple[complex, ...] = ()
    error: str | None = None


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    alpha: int
    master_seed: int
    mu: float
    sigma: float
    per_trial: list[TrialResult]
    runtime_seconds: float

    @property
    def complete(self) -> bool:
        return all(t.error is None for t in self.per_trial)


def trial_seed(master_seed: int, trial: int) -> int:
    """Derive the seed of one trial from the master seed.

    Each trial gets its own child of the master entropy, so trials are
    statistically independent yet fully reproducible, in any execution
    order and on any number of threads.
    """
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(trial,))
    return int(ss.generate_state(1, np.uint64)[0])


def run_experiment(
    config: ExperimentConfig,
    alpha: int,
    master_seed: int,
    *,
    cover: BorelCover | None = None,
    densities: DensityCache | None = None,
    threads: int | None = None,
) -> ExperimentReport:
    """alpha independent rounds of lattice construction plus selection.

    Every trial draws a fresh lattice from its derived seed, selects the
    minimizing row, and averages g over that row's stored forward orbit
    (all depth points of it, not just the n_sum used for selection). A
    trial that throws is recorded with its error message and left out of
    the mean and standard deviation rather than aborting the ensemble.
    """
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    t0 = time.perf_counter()
    if cover is None:
        cover = borel_centers(config.qmap, config.m_cover)
    if densities is None:
        densities = density_cache(
            cover, config.h, tol=config.tol_density, threads=threads
        )
    params = ObjectiveParams(n_sum=config.n_sum, densities=densities)

    def one_trial(t: int) -> TrialResult:
        seed = trial_seed(master_seed, t)
        try:
            lat: Lattice = make_lattice(cover, config.ell, config.depth, seed)
            if config.threshold is not None:
                p_max = config.p_max if config.p_max is not None else config.depth
                res = adaptive_select(lat, params, config.threshold, p_max)
                point, p_used = res.point, res.p_used
            else:
                point, p_used = select_pseudorandom(lat, params), config.n_sum
            avg = birkhoff_average(
                lat.rows[point.lattice_row, :config.depth], config.g
            )
            return TrialResult(
                seed=seed,
                row=point.lattice_row,
                average=avg,
                beta_sq=point.beta_sq,
                normalized=point.normalized,
                p_used=p_used,
                trajectory_head=tuple(complex(z) for z in point.trajectory[:10]),
            )
        except JuliaRandError as exc:
            return TrialResult(
                seed=seed, row=None, average=math.nan, beta_sq=math.nan,
                normalized=math.nan, p_used=None,
                error=f"{type(exc).__name__}: {exc}",
            )

    results = thread_map(one_trial, range(alpha), threads)
    good = np.array([t.average for t in results if t.error is None])
    mu = float(np.mean(good)) if good.size else math.nan
    sigma = float(np.std(good)) if good.size else math.nan
    return ExperimentReport(
        config=config,
        alpha=alpha,
        master_seed=master_seed,
        mu=mu,
        sigma=sigma,
        per_trial=results,
        runtime_seconds=time.perf_counter() - t0,
    )
