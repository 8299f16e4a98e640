"""Backward-orbit covers and random backward-iteration meshes.

A cover is the set of 2^m preimages of the repelling fixed point z0 under m
pullbacks, each the center of a ball of radius 2^(1-m). A lattice is a bundle
of random backward orbits started from randomly chosen cover centers: row i
stores [x_i, preimage, preimage of that, ...] so reading a row right-to-left
gives a forward trajectory that T advances one slot per step.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from ._util import thread_map
from .dynamics import QuadraticMap, forward
from .errors import DomainError, NonFiniteError, ResourceLimitError

# Hard cap on enumerated preimages (2^24 complex values ~ 268 MB).
CENTER_CAP = 1 << 24


def find_repelling_fixed_point(qmap: QuadraticMap) -> complex:
    """The fixed point of z^2 + c with |T'| > 1, from the quadratic formula.

    Of the two roots (1 +- sqrt(1 - 4c))/2 the one with the larger modulus is
    returned when both repel; if neither does (c in the main cardioid's
    closure boundary cases, e.g. c = 1/4) the map has no repelling anchor and
    a DomainError is raised.
    """
    s = cmath.sqrt(1.0 - 4.0 * qmap.c)
    roots = [(1.0 + s) / 2.0, (1.0 - s) / 2.0]
    repelling = [z for z in roots if abs(2.0 * z) > 1.0]
    if not repelling:
        raise DomainError(
            f"neither fixed point of z^2 + {qmap.c} is repelling"
        )
    return max(repelling, key=abs)


@dataclass(frozen=True)
class BorelCover:
    """Ball centers T^-m(z0) with their common radius.

    centers[2k] and centers[2k + 1] are the +- pair sharing a forward image;
    the index, read as an m-bit binary code (most significant bit first,
    0 = plus branch, 1 = minus branch), spells the branch word applied to z0.
    """

    qmap: QuadraticMap
    m_cover: int
    z0: complex
    centers: np.ndarray
    radius: float

    def __len__(self) -> int:
        return len(self.centers)


def borel_centers(
    qmap: QuadraticMap, m_cover: int, *, cap: int = CENTER_CAP
) -> BorelCover:
    """Enumerate all 2^m_cover backward branch words of the fixed point."""
    if m_cover < 0:
        raise ValueError(f"m_cover must be >= 0, got {m_cover}")
    count = 1 << m_cover
    if count > cap:
        raise ResourceLimitError(
            f"2^{m_cover} centers exceed the cap of {cap}"
        )
    z0 = find_repelling_fixed_point(qmap)
    pts = np.array([z0], dtype=complex)
    for _ in range(m_cover):
        child = np.sqrt(pts - qmap.c)
        # Interleave so each +w sits next to its -w partner.
        pts = np.stack([child, -child], axis=-1).reshape(-1)
    if not np.all(np.isfinite(pts)):
        raise NonFiniteError("cover enumeration produced non-finite centers")
    pts.flags.writeable = False
    return BorelCover(
        qmap=qmap,
        m_cover=m_cover,
        z0=z0,
        centers=pts,
        radius=2.0 ** (1 - m_cover),
    )


def anchor_recovery_error(cover: BorelCover) -> float:
    """max_i |T^m(center_i) - z0|, a diagnostic for cover integrity.

    Forward iteration amplifies roundoff by roughly |2z| per step, so this
    stays near 2^m * ulp for moderate m and is only meaningful there.
    """
    pts = cover.centers.copy()
    for _ in range(cover.m_cover):
        pts = forward(cover.qmap, pts)
    return float(np.max(np.abs(pts - cover.z0)))


@dataclass(frozen=True)
class Lattice:
    """ell random backward orbits of length depth, plus their anchors.

    rows[i, 0] is the randomly drawn cover center; rows[i, j] is one of the
    two preimages of rows[i, j - 1], the branch tossed by a fair coin. The
    forward trajectory of the deepest point is the row read in reverse.
    """

    cover: BorelCover
    ell: int
    depth: int
    seed: int
    rows: np.ndarray
    anchor_index: np.ndarray


def _row_draws(seed: int, i: int, n_centers: int, depth: int):
    """Anchor index and sign word for row i, from its own counter stream.

    Each row owns a child of the master seed, so rows can be generated in
    any order (or on any number of threads) with identical results.
    """
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(i,))
    rng = np.random.Generator(np.random.Philox(ss))
    anchor = int(rng.integers(0, n_centers))
    signs = rng.integers(0, 2, size=depth) * 2 - 1
    return anchor, signs


def make_lattice(
    cover: BorelCover,
    ell: int,
    depth: int,
    seed: int,
    *,
    threads: int | None = None,
) -> Lattice:
    """Draw ell independent random backward orbits of length depth."""
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    if seed < 0:
        raise ValueError(f"seed must be >= 0, got {seed}")
    n_centers = len(cover.centers)

    draws = thread_map(
        lambda i: _row_draws(seed, i, n_centers, depth), range(ell), threads
    )
    anchors = np.array([a for a, _ in draws], dtype=np.int64)
    signs = np.stack([s for _, s in draws]) if depth > 0 else np.empty((ell, 0))

    rows = np.empty((ell, depth + 1), dtype=complex)
    rows[:, 0] = cover.centers[anchors]
    c = cover.qmap.c
    for j in range(1, depth + 1):
        rows[:, j] = signs[:, j - 1] * np.sqrt(rows[:, j - 1] - c)
    if not np.all(np.isfinite(rows)):
        raise NonFiniteError("lattice generation produced non-finite points")
    rows.flags.writeable = False
    anchors.flags.writeable = False
    return Lattice(
        cover=cover, ell=ell, depth=depth, seed=seed,
        rows=rows, anchor_index=anchors,
    )


def forward_window(lattice: Lattice, n: int) -> np.ndarray:
    """Per-row forward trajectories of length n + 1.

    Column k holds T^k applied to each row's deepest point; the values are
    read straight out of the stored backward orbit, so no forward iteration
    (with its error blowup) happens. Requires n <= depth.
    """
    if not 0 <= n <= lattice.depth:
        raise ValueError(
            f"window length {n} not in [0, depth={lattice.depth}]"
        )
    return lattice.rows[:, lattice.depth - n:][:, ::-1]
