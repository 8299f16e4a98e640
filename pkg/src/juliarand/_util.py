"""Small shared helpers."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        return os.cpu_count() or 1
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    return threads


def thread_map(fn: Callable[[T], R], items: Iterable[T], threads: int | None) -> list[R]:
    """Map fn over items, possibly on a thread pool.

    Results come back in input order regardless of scheduling, so callers
    that aggregate them get the same answer for every thread count.
    """
    items = list(items)
    n = resolve_threads(threads)
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def parse_complex_pair(text: str) -> complex:
    """Parse 're,im' into a complex number (CLI input convention)."""
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected 're,im', got {text!r}")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise ValueError(f"expected 're,im' with float parts, got {text!r}") from exc


def format_float(x: float) -> str:
    """Render a float at 17 significant digits (round-trip exact)."""
    return f"{x:.17g}"


def format_complex(z: complex) -> str:
    return f"{format_float(z.real)},{format_float(z.imag)}"
