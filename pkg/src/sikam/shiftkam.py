"""Exhaustive shift-invariant neighbor search.

Extends the baseline K-NN kernel by admitting frequency-shifted candidate
frames: a candidate is compared to the target at every shift in
``[-delta, delta]`` and the best shift per frame is kept. This makes notes of
the same source at different pitches usable as neighbors, at a cost that
grows linearly with the shift range.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .kam import (
    KernelError,
    NeighborSet,
    _as_matrix,
    _candidate_array,
    _distances_at_shift,
    _top_k,
)
from .kam import median_estimate as median_estimate_shifted  # noqa: F401  (same contract; shifts are honored there)


def shift_frame(col: np.ndarray, delta: int) -> np.ndarray:
    """Shift a magnitude column by ``delta`` bins with zero padding.

    ``out[f] = col[f + delta]`` where defined, else 0: positive shifts move
    content toward lower bins.
    """
    col = np.asarray(col)
    n = len(col)
    if abs(delta) > n:
        raise KernelError(f"|delta|={abs(delta)} exceeds column length {n}")
    out = np.zeros_like(col)
    if delta == 0:
        out[:] = col
    elif delta > 0:
        out[: n - delta] = col[delta:]
    else:
        out[-delta:] = col[:delta]
    return out


def knn_shift_exhaustive(
    mag, target: int, candidates: Iterable[int], k: int, delta: int
) -> NeighborSet:
    """K best (frame, shift) pairs over all shifts in [-delta, delta].

    At most one shift per candidate frame survives (the best one), so a
    single frame cannot fill several neighbor slots with near-identical
    content. Ties break by ascending (distance, frame, shift). With
    ``delta=0`` this reduces exactly to :func:`sikam.kam.knn_baseline`.
    """
    data = _as_matrix(mag)
    cands = _candidate_array(candidates, target)
    if len(cands) < k:
        raise KernelError(
            f"need at least k={k} candidate frames, got {len(cands)} "
            "(one shift per frame is kept)"
        )
    target_col = data[:, target]
    best = np.full(len(cands), np.inf)
    best_shift = np.zeros(len(cands), dtype=int)
    for d in range(-delta, delta + 1):
        dist = _distances_at_shift(data, target_col, cands, d)
        better = dist < best
        best[better] = dist[better]
        best_shift[better] = d
    pairs = _top_k(best, cands, best_shift, k)
    return NeighborSet(target=int(target), neighbors=tuple(pairs))
