"""Kernel additive estimation of a dominant source from similar frames.

A kernel assigns to every processed frame a set of K neighbor frames believed
to contain the same source content; the per-bin median across the neighbors
is an outlier-resistant estimate of the source magnitude, which turns into a
soft mask on the complex spectrogram. The baseline kernel here is plain K
nearest neighbors under squared Euclidean distance between whole magnitude
frames; shift-aware kernels (see :mod:`sikam.shiftkam` and
:mod:`sikam.specmurt`) reuse the same estimation and masking machinery with
per-neighbor frequency shifts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .timefreq import ComplexSpectrogram, MagSpectrogram

VARIANTS = ("baseline", "shift_exhaustive", "specmurt", "specmurt_pruned")


class KernelError(ValueError):
    """Raised for invalid kernel inputs (for example a candidate pool < K)."""


@dataclass(frozen=True)
class NeighborSet:
    """Neighbors of one target frame: (frame, shift) pairs, length K.

    A shift of d means the value used for output bin f is read from the
    neighbor's bin f + d (content moves down by d bins for positive d).
    """

    target: int
    neighbors: tuple[tuple[int, int], ...]

    @property
    def frames(self) -> np.ndarray:
        return np.array([f for f, _ in self.neighbors], dtype=int)

    @property
    def shifts(self) -> np.ndarray:
        return np.array([s for _, s in self.neighbors], dtype=int)

    def __len__(self) -> int:
        return len(self.neighbors)


@dataclass(frozen=True)
class SeparationConfig:
    """Settings of one separation run.

    Attributes
    ----------
    k : int
        Number of neighbors per processed frame.
    delta : int
        Maximum admissible frequency shift in bins (shift variants).
    surplus : int or None
        Extra pool size P for the pruned variant; defaults to 2 * k.
    variant : str
        One of "baseline", "shift_exhaustive", "specmurt", "specmurt_pruned".
    support : frozenset[int]
        Frame indices containing the interference; only these are processed,
        and they are excluded from every candidate pool.
    drop_head : int
        Leading specmurt coefficients to discard in the accelerated variants.
    clamp_shifts : bool
        Clamp deconvolution shifts to [-delta, delta]; disable to allow the
        accelerated variants to use arbitrary shifts.
    """

    k: int = 300
    delta: int = 48
    surplus: int | None = None
    variant: str = "baseline"
    support: frozenset = field(default_factory=frozenset)
    drop_head: int = 1
    clamp_shifts: bool = True

    def __post_init__(self):
        if self.surplus is None:
            object.__setattr__(self, "surplus", 2 * self.k)
        object.__setattr__(self, "support", frozenset(int(t) for t in self.support))
        if self.k < 1:
            raise KernelError("k must be >= 1")
        if self.delta < 0:
            raise KernelError("delta must be >= 0")
        if self.surplus < 0:
            raise KernelError("surplus must be >= 0")
        if self.variant not in VARIANTS:
            raise KernelError(f"unknown variant {self.variant!r}")


def _as_matrix(mag) -> np.ndarray:
    data = mag.data if isinstance(mag, MagSpectrogram) else np.asarray(mag)
    if data.ndim != 2:
        raise KernelError("magnitude input must be a 2-D matrix")
    return data


def _candidate_array(candidates, target: int) -> np.ndarray:
    """Sorted, deduplicated candidate frames with the target removed."""
    if isinstance(candidates, np.ndarray):
        cands = candidates.astype(int, copy=False)
    else:
        cands = np.fromiter((int(c) for c in candidates), dtype=int)
    cands = np.unique(cands)
    return cands[cands != target]


def _distances_at_shift(
    mag: np.ndarray, target_col: np.ndarray, candidates: np.ndarray, delta: int
) -> np.ndarray:
    """Squared distances between the target and each candidate shifted by delta.

    Out-of-range bins of the shifted candidate read as zero, so the target's
    energy in the uncovered band counts fully toward the distance. Distances
    are computed against the whole (contiguous) matrix and the candidate
    entries selected afterwards, which is much faster than gathering columns.
    """
    n_bins = mag.shape[0]
    if delta == 0:
        diff = mag - target_col[:, None]
        full = np.einsum("ij,ij->j", diff, diff)
    elif delta > 0:
        core = mag[delta:] - target_col[: n_bins - delta, None]
        edge = float(np.dot(target_col[n_bins - delta :], target_col[n_bins - delta :]))
        full = np.einsum("ij,ij->j", core, core) + edge
    else:
        core = mag[:delta] - target_col[-delta:, None]
        edge = float(np.dot(target_col[:-delta], target_col[:-delta]))
        full = np.einsum("ij,ij->j", core, core) + edge
    return full[candidates]


def _top_k(
    distances: np.ndarray, frames: np.ndarray, shifts: np.ndarray, k: int
) -> list[tuple[int, int]]:
    """K smallest by (distance, frame, shift) lexicographic order."""
    order = np.lexsort((shifts, frames, distances))[:k]
    return [(int(frames[i]), int(shifts[i])) for i in order]


def knn_baseline(mag, target: int, candidates: Iterable[int], k: int) -> NeighborSet:
    """K nearest candidate frames to the target frame, no shifts.

    Distance is the squared Euclidean distance between whole magnitude
    columns; the target itself is excluded from the pool; ties break by
    ascending frame index.
    """
    data = _as_matrix(mag)
    cands = _candidate_array(candidates, target)
    if len(cands) < k:
        raise KernelError(f"need at least k={k} candidates, got {len(cands)}")
    dist = _distances_at_shift(data, data[:, target], cands, 0)
    pairs = _top_k(dist, cands, np.zeros(len(cands), dtype=int), k)
    return NeighborSet(target=int(target), neighbors=tuple(pairs))


def median_estimate(mag, nset: NeighborSet) -> np.ndarray:
    """Per-bin median over the neighbor values, honoring recorded shifts.

    The value contributed to output bin f by neighbor (frame, d) is the
    neighbor's magnitude at bin f + d, zero when out of range. With an even
    neighbor count the lower median (element ``(K-1)//2`` of the sorted
    values) is returned, which keeps the estimate inside the observed values.
    """
    if len(nset) == 0:
        raise KernelError("empty neighbor set")
    data = _as_matrix(mag)
    n_bins = data.shape[0]
    stack = np.zeros((len(nset), n_bins))
    for i, (frame, shift) in enumerate(nset.neighbors):
        col = data[:, frame]
        if shift == 0:
            stack[i] = col
        elif shift > 0:
            stack[i, : n_bins - shift] = col[shift:]
        else:
            stack[i, -shift:] = col[:shift]
    kth = (len(nset) - 1) // 2
    return np.partition(stack, kth, axis=0)[kth]


def _soft_mask(s_est: np.ndarray, x_mag: np.ndarray) -> np.ndarray:
    # mask = S / (max(X - S, 0) + S) = S / max(X, S), with 0/0 -> 0
    denom = np.maximum(x_mag, s_est)
    mask = np.zeros_like(denom)
    np.divide(s_est, denom, out=mask, where=denom > 0)
    return mask


def build_soft_mask(s_est, x_mag) -> np.ndarray:
    """Soft mask S / (N + S) with N = max(X - S, 0); zero where both vanish.

    Entries lie in [0, 1], and equal exactly 1 wherever the estimate reaches
    or exceeds the observed magnitude (and is itself nonzero).
    """
    s = np.asarray(
        s_est.data if isinstance(s_est, MagSpectrogram) else s_est, dtype=np.float64
    )
    x = np.asarray(
        x_mag.data if isinstance(x_mag, MagSpectrogram) else x_mag, dtype=np.float64
    )
    if s.shape != x.shape:
        raise KernelError(f"shape mismatch: {s.shape} vs {x.shape}")
    if np.any(s < 0) or np.any(x < 0):
        raise KernelError("magnitudes must be nonnegative")
    return _soft_mask(s, x)


def plan_neighbors(mag, config: SeparationConfig) -> dict[int, NeighborSet]:
    """Neighbor sets for every support frame under the configured variant.

    Candidates are all frames outside the support. Raises
    :class:`KernelError` when the pool cannot supply k (plus surplus for the
    pruned variant) candidates.
    """
    from . import shiftkam, specmurt

    data = _as_matrix(mag)
    n_frames = data.shape[1]
    support = sorted(t for t in config.support)
    if not support:
        return {}
    if support[0] < 0 or support[-1] >= n_frames:
        raise KernelError("support frame index out of range")
    candidates = np.setdiff1d(np.arange(n_frames), np.array(support, dtype=int))
    pool = len(candidates)
    if pool < config.k:
        raise KernelError(
            f"candidate pool ({pool} frames) smaller than k={config.k}"
        )
    if config.variant == "specmurt_pruned" and pool < config.k + config.surplus:
        raise KernelError(
            f"candidate pool ({pool} frames) smaller than k+surplus="
            f"{config.k + config.surplus}"
        )

    plans: dict[int, NeighborSet] = {}
    if config.variant == "baseline":
        for t in support:
            plans[t] = knn_baseline(data, t, candidates, config.k)
    elif config.variant == "shift_exhaustive":
        for t in support:
            plans[t] = shiftkam.knn_shift_exhaustive(
                data, t, candidates, config.k, config.delta
            )
    else:
        surplus = config.surplus if config.variant == "specmurt_pruned" else 0
        spec = specmurt.specmurt_matrix(data, config.drop_head)
        for t in support:
            plans[t] = specmurt.knn_specmurt_pruned(
                data,
                t,
                candidates,
                config.k,
                surplus,
                config.delta,
                drop_head=config.drop_head,
                clamp=config.clamp_shifts,
                spec=spec,
            )
    return plans


def separation_masks(mag, config: SeparationConfig, plans=None) -> np.ndarray:
    """Soft mask matrix for the source of interest: ones outside the support."""
    data = _as_matrix(mag)
    if plans is None:
        plans = plan_neighbors(data, config)
    mask = np.ones_like(data)
    for t, nset in plans.items():
        est = median_estimate(data, nset)
        mask[:, t] = _soft_mask(est, data[:, t])
    return mask


def separate(
    spect: ComplexSpectrogram, config: SeparationConfig
) -> tuple[ComplexSpectrogram, ComplexSpectrogram]:
    """Split a spectrogram into source and interference estimates.

    Support frames get the variant's median estimate turned into a soft mask;
    all other frames pass through unchanged into the source. The two outputs
    use complementary masks, so they sum to the input exactly.
    """
    mag = np.abs(spect.data)
    mask = separation_masks(mag, config)
    source = spect.with_data(spect.data * mask)
    interference = spect.with_data(spect.data * (1.0 - mask))
    return source, interference
