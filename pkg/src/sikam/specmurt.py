"""Accelerated shift-invariant search in the specmurt domain.

The specmurt representation of a log-frequency magnitude frame is the
modulus of the frame's Fourier transform: circularly shifting the frame (a
pitch transposition) leaves it unchanged, so frame similarity can be scored
without enumerating shifts. The shift itself is recovered afterwards by a
fast deconvolution between the two magnitude columns, and an optional
pruning stage re-ranks an oversampled pool by true aligned distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .kam import KernelError, NeighborSet, _as_matrix, _candidate_array, _top_k
from .shiftkam import shift_frame


@dataclass(frozen=True)
class SpecmurtFrame:
    """Nonnegative specmurt coefficients of one magnitude frame.

    ``coeffs`` holds the moduli of the frame's DFT from index ``dropped_head``
    up to the half length (real-input symmetry makes the rest redundant).
    """

    coeffs: np.ndarray
    dropped_head: int


@dataclass(frozen=True)
class ShiftEstimate:
    """Result of the deconvolution-based shift search.

    ``delta`` is the shift to feed :func:`sikam.shiftkam.shift_frame` so that
    the candidate aligns with the target; ``peak_ratio`` compares the winning
    deconvolution peak to the runner-up and is reported for diagnostics.
    """

    delta: int
    peak_value: float
    peak_ratio: float


def specmurt_transform(col: np.ndarray, drop_head: int = 1) -> SpecmurtFrame:
    """Specmurt coefficients of one nonnegative column.

    The leading ``drop_head`` coefficients (the broadband/DC end) are
    discarded; index 0 is the DC term, so the default of one drops it.
    """
    col = np.asarray(col, dtype=np.float64)
    if col.ndim != 1:
        raise KernelError("column must be one-dimensional")
    if np.any(col < 0):
        raise KernelError("column must be nonnegative")
    half = len(col) // 2 + 1
    if drop_head < 0 or drop_head >= half:
        raise KernelError(f"drop_head={drop_head} out of range for half length {half}")
    coeffs = np.abs(np.fft.rfft(col))[drop_head:half]
    return SpecmurtFrame(coeffs=coeffs, dropped_head=drop_head)


def specmurt_matrix(mag, drop_head: int = 1) -> np.ndarray:
    """Specmurt coefficients of every column at once, shape (half-F, T)."""
    data = _as_matrix(mag)
    half = data.shape[0] // 2 + 1
    if drop_head < 0 or drop_head >= half:
        raise KernelError(f"drop_head={drop_head} out of range for half length {half}")
    return np.abs(np.fft.rfft(data, axis=0))[drop_head:half]


def knn_specmurt(
    mag,
    target: int,
    candidates: Iterable[int],
    count: int,
    drop_head: int = 1,
    spec: np.ndarray | None = None,
) -> np.ndarray:
    """``count`` candidate frames closest to the target in the specmurt domain.

    Returns frame indices only; shifts are assigned later. ``spec`` may carry
    a precomputed :func:`specmurt_matrix` to avoid recomputation.
    """
    data = _as_matrix(mag)
    cands = _candidate_array(candidates, target)
    if len(cands) < count:
        raise KernelError(f"need at least {count} candidates, got {len(cands)}")
    if spec is None:
        spec = specmurt_matrix(data, drop_head)
    diff = spec - spec[:, target][:, None]
    dist = np.einsum("ij,ij->j", diff, diff)[cands]
    order = np.lexsort((cands, dist))[:count]
    return cands[order]


def estimate_shift_deconv(y: np.ndarray, z: np.ndarray) -> ShiftEstimate:
    """Relative frequency shift between two columns via fast deconvolution.

    Solves ``y = h * z`` (circular convolution) for ``h`` in the Fourier
    domain with a regularized division, and reads the shift off the peak of
    ``|h|``. The returned delta aligns ``z`` to ``y`` through
    ``shift_frame(z, delta)`` and lies in ``[-n/2, n/2)``.
    """
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if y.shape != z.shape or y.ndim != 1:
        raise KernelError("inputs must be one-dimensional and equal length")
    if not np.any(y):
        raise KernelError("target column is all zero")
    if not np.any(z):
        raise KernelError("candidate column is all zero")
    n = len(y)
    u = np.fft.ifft(y)
    v = np.fft.ifft(z)
    eps = 1e-8 * np.abs(v).max()
    h = np.fft.fft(u * np.conj(v) / (np.abs(v) ** 2 + eps**2))
    mags = np.abs(h)
    peak_idx = int(np.argmax(mags))
    peak = float(mags[peak_idx])
    rest = np.delete(mags, peak_idx)
    second = float(rest.max()) if len(rest) else 0.0
    lag = peak_idx if peak_idx < (n + 1) // 2 else peak_idx - n
    # h peaks at the negated displacement of z relative to y; negate so that
    # shift_frame(z, delta) lines z up with y.
    delta = -lag
    if delta == n // 2 and n % 2 == 0:
        delta = -(n // 2)
    ratio = peak / second if second > 0 else float("inf")
    return ShiftEstimate(delta=int(delta), peak_value=peak, peak_ratio=ratio)


def knn_specmurt_pruned(
    mag,
    target: int,
    candidates: Iterable[int],
    k: int,
    surplus: int,
    max_shift: int,
    drop_head: int = 1,
    clamp: bool = True,
    spec: np.ndarray | None = None,
) -> NeighborSet:
    """Accelerated shift-invariant kernel with optional pruning.

    Pipeline: pick ``k + surplus`` frames by specmurt similarity, estimate
    one shift per frame by deconvolution (clamped to ``[-max_shift,
    max_shift]`` unless ``clamp`` is off), then keep the ``k`` frames whose
    aligned columns are closest to the target in the time-frequency domain.
    With ``surplus=0`` the last step only re-ranks, matching the plain
    accelerated variant.
    """
    data = _as_matrix(mag)
    pool = knn_specmurt(data, target, candidates, k + surplus, drop_head, spec)
    target_col = data[:, target]
    shifts = np.zeros(len(pool), dtype=int)
    dists = np.zeros(len(pool))
    for i, frame in enumerate(pool):
        if not np.any(target_col) or not np.any(data[:, frame]):
            d = 0  # silent column: no shift information to recover
        else:
            d = estimate_shift_deconv(target_col, data[:, frame]).delta
        if clamp:
            d = int(np.clip(d, -max_shift, max_shift))
        shifts[i] = d
        aligned = shift_frame(data[:, frame], d)
        diff = aligned - target_col
        dists[i] = float(np.dot(diff, diff))
    pairs = _top_k(dists, pool, shifts, k)
    return NeighborSet(target=int(target), neighbors=tuple(pairs))
