"""Interference reduction via shift-invariant kernel additive modelling.

The package estimates the magnitude of a dominant musical source in every
interfered frame as a robust median over similar frames, where similarity is
measured either plainly (baseline), across all frequency shifts (exhaustive
shift-invariant kernel), or through the shift-invariant specmurt domain with
fast-deconvolution alignment and optional pruning. Soft masks derived from
the estimate split the recording into source and interference signals.
"""

from .evaluate import (
    EvalResult,
    SyntheticScene,
    build_scene,
    nsdr,
    run_grid,
    sdr,
)
from .kam import (
    NeighborSet,
    SeparationConfig,
    build_soft_mask,
    knn_baseline,
    median_estimate,
    separate,
)
from .shiftkam import knn_shift_exhaustive, median_estimate_shifted, shift_frame
from .specmurt import (
    ShiftEstimate,
    SpecmurtFrame,
    estimate_shift_deconv,
    knn_specmurt,
    knn_specmurt_pruned,
    specmurt_transform,
)
from .synth import interference_clip, synthesize_note
from .timefreq import (
    ComplexSpectrogram,
    MagSpectrogram,
    TransformParams,
    apply_mask_and_resynthesize,
    forward_logfreq,
    inverse_logfreq,
    magnitude,
)

__version__ = "0.1.0"

__all__ = [
    "ComplexSpectrogram",
    "EvalResult",
    "MagSpectrogram",
    "NeighborSet",
    "SeparationConfig",
    "ShiftEstimate",
    "SpecmurtFrame",
    "SyntheticScene",
    "TransformParams",
    "apply_mask_and_resynthesize",
    "build_scene",
    "build_soft_mask",
    "estimate_shift_deconv",
    "forward_logfreq",
    "interference_clip",
    "inverse_logfreq",
    "knn_baseline",
    "knn_shift_exhaustive",
    "knn_specmurt",
    "knn_specmurt_pruned",
    "magnitude",
    "median_estimate",
    "median_estimate_shifted",
    "nsdr",
    "run_grid",
    "sdr",
    "separate",
    "shift_frame",
    "specmurt_transform",
    "synthesize_note",
    "__version__",
]
