"""Gesture recognition from reflected-light traces.

Typical use::

    from lwsense import preset_dataset, PipelineConfig, evaluate
    ds = preset_dataset("ir20", seed=7)
    print(evaluate(ds, PipelineConfig(), "kfold10", seed=7).mean_accuracy)
"""

import sys

__version__ = "0.1.0"

from .align import DtwTemplateFeaturizer, ZeroPadFeaturizer, dtw_distance, warp_onto, zero_pad, zscore
from .classify import KnnModel, load_model, predict, save_model, train_knn
from .errors import LwsError
from .evaluate import (
    ConfusionMatrix,
    EvalReport,
    ablation_run,
    confusion_matrix,
    cross_validate,
    evaluate,
    kfold_split,
    leave_one_subject_out,
    power_spectrum,
)
from .kernels import BACKEND
from .pipeline import PipelineConfig, preprocess
from .segment import GestureBounds, detect_gesture, trim
from .synth import PRESETS, DatasetSpec, ScenarioSpec, get_preset, preset_dataset, synth_dataset, synth_trace
from .types import (
    Dataset,
    FeatureVector,
    GestureLabel,
    Trace,
    TraceMeta,
    read_dataset,
    read_trace_csv,
    validate_trace,
    write_dataset,
    write_trace_csv,
)
from .wavelet import DenoiseConfig, denoise, dwt_forward, dwt_inverse, threshold_value

__all__ = [n for n, v in dict(globals()).items() if not n.startswith("_") and not isinstance(v, type(sys))]
