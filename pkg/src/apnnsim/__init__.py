"""Behavioral simulator for threshold-logic approximate PNNs on memristive crossbars."""

from .apnn import ApnnModel, Prediction, ThresholdPolicy, apnn_classify, train_adaptive_thresholds, \
    train_fixed_threshold
from .crossbar import AnalogTrace, ElectricalConfig, analog_forward
from .cost import estimate
from .data import Dataset, Sample, kfold, load_csv, unit_normalize
from .pnn_ref import PnnModel, pattern_output, pnn_classify
from .quantizer import QuantizerSpec, quantize, quantize_matrix
from .validation import METHODS, cross_validate

__version__ = "0.1.0"

__all__ = [
    "AnalogTrace", "ApnnModel", "Dataset", "ElectricalConfig", "METHODS", "PnnModel", "Prediction",
    "QuantizerSpec", "Sample", "ThresholdPolicy", "analog_forward", "apnn_classify", "cross_validate",
    "estimate", "kfold", "load_csv", "pattern_output", "pnn_classify", "quantize", "quantize_matrix",
    "train_adaptive_thresholds", "train_fixed_threshold", "unit_normalize",
]
