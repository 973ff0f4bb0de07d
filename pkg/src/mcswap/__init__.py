"""Multi-class SWAP-test kernel classifier with single-qubit label states."""

from .classifier import (
    ClassifierConfig,
    PredictedVector,
    SwapTestClassifier,
    TrainingSet,
    classify,
    predicted_classical,
    prepare_initial_state,
    run_tomography,
)
from .labels import LabelSet, assign, bloch_angles, tammes_placement

__version__ = "0.1.0"

__all__ = [
    "ClassifierConfig",
    "LabelSet",
    "PredictedVector",
    "SwapTestClassifier",
    "TrainingSet",
    "assign",
    "bloch_angles",
    "classify",
    "predicted_classical",
    "prepare_initial_state",
    "run_tomography",
    "tammes_placement",
]
