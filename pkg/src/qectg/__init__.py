"""Rotated surface code decoding workbench.

Implements the full pipeline around an overlapping-tile neural decoder:
code geometry and syndromes, reproducible depolarizing noise, a naive
event-routing decoder, an exact minimum-weight matching baseline, tile
probability tables with dense classifier nets (plain and gated variants),
and a deterministic Monte Carlo evaluation harness with a CLI.
"""

from .decoders import DistributedDecoder, GatedDecoder, logical_frame
from .harness import (
    Dataset,
    EvalResult,
    complete_dataset,
    evaluate,
    exact_failure_rate,
    generate_dataset,
    load_dataset,
    make_decoder,
    save_dataset,
    sweep,
    wilson_interval,
)
from .lattice import (
    Check,
    Lattice,
    LogicalClass,
    PauliFrame,
    build_lattice,
    compose,
    residual_class,
    syndrome_of,
)
from .matching import MatchingDecoder, build_detector_graph, decode_mwpm, distances, mwpm
from .mlp import MlpClassifier, MlpModel, TrainConfig, forward, init_mlp, load_model, loss_grad, save_model, train
from .noise import TrialRng, sample_depolarizing
from .simple import SimpleDecoder, correction_chain, decode_simple, nearest_boundary
from .tiles import TileFeatureMap, TileTableSet, fit_tables, load_tables, make_features, make_tiles, save_tables, slice_syndrome

__version__ = "0.1.0"

__all__ = [
    "Check",
    "Dataset",
    "DistributedDecoder",
    "EvalResult",
    "GatedDecoder",
    "Lattice",
    "LogicalClass",
    "MatchingDecoder",
    "MlpClassifier",
    "MlpModel",
    "PauliFrame",
    "SimpleDecoder",
    "TileFeatureMap",
    "TileTableSet",
    "TrainConfig",
    "TrialRng",
    "build_detector_graph",
    "build_lattice",
    "complete_dataset",
    "compose",
    "correction_chain",
    "decode_mwpm",
    "decode_simple",
    "distances",
    "evaluate",
    "exact_failure_rate",
    "fit_tables",
    "forward",
    "generate_dataset",
    "init_mlp",
    "load_dataset",
    "load_model",
    "load_tables",
    "logical_frame",
    "loss_grad",
    "make_decoder",
    "make_features",
    "make_tiles",
    "mwpm",
    "nearest_boundary",
    "residual_class",
    "sample_depolarizing",
    "save_dataset",
    "save_model",
    "save_tables",
    "slice_syndrome",
    "sweep",
    "syndrome_of",
    "train",
    "wilson_interval",
]
