"""fuseval: a reproducible evaluation platform for IR data fusion.

Parses TREC-format runs and qrels, fuses them with the standard algorithm
suite (interleave, CombSum, CombMNZ, linear combination, ProbFuse, SegFuse,
SlideFuse), evaluates with trec_eval-compatible metrics under a consistent
train/test protocol, stores every experiment for later extension, and
exports publication-ready tables, runs and chart data.
"""

from .trec_io import Qrels, Run, parse_qrels, parse_run, write_run
from .fusion import ALGORITHMS, FusionModel, FusionSpec, fuse_run, fuse_topic, train
from .metrics import METRICS, EvalReport, evaluate
from .significance import PairedSample, paired_t_test, wilcoxon_signed_rank
from .engine import SplitPlan, add_fusion, create_experiment, materialize_split, run_experiment
from .store import Store

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "METRICS",
    "EvalReport",
    "FusionModel",
    "FusionSpec",
    "PairedSample",
    "Qrels",
    "Run",
    "SplitPlan",
    "Store",
    "add_fusion",
    "create_experiment",
    "evaluate",
    "fuse_run",
    "fuse_topic",
    "materialize_split",
    "paired_t_test",
    "parse_qrels",
    "parse_run",
    "run_experiment",
    "train",
    "wilcoxon_signed_rank",
    "write_run",
]
