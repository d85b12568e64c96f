"""Evidence-based requirements-engineering risk assessment.

Learns a cause -> problem -> effect risk model from cross-company survey
records, answers posterior queries conditioned on project context and
observed phenomena, scores problems with a criticality index, and emits
prioritized reports and highlighted cause-effect graphs.
"""

from . import errors
from .assessment import RiskItem, RiskReport, assess, criticality, prioritize
from .cegraph import CauseEffectGraph, build_graph, downstream, export_graph, upstream
from .dataset import (
    CauseCategory,
    CompanySizeBand,
    ContextFilter,
    ContextProfile,
    Dataset,
    Distribution,
    Format,
    FrequencyTable,
    Kind,
    Phenomenon,
    ProblemReport,
    ProcessParadigm,
    SurveyRecord,
    load_dataset,
    select_subset,
    serialize_dataset,
    summarize,
)
from .inference import (
    BayesNet,
    BayesNode,
    Evidence,
    LearnConfig,
    enumerate_joint,
    infer_all,
    learn_network,
    posterior,
    validate_dag,
)

__version__ = "0.1.0"

__all__ = [
    "errors",
    "CauseCategory", "CompanySizeBand", "ContextFilter", "ContextProfile",
    "Dataset", "Distribution", "Format", "FrequencyTable", "Kind",
    "Phenomenon", "ProblemReport", "ProcessParadigm", "SurveyRecord",
    "load_dataset", "select_subset", "serialize_dataset", "summarize",
    "CauseEffectGraph", "build_graph", "downstream", "export_graph", "upstream",
    "BayesNet", "BayesNode", "Evidence", "LearnConfig",
    "enumerate_joint", "infer_all", "learn_network", "posterior", "validate_dag",
    "RiskItem", "RiskReport", "assess", "criticality", "prioritize",
]
