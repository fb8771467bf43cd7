"""Event argument extraction as textual entailment.

Role templates verbalize (trigger, candidate) pairs into hypotheses, a
pluggable backend scores them against the trigger sentence, and a
constraint-filtered argmax with a threshold yields the role (or the
negative class). The same templates recast gold corpora into
premise/hypothesis training files for external trainers, and the
evaluation module scores predictions with micro F1, coref-credited F1,
and AUC across training fractions.
"""

from .constraints import ConstraintTable, allow_all_table, load_constraints, save_constraints, shipped_constraints
from .corpus import (
    NEGATIVE,
    Candidate,
    Document,
    EntityMention,
    EventMention,
    SplitSpec,
    generate_candidates,
    load_corpus,
    make_splits,
    save_corpus,
    split_stats,
    unreachable_arguments,
)
from .entailment import (
    BackendConfig,
    ConstantBackend,
    EntailmentJudgment,
    LookupBackend,
    RemoteBackend,
    Scorer,
    build_scorer,
    make_entailment_server,
    serve_entailment,
)
from .errors import RolecastError
from .evaluation import CurvePoint, EvalResult, auc, recall_diff, report, score_coref_f1, score_f1
from .inference import InferenceConfig, RolePrediction, predict_document, predict_role, rethreshold
from .recast import (
    MultiSourceManifest,
    NliExample,
    SamplingConfig,
    build_manifest,
    recast_candidate,
    recast_corpus,
)
from .templates import (
    EventContext,
    Template,
    TemplateLibrary,
    load_library,
    parse_template,
    save_library,
    shipped_library,
    verbalize,
    verbalize_role_set,
)

__version__ = "0.1.0"
