"""Active multiclass annotation with binary questions over a class hierarchy.

The learner picks (example, composite-class) yes/no questions, keeps the
resulting partial labels, trains a softmax classifier on them by maximizing
the marginal probability of each potential set, and uses the classifier to
pick the next question. Ships a simulation engine (oracle answers), a data
generator, a CLI, and an HTTP service for live human annotation.
"""

__version__ = "0.1.0"

from .acquisition import (
    Question,
    QuestionScore,
    binary_split_question,
    conditional_distributions,
    edc,
    eig,
    erc,
    example_scores_me_lc,
)
from .annotator import AnnotatorPort, OracleAnnotator, oracle_answer
from .datagen import (
    Dataset,
    assign_partial_labels,
    gen_hierarchical_gaussians,
    load_csv,
    make_adversarial,
)
from .engine import (
    MODES,
    AuditEntry,
    Experiment,
    ExperimentConfig,
    RoundMetrics,
    run,
    warm_start,
)
from .hierarchy import ClassHierarchy, HierarchyError, ancestors_of, load_hierarchy
from .labels import (
    InconsistentAnswerError,
    PartialLabel,
    UninformativeQuestionError,
    is_informative,
    update,
)
from .model import (
    Classifier,
    TrainConfig,
    entropy,
    init_classifier,
    load_classifier,
    partial_loss,
    partial_prob,
    predict,
    predict_batch,
    save_classifier,
    train,
)
