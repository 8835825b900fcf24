"""Loss-sensitive training of a listwise ranking CRF over permutations."""

from .errors import (
    CapacityError,
    ContractError,
    CrfRankError,
    DimensionError,
    LetorParseError,
)
from .letor import (
    Dataset,
    FoldSplit,
    QueryGroup,
    distinct_relevance_levels,
    load_fold,
    load_fold_dir,
    minmax_normalize,
    parse_letor,
    to_letor_lines,
    validate_grades,
)
from .rankspace import (
    PERMUTATION_CAP,
    enumerate_permutations,
    ideal_permutation,
    loss,
    loss_table,
    ndcg,
    ndcg_at_k,
    target_distribution,
    zero_loss_set,
)
from .model import (
    energy,
    energy_grad_theta,
    load_theta,
    position_weights,
    predict,
    save_theta,
    score,
)
from .objectives import (
    ObjectiveEval,
    ObjectiveSpec,
    QueryEnumeration,
    build_enumeration,
    el_eval,
    energy_derivatives,
    kl_eval,
    la_eval,
    ls_eval,
    ml_eval,
    objective_eval,
)
from .training import (
    SweepGrid,
    SweepResult,
    TrainConfig,
    sgd_train,
    subsample_group,
    sweep,
)
from .evaluation import EvalReport, FoldReport, evaluate, evaluate_folds
from .gradcheck import audit_gradients, finite_difference_grad, relative_grad_error

__version__ = "0.1.0"
