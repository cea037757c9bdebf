"""Position evaluation and score conversion."""

from .classical import (
    PIECE_VALUES,
    TerminalPositionError,
    evaluate_classical,
    evaluate_white,
    load_tables,
    static_eval,
)
from .nnue import (
    BadChecksumError,
    BadMagicError,
    BadSizeError,
    BadVersionError,
    NnueAccumulator,
    NnueEvaluator,
    NnueFormatError,
    NnueNetwork,
    active_features,
    feature_changes,
    feature_index,
    load_nnue,
    nnue_apply,
    nnue_evaluate,
    nnue_refresh,
    random_network,
    save_nnue,
    zero_network,
)
from .score import (
    Score,
    cp_to_winprob,
    lc0_cp_to_winprob,
    lc0_winprob_to_cp,
    value_to_winprob,
    winprob_to_cp,
)
