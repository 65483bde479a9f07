"""Python bindings of the srea C++ core."""

from ._core import (
    ConfigError,
    __version__,
    alpha_at,
    cluster_pseudo_label,
    config_hash,
    confusion_matrix,
    correct_label,
    corrupt,
    ema_weights,
    friedman_test,
    generate_cbf,
    generate_chp_like,
    macro_f1,
    mann_whitney_u,
    nemenyi_cd,
    train,
    transition_matrix,
    w_at,
    windowize_chp,
)

__all__ = [
    "ConfigError",
    "__version__",
    "alpha_at",
    "cluster_pseudo_label",
    "config_hash",
    "confusion_matrix",
    "correct_label",
    "corrupt",
    "ema_weights",
    "friedman_test",
    "generate_cbf",
    "generate_chp_like",
    "macro_f1",
    "mann_whitney_u",
    "nemenyi_cd",
    "train",
    "transition_matrix",
    "w_at",
    "windowize_chp",
]
