"""Python bindings for the psusp C++ core."""

from ._psusp import (
    AnnulusMap,
    CantorSystem,
    Error,
    entropy_bracket,
    entropy_exact,
    hak_verify,
    horseshoe,
    kfold,
    pattern_violation,
    render_chains,
    rigidity_scan,
    rotation_estimate,
    rotation_family,
    winding_rate,
)

__all__ = [
    "AnnulusMap",
    "CantorSystem",
    "Error",
    "entropy_bracket",
    "entropy_exact",
    "hak_verify",
    "horseshoe",
    "kfold",
    "pattern_violation",
    "render_chains",
    "rigidity_scan",
    "rotation_estimate",
    "rotation_family",
    "winding_rate",
]
