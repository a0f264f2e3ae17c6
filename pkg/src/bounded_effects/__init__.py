"""Bounds on treatment effects for units observed under both treatment arms.

Two-period panels where outcomes go missing after treatment leave the
effect on the full treated population unidentified. This package bounds
the effect on the Always-Observed stratum with trimming
(difference-in-differences) and quantile (changes-in-changes) methods,
with bootstrap Imbens-Manski intervals around the bounds.

The ``simulate`` module generates panels with known strata for coverage
checks.
"""

__version__ = "0.1.0"

from .bounds import (  # noqa: E402
    BoundsResult,
    cic_att_bounds,
    cic_qtt_bounds,
    did_att_bounds,
    naive_cic,
    naive_did,
    selection_did,
)
from .dataset import Direction, PanelDataset, load_csv, validate, write_csv  # noqa: E402
from .inference import Estimator, bootstrap, bootstrap_sigmas, confidence_interval, imbens_manski_z  # noqa: E402
from .strata import (  # noqa: E402
    StrataProportions,
    Stratum,
    classify_stratum,
    estimate_proportions,
    impute_counterfactual_selection,
    proportions_multi,
    proportions_single,
)

__all__ = [
    "BoundsResult",
    "Direction",
    "Estimator",
    "PanelDataset",
    "StrataProportions",
    "Stratum",
    "bootstrap",
    "bootstrap_sigmas",
    "cic_att_bounds",
    "cic_qtt_bounds",
    "classify_stratum",
    "confidence_interval",
    "did_att_bounds",
    "estimate_proportions",
    "imbens_manski_z",
    "impute_counterfactual_selection",
    "load_csv",
    "naive_cic",
    "naive_did",
    "proportions_multi",
    "proportions_single",
    "selection_did",
    "validate",
    "write_csv",
]
