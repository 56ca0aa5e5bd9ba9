import logging
from typing import Callable

from dataset.schemas import AlignedDataset
from feature_selection.embedded import embedded_lasso, embedded_tree_importance
from feature_selection.filters import filter_correlation, filter_mutual_information, filter_variance
from feature_selection.schemas import ALL_METHODS, SIMILARITY_METHODS, EXTRA_METHODS, SelectionResult, SelectorSpec
from feature_selection.similarity import similarity_select
from feature_selection.wrappers import (
    wrapper_backward,
    wrapper_forward,
    wrapper_rfe,
    wrapper_simulated_annealing,
    wrapper_stepwise,
)
from utils.errors import SelectionError

logger = logging.getLogger(__name__)

SelectorFn = Callable[[AlignedDataset, SelectorSpec], SelectionResult]

SELECTORS: dict[str, SelectorFn] = {
    "var": lambda ds, spec: filter_variance(ds, spec.k),
    "cor": lambda ds, spec: filter_correlation(ds, spec.k),
    "mutual_information": lambda ds, spec: filter_mutual_information(ds, spec.k),
    "forward": wrapper_forward,
    "backward": wrapper_backward,
    "stepwise": wrapper_stepwise,
    "rfe": wrapper_rfe,
    "simulated": wrapper_simulated_annealing,
    "lasso": embedded_lasso,
    "tree_base": embedded_tree_importance,
    **{method: similarity_select for method in SIMILARITY_METHODS + EXTRA_METHODS},
}


def select(ds: AlignedDataset, spec: SelectorSpec) -> SelectionResult:
    """Runs the selector named by spec.method_id and checks its contract."""
    if spec.method_id not in SELECTORS:
        raise SelectionError(f"Unknown method {spec.method_id!r}; expected one of {list(ALL_METHODS)}")
    n_features = len(ds.column_ids)
    if spec.k > n_features:
        raise SelectionError(f"k={spec.k} exceeds the {n_features} available features")

    logger.debug(f"Selecting {spec.k} of {n_features} features with {spec.method_id} on {ds.n_rows} rows")
    result = SELECTORS[spec.method_id](ds, spec)

    if len(result.selected) != spec.k or not set(result.selected) <= set(ds.column_ids):
        raise SelectionError(f"{spec.method_id} returned an invalid selection {result.selected}")
    return result
