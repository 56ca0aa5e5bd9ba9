"""
Wrapper selectors: subset searches scored by cross-validated OLS R-squared.

Every search runs on a prescreened pool (top ``wrapper_prescreen`` features
by |correlation|). When candidates tie on the objective the smaller feature
id is preferred: it is added first and removed last.
"""
import logging
import math

import numpy as np

from dataset.alignment import normalize_columns
from dataset.schemas import AlignedDataset
from feature_selection.ranking import prescreen_pool, result_from_ranking
from feature_selection.schemas import SelectionResult, SelectorSpec
from regression.cross_validation import cv_mean_r2, make_rng
from regression.ols import fit_ols_stabilized, predict, r_squared

logger = logging.getLogger(__name__)

STEPWISE_MIN_GAIN = 1e-6


class _PoolObjective:
    """CV mean R-squared of column subsets of the prescreened pool, memoized."""

    def __init__(self, ds: AlignedDataset, pool: list[str], spec: SelectorSpec):
        self.pool = pool
        self.X = ds.features.columns(pool)
        self.y = ds.y
        self.folds = min(spec.cv_folds, ds.n_rows)
        self.seed = spec.seed
        self.evaluations = 0
        self._cache: dict[frozenset[str], float] = {}
        self._col = {fid: i for i, fid in enumerate(pool)}

    def cv(self, subset) -> float:
        key = frozenset(subset)
        if key not in self._cache:
            cols = sorted(self._col[f] for f in key)
            self._cache[key] = cv_mean_r2(self.X[:, cols], self.y, self.folds, self.seed)
            self.evaluations += 1
        return self._cache[key]

    def train_r2(self, subset) -> float:
        cols = [self._col[f] for f in subset]
        X = self.X[:, cols]
        return r_squared(self.y, predict(fit_ols_stabilized(X, self.y), X))


def _best_addition(objective: _PoolObjective, subset: list[str], candidates) -> tuple[str, float]:
    best_id, best_score = None, -math.inf
    for fid in sorted(candidates):
        score = objective.cv(subset + [fid])
        if best_id is None or score > best_score:
            best_id, best_score = fid, score
    return best_id, best_score


def _best_removal(objective: _PoolObjective, subset: list[str], protected: str | None = None) -> tuple[str | None, float]:
    best_id, best_score = None, -math.inf
    for fid in sorted(subset, reverse=True):
        if fid == protected:
            continue
        score = objective.cv([f for f in subset if f != fid])
        if best_id is None or score > best_score:
            best_id, best_score = fid, score
    return best_id, best_score


def _rest_of_pool(pool: list[str], ranked: list[str]) -> list[str]:
    taken = set(ranked)
    return [f for f in pool if f not in taken]


def wrapper_forward(ds: AlignedDataset, spec: SelectorSpec) -> SelectionResult:
    pool = prescreen_pool(ds, spec.k, spec.wrapper_prescreen)
    objective = _PoolObjective(ds, pool, spec)
    selected: list[str] = []
    cv_trace, train_trace = [], []
    while len(selected) < spec.k:
        fid, score = _best_addition(objective, selected, _rest_of_pool(pool, selected))
        selected.append(fid)
        cv_trace.append(score)
        train_trace.append(objective.train_r2(selected))
        logger.debug(f"forward: added {fid} (cv r2 {score:.6f})")
    return result_from_ranking(
        "forward", selected + _rest_of_pool(pool, selected), ds.column_ids, spec.k,
        {"pool_size": len(pool), "cv_trace": cv_trace, "train_r2_trace": train_trace,
         "evaluations": objective.evaluations},
    )


def wrapper_backward(ds: AlignedDataset, spec: SelectorSpec) -> SelectionResult:
    pool = prescreen_pool(ds, spec.k, spec.wrapper_prescreen)
    objective = _PoolObjective(ds, pool, spec)
    current = list(pool)
    eliminated: list[str] = []
    cv_trace = []
    while len(current) > spec.k:
        fid, score = _best_removal(objective, current)
        current.remove(fid)
        eliminated.append(fid)
        cv_trace.append(score)
        logger.debug(f"backward: removed {fid} (cv r2 {score:.6f})")
    return result_from_ranking(
        "backward", current + eliminated[::-1], ds.column_ids, spec.k,
        {"pool_size": len(pool), "elimination_order": eliminated, "cv_trace": cv_trace,
         "evaluations": objective.evaluations},
    )


def wrapper_stepwise(ds: AlignedDataset, spec: SelectorSpec) -> SelectionResult:
    """
    Alternates one forward addition with a backward sweep that drops any
    feature whose removal raises CV R-squared by more than 1e-6. The feature
    just added is exempt from the sweep that follows it.
    """
    pool = prescreen_pool(ds, spec.k, spec.wrapper_prescreen)
    objective = _PoolObjective(ds, pool, spec)
    selected: list[str] = []
    current_score = -math.inf
    cap = 10 * spec.k
    iterations = 0
    cap_hit = False
    drops: list[str] = []

    while True:
        if iterations >= cap:
            cap_hit = True
            break
        iterations += 1
        added = None
        if len(selected) < spec.k:
            added, current_score = _best_addition(objective, selected, _rest_of_pool(pool, selected))
            selected.append(added)

        dropped_any = False
        while len(selected) > 1:
            fid, score = _best_removal(objective, selected, protected=added)
            if fid is None or score <= current_score + STEPWISE_MIN_GAIN:
                break
            selected.remove(fid)
            drops.append(fid)
            current_score = score
            dropped_any = True
            logger.debug(f"stepwise: dropped {fid} (cv r2 {score:.6f})")

        if len(selected) == spec.k and not dropped_any:
            break

    if cap_hit:
        logger.warning(f"stepwise: iteration cap {cap} reached with {len(selected)}/{spec.k} features")
        while len(selected) < spec.k:
            fid, current_score = _best_addition(objective, selected, _rest_of_pool(pool, selected))
            selected.append(fid)

    return result_from_ranking(
        "stepwise", selected + _rest_of_pool(pool, selected), ds.column_ids, spec.k,
        {"pool_size": len(pool), "iterations": iterations, "cap_hit": cap_hit, "drops": drops,
         "final_cv_r2": current_score, "evaluations": objective.evaluations},
    )


def wrapper_rfe(ds: AlignedDataset, spec: SelectorSpec) -> SelectionResult:
    """Refit on standardized features and drop the smallest |coefficient| until k remain."""
    pool = prescreen_pool(ds, spec.k, spec.wrapper_prescreen)
    current = list(pool)
    eliminated: list[str] = []
    while len(current) > spec.k:
        X = normalize_columns(ds.features.columns(current))
        coefs = np.abs(np.asarray(fit_ols_stabilized(X, ds.y).coefficients))
        # smallest |coef| goes; on ties the larger id goes
        weakest = max(np.flatnonzero(coefs == coefs.min()), key=lambda i: current[i])
        eliminated.append(current.pop(int(weakest)))

    X = normalize_columns(ds.features.columns(current))
    final = np.abs(np.asarray(fit_ols_stabilized(X, ds.y).coefficients))
    survivors = [fid for _, fid in sorted(zip(-final, current))]
    return result_from_ranking(
        "rfe", survivors + eliminated[::-1], ds.column_ids, spec.k,
        {"pool_size": len(pool), "elimination_order": eliminated},
    )


def wrapper_simulated_annealing(ds: AlignedDataset, spec: SelectorSpec) -> SelectionResult:
    """
    Swap-neighbourhood annealing over k-subsets of the pool.

    PRNG stream, in order: ``choice(P, k, replace=False)`` for the initial
    subset, then per iteration ``integers(k)`` (position leaving),
    ``integers(P - k)`` (index into the sorted unselected pool) and
    ``random()`` (acceptance draw, always consumed).
    """
    params = spec.sa_params
    pool = prescreen_pool(ds, spec.k, spec.wrapper_prescreen)
    objective = _PoolObjective(ds, pool, spec)
    rng = make_rng(spec.seed)

    if len(pool) == spec.k:
        return result_from_ranking("simulated", list(pool), ds.column_ids, spec.k,
                                   {"pool_size": len(pool), "trace": [], "best_cv_r2": objective.cv(pool)})

    start = rng.choice(len(pool), size=spec.k, replace=False)
    current = [pool[i] for i in sorted(start.tolist())]
    current_score = objective.cv(current)
    best, best_score = list(current), current_score
    temperature = params.t0
    trace = []

    for it in range(params.iters):
        unselected = sorted(set(pool) - set(current))
        out_pos = int(rng.integers(spec.k))
        in_idx = int(rng.integers(len(unselected)))
        u = float(rng.random())
        neighbour = list(current)
        leaving, entering = neighbour[out_pos], unselected[in_idx]
        neighbour[out_pos] = entering
        score = objective.cv(neighbour)
        delta = score - current_score
        if delta > 0:
            accepted = True
        elif temperature > 0 and np.isfinite(delta):
            accepted = u < math.exp(delta / temperature)
        else:
            accepted = False
        trace.append({"iteration": it, "leaving": leaving, "entering": entering,
                      "delta": delta, "temperature": temperature, "draw": u, "accepted": accepted})
        if accepted:
            current, current_score = neighbour, score
            if current_score > best_score:
                best, best_score = list(current), current_score
        temperature *= params.alpha

    by_corr = {fid: i for i, fid in enumerate(pool)}
    ranked = sorted(best, key=by_corr.__getitem__)
    return result_from_ranking(
        "simulated", ranked + _rest_of_pool(pool, ranked), ds.column_ids, spec.k,
        {"pool_size": len(pool), "initial": [pool[i] for i in sorted(start.tolist())],
         "best_cv_r2": best_score, "trace": trace, "trace_length": len(trace)},
    )
