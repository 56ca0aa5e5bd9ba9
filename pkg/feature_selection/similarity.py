from dataset.schemas import AlignedDataset
from feature_selection.ranking import result_from_scores
from feature_selection.schemas import SelectionResult, SelectorSpec
from similarity_engine.engine import find_most_similar_features


def similarity_select(ds: AlignedDataset, spec: SelectorSpec) -> SelectionResult:
    """
    Keeps the k features nearest to the contemporaneous target series under
    the metric named by ``spec.method_id``; scores are negated distances.
    """
    ranked = find_most_similar_features(
        ds.target_series, ds.features.values, ds.column_ids, spec.method_id,
        k=len(ds.column_ids), params=spec.metric_params,
    )
    scores = {fid: -d for fid, d in ranked}
    return result_from_scores(spec.method_id, scores, spec.k, {"reference": ds.target_id})
