from typing import Any, Dict, Sequence

import numpy as np

from egiinet.interfaces.score_completions import ScoreCompletions
from egiinet.utils.geometry import DEFAULT_FSCORE_THRESHOLD, fscore


class FScoreScorer(ScoreCompletions):
    """An implementation of the ``ScoreCompletions`` interface reporting F-score at a distance threshold."""

    def __init__(self, threshold: float = DEFAULT_FSCORE_THRESHOLD):
        """:param threshold: Squared-distance threshold ``d``."""
        if not threshold > 0:
            raise ValueError(f"{type(self).__name__} invalid threshold ({threshold}). Must be > 0.0")

        self.threshold = threshold

    @property
    def name(self) -> str:
        return "fscore"

    def score(
        self,
        actual: Sequence[np.ndarray],
        predicted: Sequence[np.ndarray],
    ) -> Sequence[float]:
        """Return the F-score of each (actual, predicted) pair."""
        self._check_inputs(actual, predicted)
        return [fscore(pred, gt, self.threshold) for gt, pred in zip(actual, predicted)]

    def get_config(self) -> Dict[str, Any]:
        return {"threshold": self.threshold}
