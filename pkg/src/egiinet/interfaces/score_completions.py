import abc
from typing import Any, Dict, Sequence

import numpy as np
from smqtk_core import Plugfigurable


class ScoreCompletions(Plugfigurable):
    """Interface abstracting the behavior of scoring completed point clouds against their ground truth.

    Implementations should verify the validity of the input data and impart no side
    effects upon either sequence of clouds.
    """

    @abc.abstractmethod
    def score(
        self,
        actual: Sequence[np.ndarray],
        predicted: Sequence[np.ndarray],
    ) -> Sequence[float]:
        """Generate a sequence of scores corresponding to a specific metric.

        :param actual:
            Ground truth clouds, each of shape (N_i, 3).
        :param predicted:
            Completed clouds, each of shape (M_i, 3).

        :return:
            Metric score values as a float-type sequence with the length matching
            the number of samples in the ground truth input.
        """

    def __call__(
        self,
        actual: Sequence[np.ndarray],
        predicted: Sequence[np.ndarray],
    ) -> Sequence[float]:
        """Alias for :meth:`.ScoreCompletions.score`."""
        return self.score(actual, predicted)

    @property
    @abc.abstractmethod
    def name(self) -> str:
        """Column name this scorer reports under."""

    @staticmethod
    def _check_inputs(actual: Sequence[np.ndarray], predicted: Sequence[np.ndarray]) -> None:
        if len(actual) != len(predicted):
            raise ValueError("Size mismatch between actual and predicted data")
        if len(actual) < 1:
            raise ValueError("Actual clouds must be provided and can't be empty.")

    def get_config(self) -> Dict[str, Any]:
        return {}
