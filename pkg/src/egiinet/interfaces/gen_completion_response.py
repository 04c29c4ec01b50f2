import abc
from contextlib import nullcontext
from typing import Any, Callable, Dict, List, Sequence, Tuple

import numpy as np
from smqtk_core import Plugfigurable
from tqdm import tqdm

from egiinet.interfaces.score_completions import ScoreCompletions

# Maps a batch of partial clouds and their views to completed clouds.
Completer = Callable[[Sequence[np.ndarray], Sequence[np.ndarray]], Sequence[np.ndarray]]


class GenerateCompletionResponse(Plugfigurable):
    """This interface describes generation of per-sample scores for a black-box point cloud completer.

    Samples are (partial cloud, view image, complete cloud) triples; the completer sees only
    the first two and its outputs are scored against the third by every given scorer.
    """

    @abc.abstractmethod
    def __len__(self) -> int:
        """:return: Number of samples this generator holds."""

    @abc.abstractmethod
    def __getitem__(self, idx: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, Dict[str, Any]]:
        """Get the ``idx``th (partial, view, complete, extra) sample.

        ``extra`` carries identifying metadata (at least ``sample_id`` and ``family``).
        """

    def generate(
        self,
        completer: Completer,
        scorers: Sequence[ScoreCompletions],
        batch_size: int,
        verbose: bool = False,
    ) -> List[Dict[str, Any]]:
        """Complete and score every sample.

        :param completer: Black-box completer called on batches of (partials, views).
        :param scorers: Scorers to apply to every completion.
        :param batch_size: The number of samples to complete and score upon at once.
        :param verbose: Increases the verbosity of progress updates.

        :return: One row per sample: its ``extra`` metadata plus one entry per scorer name.
        """
        if batch_size < 1:
            raise ValueError(f"Invalid batch_size ({batch_size}). Must be >= 1.")
        if not scorers:
            raise ValueError("At least one scorer must be provided.")

        rows: List[Dict[str, Any]] = list()
        with tqdm(total=len(self)) if verbose else nullcontext() as progress_bar:  # type: ignore
            for i in range(0, len(self), batch_size):
                batch_partial = list()
                batch_view = list()
                batch_complete = list()
                batch_extra = list()
                for j in range(i, min(i + batch_size, len(self))):
                    partial, view, complete, extra = self[j]
                    batch_partial.append(partial)
                    batch_view.append(view)
                    batch_complete.append(complete)
                    batch_extra.append(dict(extra))

                predicted = list(completer(batch_partial, batch_view))
                if len(predicted) != len(batch_complete):
                    raise ValueError(
                        f"Completer returned {len(predicted)} clouds for a batch of {len(batch_complete)}"
                    )

                for scorer in scorers:
                    for extra, score in zip(batch_extra, scorer(actual=batch_complete, predicted=predicted)):
                        extra[scorer.name] = float(score)
                rows.extend(batch_extra)
                if progress_bar:
                    progress_bar.update(len(batch_extra))

        return rows

    def __call__(
        self,
        completer: Completer,
        scorers: Sequence[ScoreCompletions],
        batch_size: int,
        verbose: bool = False,
    ) -> List[Dict[str, Any]]:
        """Alias for :meth: ``.GenerateCompletionResponse.generate``."""
        return self.generate(completer=completer, scorers=scorers, batch_size=batch_size, verbose=verbose)
