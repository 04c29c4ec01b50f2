from pathlib import Path
from typing import Any, Dict, Tuple, Union

import numpy as np

from egiinet.harness.synth_data import load_sample_arrays, read_manifest
from egiinet.interfaces.gen_completion_response import GenerateCompletionResponse


class ManifestResponseGenerator(GenerateCompletionResponse):
    """Implementation of the ``GenerateCompletionResponse`` interface over a dataset manifest.

    Records are read when the generator is built; sample files are loaded on access.
    """

    def __init__(self, manifest_path: Union[str, Path]):
        """:param manifest_path: JSON-lines manifest written by dataset generation.

        :raises FileNotFoundError: The manifest does not exist.
        """
        self.manifest_path = str(manifest_path)
        self.records = read_manifest(manifest_path)

    def __len__(self) -> int:
        """:return: Number of samples listed in the manifest."""
        return len(self.records)

    def __getitem__(self, idx: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, Dict[str, Any]]:
        """Load the sample at a specific index.

        :param idx: Index of desired sample.

        :raises IndexError: The given index does not exist.
        :raises FileNotFoundError: A file listed for the sample is missing.

        :return: (partial, view, complete, extra) for the given index.
        """
        if idx < 0 or idx >= len(self):
            raise IndexError
        record = self.records[idx]
        arrays = load_sample_arrays(record)
        extra = {"sample_id": record["sample_id"], "family": record["family"]}
        return arrays["partial"], arrays["view"], arrays["complete"], extra

    def get_config(self) -> Dict[str, Any]:
        return {"manifest_path": self.manifest_path}
