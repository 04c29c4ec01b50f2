import json
from contextlib import nullcontext as does_not_raise
from pathlib import Path
from typing import ContextManager, Tuple

import numpy as np
import pytest
from smqtk_core.configuration import configuration_test_helper, from_config_dict, to_config_dict

from egiinet.impls.occlude_point_cloud.half_space_occluder import HalfSpaceOccluder
from egiinet.impls.occluder_factory.linspace_step import LinSpaceOccluderFactory
from egiinet.interfaces.occluder_factory import OccluderFactory

from .test_factory_utils import DummyOccluder

DATA_DIR = Path(__file__).parents[2] / "data"


class TestLinSpaceOccluderFactory:
    @pytest.mark.parametrize(
        ("start", "stop", "step", "expected"),
        [
            (0.0, 1.0, 4, (0.0, 0.25, 0.5, 0.75)),
            (1.0, 2.0, 1, (1.0,)),
            (2.0, 2.0, 3, ()),
        ],
    )
    def test_iteration(self, start: float, stop: float, step: int, expected: Tuple[float, ...]) -> None:
        factory = LinSpaceOccluderFactory(occluder=DummyOccluder, theta_key="azimuth", start=start, stop=stop, step=step)
        assert len(factory) == len(expected)
        assert [o.azimuth for o in factory] == pytest.approx(list(expected))

    @pytest.mark.parametrize(
        ("idx", "expectation"),
        [(0, does_not_raise()), (3, does_not_raise()), (4, pytest.raises(IndexError))],
    )
    def test_indexing(self, idx: int, expectation: ContextManager) -> None:
        factory = LinSpaceOccluderFactory(occluder=DummyOccluder, theta_key="elevation", start=0.0, stop=1.0, step=4)
        with expectation:
            assert factory[idx].elevation == pytest.approx(idx / 4)

    def test_turntable_viewpoints(self) -> None:
        """Evenly spaced azimuths give distinct, non-repeating partial scans of a cloud."""
        rng = np.random.default_rng(0)
        points = rng.normal(size=(400, 3))
        factory = LinSpaceOccluderFactory(
            occluder=HalfSpaceOccluder, theta_key="azimuth", start=0.0, stop=2 * np.pi, step=4
        )
        masks = [o.visible_mask(points) for o in factory]
        for a in range(len(masks)):
            for b in range(a + 1, len(masks)):
                assert not np.array_equal(masks[a], masks[b])

    def test_negative_count(self) -> None:
        with pytest.raises(ValueError, match=r"invalid step \(-1\)"):
            LinSpaceOccluderFactory(occluder=DummyOccluder, theta_key="azimuth", start=0.0, stop=1.0, step=-1)

    def test_fixed_elevation(self) -> None:
        factory = LinSpaceOccluderFactory(
            occluder=DummyOccluder, theta_key="azimuth", start=0.0, stop=1.0, step=2, fixed={"elevation": -0.25}
        )
        assert [(o.azimuth, o.elevation) for o in factory] == [(0.0, -0.25), (0.5, -0.25)]

    def test_configuration(self) -> None:
        inst = LinSpaceOccluderFactory(occluder=HalfSpaceOccluder, theta_key="azimuth", start=0.0, stop=3.0, step=3)
        for i in configuration_test_helper(inst):
            assert i.occluder == HalfSpaceOccluder
            assert (i.start, i.stop, i.step) == (0.0, 3.0, 3)
            assert i.thetas == pytest.approx([0.0, 1.0, 2.0])

    def test_hydration(self, tmp_path: Path) -> None:
        original = LinSpaceOccluderFactory(occluder=HalfSpaceOccluder, theta_key="azimuth", start=0.0, stop=1.0, step=2)
        config_file_path = tmp_path / "config.json"
        with open(str(config_file_path), "w") as f:
            json.dump(to_config_dict(original), f)
        with open(str(config_file_path)) as config_file:
            hydrated = from_config_dict(json.load(config_file), OccluderFactory.get_impls())
        assert hydrated.get_config() == original.get_config()

    @pytest.mark.parametrize(
        ("config_file_name", "expectation"),
        [
            ("egiinet_linspace_occluder_config.json", does_not_raise()),
            (
                "egiinet_bad_linspace_config.json",
                pytest.raises(ValueError, match=r"not an occluder is not a valid occluder."),
            ),
        ],
    )
    def test_hydration_bounds(self, config_file_name: str, expectation: ContextManager) -> None:
        with expectation:
            with open(str(DATA_DIR / config_file_name)) as config_file:
                factory = from_config_dict(json.load(config_file), OccluderFactory.get_impls())
            assert len(factory) == 4
