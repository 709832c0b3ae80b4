from __future__ import annotations

import json
import math

import numpy as np
import pytest

from diagnostics.error_curve import ErrorCurve
from shared.errors import InputError
from shared.profile_loader import get_threshold, load_profile, merge_profiles
from shared.storage import (
    Storage,
    clean,
    dumps,
    load_run_result,
    pairs_to_complex,
    poles_from_json,
    rational_from_json,
    samples_csv,
    validate_run_result,
    write_text,
)


class TestJson:
    def test_clean_handles_numpy_and_nonfinite(self):
        doc = clean({"a": np.float64(1.5), "b": [np.int64(2), float("nan")], "c": 1 + 2j, "d": np.bool_(True)})
        assert doc == {"a": 1.5, "b": [2, None], "c": [1.0, 2.0], "d": True}

    def test_dumps_is_sorted_and_strict(self):
        text = dumps({"b": 1, "a": float("inf")})
        assert text.index('"a"') < text.index('"b"')
        assert json.loads(text) == {"a": None, "b": 1}

    def test_pairs_to_complex(self):
        np.testing.assert_array_equal(pairs_to_complex([[1, 2], [0.5, -1]]), [1 + 2j, 0.5 - 1j])
        for bad in ({"a": 1}, [[1]], [[1, "x"]], [[True, 0]]):
            with pytest.raises(InputError):
                pairs_to_complex(bad)

    def test_rational_from_json(self):
        r = rational_from_json({"support": [[1, 0], [-1, 0]], "values": [[1, 0], [0, 0]], "weights": [[1, 0], [1, 0]]})
        assert r(2.0) == pytest.approx(0.75)
        with pytest.raises(InputError):
            rational_from_json({"support": [[1, 0]], "values": [[1, 0]]})
        with pytest.raises(InputError):
            rational_from_json({"support": [[1, 0]], "values": [[1, 0], [2, 0]], "weights": [[1, 0]]})

    def test_poles_from_json(self):
        poles = poles_from_json({"poles": [[2.0, 0.0]], "poles_at_infinity": 1})
        assert poles.finite == (2.0,)
        assert poles.count_at_infinity == 1
        with pytest.raises(InputError):
            poles_from_json({"poles": [], "poles_at_infinity": -1})
        with pytest.raises(InputError):
            poles_from_json({"poles": [[1e9, 0.0]], "poles_at_infinity": 0})

    def test_validate_run_result(self):
        with pytest.raises(InputError):
            validate_run_result([])
        with pytest.raises(InputError):
            validate_run_result({"request": {}})
        with pytest.raises(InputError, match="missing"):
            validate_run_result({"request": {}, "l2": {"degree": 1}})


class TestFiles:
    def test_storage_requires_directory(self, tmp_path):
        with pytest.raises(InputError):
            Storage(tmp_path / "missing")
        store = Storage(tmp_path)
        path = store.save_json("x.json", {"k": 1})
        assert json.loads(path.read_text()) == {"k": 1}

    def test_write_text_needs_parent(self, tmp_path):
        with pytest.raises(InputError):
            write_text(tmp_path / "missing" / "out.txt", "x")
        assert write_text(tmp_path / "out.txt", "x").read_text() == "x"

    def test_load_run_result_errors(self, tmp_path):
        with pytest.raises(InputError):
            load_run_result(tmp_path / "missing.json")
        bad = tmp_path / "bad.json"
        bad.write_text("[1, 2")
        with pytest.raises(InputError, match="not valid JSON"):
            load_run_result(bad)

    def test_samples_csv(self):
        curve = ErrorCurve.from_samples(np.full(16, 0.5 - 0.25j))
        rows = samples_csv({"l2": curve}).splitlines()
        assert rows[0] == "norm,theta,re,im"
        assert rows[1] == "l2,0.0,0.5,-0.25"
        assert len(rows) == 17
        assert float(rows[-1].split(",")[1]) == pytest.approx(2 * math.pi * 15 / 16)


class TestProfiles:
    def test_load_and_merge(self, tmp_path):
        path = tmp_path / "p.yaml"
        path.write_text("iteration:\n  max_iterations: 5\n  pole_tolerance: 1.0e-9\n")
        profile = merge_profiles(load_profile(path), {"iteration": {"max_iterations": 9}})
        assert get_threshold(profile, "iteration", "max_iterations") == 9
        assert get_threshold(profile, "iteration", "pole_tolerance") == 1e-9
        assert get_threshold(profile, "missing", "key", default=3) == 3

    def test_invalid_profiles(self, tmp_path):
        path = tmp_path / "p.yaml"
        path.write_text("- a\n- b\n")
        with pytest.raises(InputError):
            load_profile(path)
        path.write_text("a: [1, 2\n")
        with pytest.raises(InputError):
            load_profile(path)
        with pytest.raises(InputError):
            load_profile(tmp_path / "missing.yaml")
