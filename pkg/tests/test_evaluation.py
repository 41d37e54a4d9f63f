import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from memcarve import (
    NoImagesError,
    Scenario,
    match_images,
    run_accuracy_suite,
)
from memcarve.evaluation import load_image_dir
from memcarve.standin import standin_image, write_standin_set
from memcarve import imgio


class TestMatchImages:
    def test_identical_images(self):
        image = standin_image(0, width=32, height=24)
        result = match_images(image, image)
        assert result.matched
        assert result.vertical_offset == 0
        assert result.pixel_match_fraction == 1.0

    def test_junk_rows_above_and_below(self, rng):
        image = standin_image(1, width=32, height=24)
        junk_top = rng.integers(0, 256, (1, 32, 4), dtype=np.uint8)
        junk_bottom = rng.integers(0, 256, (3, 32, 4), dtype=np.uint8)
        padded = np.concatenate([junk_top, image, junk_bottom])
        result = match_images(image, padded)
        assert result.matched
        assert result.vertical_offset == 1

    def test_too_many_extra_rows_above(self, rng):
        image = standin_image(2, width=32, height=24)
        junk = rng.integers(0, 256, (3, 32, 4), dtype=np.uint8)
        result = match_images(image, np.concatenate([junk, image]))
        assert not result.matched

    def test_different_widths_never_match(self):
        a = standin_image(3, width=32, height=24)
        b = standin_image(3, width=33, height=24)
        result = match_images(a, b)
        assert not result.matched
        assert result.pixel_match_fraction == 0.0

    def test_channel_tolerance(self):
        image = standin_image(4, width=16, height=16)
        nudged = image.copy()
        nudged[..., :3] = np.clip(nudged[..., :3].astype(np.int16) + 2, 0, 255)
        assert match_images(image, nudged).matched
        pushed = image.copy()
        pushed[..., :3] = np.clip(pushed[..., :3].astype(np.int16) + 3, 0, 255)
        assert not match_images(image, pushed, tolerance=0.99).matched

    @given(st.integers(0, 2 ** 32 - 1))
    @settings(max_examples=20, deadline=None)
    def test_tolerance_test_is_symmetric(self, seed):
        gen = np.random.default_rng(seed)
        a = gen.integers(0, 256, (6, 6, 4), dtype=np.uint8)
        b = gen.integers(0, 256, (6, 6, 4), dtype=np.uint8)
        assert (match_images(a, b).pixel_match_fraction
                == match_images(b, a).pixel_match_fraction)

    def test_strict_variant_for_byte_exact_checks(self):
        image = standin_image(5, width=16, height=16)
        nudged = image.copy()
        nudged[0, 0, 0] = np.uint8(int(nudged[0, 0, 0]) + 1 & 0xFF)
        strict = match_images(image, nudged, tolerance=1.0, channel_tolerance=0)
        assert not strict.matched


class TestScenarioParsing:
    def test_single(self):
        scenario = Scenario.parse("noise:40")
        assert scenario.name == "noise:40"
        assert [(t.kind, t.value) for t in scenario.transforms] == [("noise", 40.0)]

    def test_compound(self):
        scenario = Scenario.parse("scale:0.5,noise:10")
        assert [(t.kind, t.value) for t in scenario.transforms] == [
            ("scale", 0.5), ("noise", 10.0)]


@pytest.fixture(scope="module")
def small_image_dir(tmp_path_factory):
    directory = tmp_path_factory.mktemp("images")
    write_standin_set(directory, count=3, width=96, height=64)
    return directory


class TestRunAccuracySuite:
    def test_counts_and_shape(self, small_image_dir):
        report = run_accuracy_suite(small_image_dir, ["scale:1"], seed=0)
        assert len(report.results) == 1
        result = report.results[0]
        assert result.scenario == "scale:1"
        assert result.total == 3
        assert result.recovered <= result.total
        assert result.recovered == 3

    def test_deterministic_under_seed(self, small_image_dir):
        first = run_accuracy_suite(small_image_dir, ["noise:5"], seed=9)
        second = run_accuracy_suite(small_image_dir, ["noise:5"], seed=9)
        assert first.to_json() == second.to_json()

    def test_json_report_fields(self, small_image_dir):
        report = run_accuracy_suite(small_image_dir, [Scenario.parse("scale:1")], seed=0)
        doc = json.loads(report.to_json_text())
        scenario = doc["scenarios"][0]
        assert set(scenario) == {"scenario", "total", "recovered", "extra",
                                 "rate", "images"}
        assert scenario["rate"] == 1.0

    def test_table_has_one_row_per_scenario(self, small_image_dir):
        report = run_accuracy_suite(small_image_dir, ["scale:1", "noise:1"], seed=0)
        lines = report.format_table().splitlines()
        assert len(lines) == 3  # header + 2 scenarios

    def test_no_images_error(self, tmp_path):
        with pytest.raises(NoImagesError):
            run_accuracy_suite(tmp_path, ["scale:1"])

    def test_undecodable_files_skipped(self, tmp_path):
        imgio.encode(standin_image(0, width=96, height=64), tmp_path / "ok.ppm")
        (tmp_path / "junk.bin").write_bytes(b"not an image")
        images, skipped = load_image_dir(tmp_path)
        assert [name for name, _ in images] == ["ok.ppm"]
        assert skipped == ["junk.bin"]
        report = run_accuracy_suite(tmp_path, ["scale:1"], seed=0)
        assert report.skipped == ("junk.bin",)
        assert report.results[0].total == 1
