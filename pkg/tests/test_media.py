import hashlib
import json
import random
from datetime import datetime
from fractions import Fraction

import pytest

from idrecon.errors import (
    AdapterError,
    AdapterUnavailable,
    CorruptExif,
    MalformedDate,
    NotJpeg,
)
from idrecon.media import (
    FixtureVisionAdapter,
    GadResult,
    GeoPoint,
    VisionAdapter,
    analyze_gad,
    extract_exif_gps,
    extract_exif_timestamp,
)

from exifgen import build_exif_jpeg, plain_jpeg

MUNICH = (((48, 1), (8, 1), (14, 1)), "N", ((11, 1), (34, 1), (32, 1)), "E")


def oracle_decimal(dms, negative):
    """Independent exact-rational reference for DMS -> decimal degrees."""
    d = Fraction(*dms[0]) + Fraction(*dms[1]) / 60 + Fraction(*dms[2]) / 3600
    return float(-d if negative else d)


class TestGps:
    @pytest.mark.parametrize("order", ["II", "MM"])
    def test_munich_example(self, order):
        point = extract_exif_gps(build_exif_jpeg(gps=MUNICH, byte_order=order))
        assert point == GeoPoint(48.1372222, 11.5755556)

    def test_southern_western_hemisphere(self):
        gps = (((33, 1), (51, 1), (35, 1)), "S", ((151, 1), (12, 1), (40, 1)), "W")
        point = extract_exif_gps(build_exif_jpeg(gps=gps))
        assert point.latitude < 0 and point.longitude < 0

    def test_no_gps_ifd(self):
        assert extract_exif_gps(build_exif_jpeg(timestamp="2021:09:26 18:00:00")) is None

    def test_no_exif_at_all(self):
        assert extract_exif_gps(plain_jpeg(b"x")) is None

    def test_not_jpeg(self):
        with pytest.raises(NotJpeg):
            extract_exif_gps(b"PNG not really")
        with pytest.raises(NotJpeg):
            extract_exif_gps(b"")

    def test_truncated_app1(self):
        blob = build_exif_jpeg(gps=MUNICH)
        with pytest.raises(CorruptExif):
            extract_exif_gps(blob[: len(blob) // 2])

    def test_zero_denominator(self):
        gps = (((48, 1), (8, 0), (14, 1)), "N", ((11, 1), (34, 1), (32, 1)), "E")
        with pytest.raises(CorruptExif):
            extract_exif_gps(build_exif_jpeg(gps=gps))

    def test_bad_hemisphere_letter(self):
        gps = (((48, 1), (8, 1), (14, 1)), "Q", ((11, 1), (34, 1), (32, 1)), "E")
        with pytest.raises(CorruptExif):
            extract_exif_gps(build_exif_jpeg(gps=gps))

    def test_out_of_range_coordinates(self):
        gps = (((991, 1), (0, 1), (0, 1)), "N", ((11, 1), (34, 1), (32, 1)), "E")
        with pytest.raises(CorruptExif):
            extract_exif_gps(build_exif_jpeg(gps=gps))

    @pytest.mark.parametrize("order", ["II", "MM"])
    def test_random_rationals_match_exact_arithmetic(self, order):
        rng = random.Random(42 if order == "II" else 43)
        for _ in range(250):
            lat_dms, lat_neg = _random_dms(rng, 90)
            lon_dms, lon_neg = _random_dms(rng, 180)
            gps = (lat_dms, "S" if lat_neg else "N", lon_dms, "W" if lon_neg else "E")
            point = extract_exif_gps(build_exif_jpeg(gps=gps, byte_order=order))
            assert abs(point.latitude - oracle_decimal(lat_dms, lat_neg)) <= 1e-7
            assert abs(point.longitude - oracle_decimal(lon_dms, lon_neg)) <= 1e-7


def _random_dms(rng, limit):
    degrees = rng.randrange(0, limit)
    minutes = (rng.randrange(0, 60 * 100), rng.choice([1, 10, 100]))
    seconds = (rng.randrange(0, 60 * 1000), rng.choice([1, 10, 1000]))
    # keep within +/- limit: degree part dominates, scale minute/second down
    dms = (
        (degrees, 1),
        (minutes[0] % (59 * minutes[1]) if minutes[1] else 0, minutes[1]),
        (seconds[0] % (59 * seconds[1]) if seconds[1] else 0, seconds[1]),
    )
    return dms, rng.random() < 0.5


class TestTimestamp:
    @pytest.mark.parametrize("order", ["II", "MM"])
    def test_read(self, order):
        blob = build_exif_jpeg(timestamp="2021:09:26 18:00:00", byte_order=order)
        assert extract_exif_timestamp(blob) == datetime(2021, 9, 26, 18, 0, 0)

    def test_missing_tag(self):
        assert extract_exif_timestamp(build_exif_jpeg(gps=MUNICH)) is None

    def test_wrong_separator(self):
        blob = build_exif_jpeg(timestamp="2021-09-26 18:00:00")
        with pytest.raises(MalformedDate):
            extract_exif_timestamp(blob)

    def test_gps_and_timestamp_together(self):
        blob = build_exif_jpeg(gps=MUNICH, timestamp="2021:09:26 18:00:00")
        assert extract_exif_gps(blob) is not None
        assert extract_exif_timestamp(blob) is not None


class TestFuzz:
    def test_truncations_never_crash(self):
        blob = build_exif_jpeg(gps=MUNICH, timestamp="2021:09:26 18:00:00")
        for cut in range(len(blob)):
            try:
                extract_exif_gps(blob[:cut])
                extract_exif_timestamp(blob[:cut])
            except (NotJpeg, CorruptExif, MalformedDate):
                pass

    def test_random_corruption_never_crashes(self):
        rng = random.Random(1337)
        blob = bytearray(build_exif_jpeg(gps=MUNICH, timestamp="2021:09:26 18:00:00"))
        for _ in range(500):
            corrupted = bytearray(blob)
            for _ in range(rng.randrange(1, 6)):
                corrupted[rng.randrange(len(corrupted))] = rng.randrange(256)
            try:
                extract_exif_gps(bytes(corrupted))
                extract_exif_timestamp(bytes(corrupted))
            except (NotJpeg, CorruptExif, MalformedDate):
                pass


class TestGeoPoint:
    def test_range_validation(self):
        with pytest.raises(ValueError):
            GeoPoint(91.0, 0.0)
        with pytest.raises(ValueError):
            GeoPoint(0.0, -181.0)


class TestGad:
    def make_adapter(self, image):
        digest = hashlib.sha256(image).hexdigest()
        return FixtureVisionAdapter(
            {digest: {"age": [60, 70], "gender": "male", "conf": {"age": 0.8, "gender": 0.9}}}
        )

    def test_fixture_lookup(self):
        image = plain_jpeg(b"olafscholz10")
        result = analyze_gad(image, self.make_adapter(image))
        assert result == GadResult((60, 70), "male", {"age": 0.8, "gender": 0.9})

    def test_unknown_image(self):
        adapter = self.make_adapter(plain_jpeg(b"a"))
        with pytest.raises(AdapterError):
            analyze_gad(plain_jpeg(b"b"), adapter)

    def test_no_capability(self):
        with pytest.raises(AdapterUnavailable):
            analyze_gad(plain_jpeg(b"x"), VisionAdapter())

    def test_fixture_file(self, tmp_path):
        image = plain_jpeg(b"file-backed")
        digest = hashlib.sha256(image).hexdigest()
        path = tmp_path / "gad.json"
        path.write_text(json.dumps({digest: {"age": [20, 30], "gender": "female"}}))
        result = analyze_gad(image, FixtureVisionAdapter(path))
        assert result.age_range == (20, 30)

    def test_missing_fixture_file(self, tmp_path):
        with pytest.raises(AdapterUnavailable):
            FixtureVisionAdapter(tmp_path / "nope.json")

    def test_result_invariants(self):
        with pytest.raises(ValueError):
            GadResult((70, 60), "male", {})
        with pytest.raises(ValueError):
            GadResult((60, 70), "male", {"age": 1.5})
