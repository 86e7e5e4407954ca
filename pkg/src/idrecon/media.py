"""Image metadata and attribute extraction.

The EXIF parser is a self-contained JPEG/APP1/TIFF walker: it never reads
past the declared segment length, works for both byte orders, and computes
GPS coordinates in exact rational arithmetic before rounding. Age/gender
estimation stays behind an adapter boundary; the shipped adapter replays a
recorded fixture keyed by image content hash.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass
from datetime import datetime
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

from .errors import AdapterError, AdapterUnavailable, CorruptExif, MalformedDate, NotJpeg

_SOI = b"\xff\xd8"
_EXIF_HEADER = b"Exif\x00\x00"

# TIFF value types we touch
_TYPE_ASCII = 2
_TYPE_SHORT = 3
_TYPE_LONG = 4
_TYPE_RATIONAL = 5
_TYPE_SIZES = {1: 1, 2: 1, 3: 2, 4: 4, 5: 8, 6: 1, 7: 1, 8: 2, 9: 4, 10: 8, 11: 4, 12: 8}

_TAG_EXIF_IFD = 0x8769
_TAG_GPS_IFD = 0x8825
_TAG_DATETIME_ORIGINAL = 0x9003
_GPS_LAT_REF, _GPS_LAT, _GPS_LON_REF, _GPS_LON = 1, 2, 3, 4


@dataclass(frozen=True)
class GeoPoint:
    latitude: float
    longitude: float

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude out of range: {self.latitude}")
        if not -180.0 <= self.longitude <= 180.0:
            raise ValueError(f"longitude out of range: {self.longitude}")


@dataclass(frozen=True)
class GadResult:
    """Bucketed age range plus gender label, with per-attribute confidence."""

    age_range: tuple[int, int]
    gender_label: str
    confidence: dict

    def __post_init__(self):
        low, high = self.age_range
        if low > high:
            raise ValueError(f"age range inverted: {self.age_range}")
        for key, conf in self.confidence.items():
            if not 0.0 <= conf <= 1.0:
                raise ValueError(f"confidence for {key} out of [0,1]: {conf}")


def dms_to_decimal(
    degrees: Fraction, minutes: Fraction, seconds: Fraction, negative: bool
) -> float:
    """sign·(deg + min/60 + sec/3600), exact until the final 1e-7 rounding."""
    value = degrees + minutes / 60 + seconds / 3600
    if negative:
        value = -value
    return float(round(value, 7))


def extract_exif_gps(data: bytes) -> Optional[GeoPoint]:
    """GPS coordinates from a JPEG stream, or None when no GPS IFD exists."""
    tiff = _find_tiff(data)
    if tiff is None:
        return None
    reader = _TiffReader(tiff)
    gps_offset = reader.ifd_pointer(_TAG_GPS_IFD)
    if gps_offset is None:
        return None
    entries = reader.read_ifd(gps_offset)
    lat_ref = entries.get(_GPS_LAT_REF)
    lat = entries.get(_GPS_LAT)
    lon_ref = entries.get(_GPS_LON_REF)
    lon = entries.get(_GPS_LON)
    if lat is None or lon is None or lat_ref is None or lon_ref is None:
        return None
    lat_dms = reader.rationals(lat, expected=3)
    lon_dms = reader.rationals(lon, expected=3)
    lat_sign = reader.ascii(lat_ref).strip().upper()
    lon_sign = reader.ascii(lon_ref).strip().upper()
    if lat_sign not in ("N", "S") or lon_sign not in ("E", "W"):
        raise CorruptExif(f"bad GPS reference letters: {lat_sign!r}/{lon_sign!r}")
    try:
        return GeoPoint(
            dms_to_decimal(*lat_dms, negative=lat_sign == "S"),
            dms_to_decimal(*lon_dms, negative=lon_sign == "W"),
        )
    except ValueError as exc:
        raise CorruptExif(str(exc)) from exc


def extract_exif_timestamp(data: bytes) -> Optional[datetime]:
    """DateTimeOriginal as a naive datetime (EXIF carries no timezone)."""
    tiff = _find_tiff(data)
    if tiff is None:
        return None
    reader = _TiffReader(tiff)
    exif_offset = reader.ifd_pointer(_TAG_EXIF_IFD)
    if exif_offset is None:
        return None
    entries = reader.read_ifd(exif_offset)
    entry = entries.get(_TAG_DATETIME_ORIGINAL)
    if entry is None:
        return None
    raw = reader.ascii(entry).rstrip("\x00").strip()
    try:
        return datetime.strptime(raw, "%Y:%m:%d %H:%M:%S")
    except ValueError:
        raise MalformedDate(f"not YYYY:MM:DD HH:MM:SS: {raw!r}") from None


def _find_tiff(data: bytes) -> Optional[bytes]:
    """Locate the APP1/Exif payload and return its TIFF body, or None when
    the JPEG simply has no Exif segment."""
    if len(data) < 2 or data[:2] != _SOI:
        raise NotJpeg("missing SOI marker")
    pos = 2
    while pos + 2 <= len(data):
        if data[pos] != 0xFF:
            raise CorruptExif(f"expected marker at {pos}")
        marker = data[pos + 1]
        if marker == 0xD9:  # EOI
            return None
        if marker == 0xDA:  # SOS: entropy-coded data, no Exif beyond here
            return None
        if 0xD0 <= marker <= 0xD7 or marker == 0x01:  # bare markers
            pos += 2
            continue
        if pos + 4 > len(data):
            raise CorruptExif("truncated segment header")
        (length,) = struct.unpack_from(">H", data, pos + 2)
        if length < 2 or pos + 2 + length > len(data):
            raise CorruptExif(f"segment at {pos} overruns stream")
        if marker == 0xE1:
            payload = data[pos + 4 : pos + 2 + length]
            if payload.startswith(_EXIF_HEADER):
                return payload[len(_EXIF_HEADER) :]
        pos += 2 + length
    if pos == len(data):
        return None
    raise CorruptExif("truncated segment stream")


class _TiffReader:
    """Bounds-checked reads within one TIFF body (both byte orders)."""

    def __init__(self, body: bytes):
        self.body = body
        if len(body) < 8:
            raise CorruptExif("TIFF header truncated")
        order = body[:2]
        if order == b"II":
            self.endian = "<"
        elif order == b"MM":
            self.endian = ">"
        else:
            raise CorruptExif(f"bad byte-order mark: {order!r}")
        if self.u16(2) != 42:
            raise CorruptExif("bad TIFF magic")
        self.ifd0 = self.u32(4)

    def u16(self, offset: int) -> int:
        self._check(offset, 2)
        return struct.unpack_from(self.endian + "H", self.body, offset)[0]

    def u32(self, offset: int) -> int:
        self._check(offset, 4)
        return struct.unpack_from(self.endian + "I", self.body, offset)[0]

    def _check(self, offset: int, size: int) -> None:
        if offset < 0 or offset + size > len(self.body):
            raise CorruptExif(f"read of {size} at {offset} beyond TIFF body")

    def read_ifd(self, offset: int) -> dict[int, tuple[int, int, int]]:
        """tag -> (type, count, value_field_offset) for one IFD."""
        count = self.u16(offset)
        entries: dict[int, tuple[int, int, int]] = {}
        for i in range(count):
            base = offset + 2 + i * 12
            self._check(base, 12)
            tag = self.u16(base)
            vtype = self.u16(base + 2)
            vcount = self.u32(base + 4)
            entries[tag] = (vtype, vcount, base + 8)
        return entries

    def ifd_pointer(self, tag: int) -> Optional[int]:
        entries = self.read_ifd(self.ifd0)
        entry = entries.get(tag)
        if entry is None:
            return None
        vtype, vcount, value_off = entry
        if vtype not in (_TYPE_LONG, _TYPE_SHORT) or vcount != 1:
            raise CorruptExif(f"IFD pointer tag {tag:#x} has bad shape")
        # values are left-justified in the 4-byte field
        return self.u16(value_off) if vtype == _TYPE_SHORT else self.u32(value_off)

    def _value_offset(self, entry: tuple[int, int, int]) -> int:
        vtype, vcount, value_off = entry
        size = _TYPE_SIZES.get(vtype)
        if size is None:
            raise CorruptExif(f"unknown value type {vtype}")
        total = size * vcount
        if total <= 4:
            return value_off
        return self.u32(value_off)

    def rationals(self, entry: tuple[int, int, int], expected: int) -> list[Fraction]:
        vtype, vcount, _ = entry
        if vtype != _TYPE_RATIONAL or vcount != expected:
            raise CorruptExif(f"expected {expected} rationals, got type {vtype} x{vcount}")
        offset = self._value_offset(entry)
        values = []
        for i in range(expected):
            num = self.u32(offset + i * 8)
            den = self.u32(offset + i * 8 + 4)
            if den == 0:
                raise CorruptExif("rational with zero denominator")
            values.append(Fraction(num, den))
        return values

    def ascii(self, entry: tuple[int, int, int]) -> str:
        vtype, vcount, _ = entry
        if vtype != _TYPE_ASCII:
            raise CorruptExif(f"expected ASCII value, got type {vtype}")
        offset = self._value_offset(entry)
        self._check(offset, vcount)
        raw = self.body[offset : offset + vcount]
        return raw.decode("ascii", errors="replace").rstrip("\x00")


# -- vision adapters ---------------------------------------------------------

GAD_CAPABILITY = "gad"


class VisionAdapter:
    """Opaque image-analysis boundary: bytes in, structured result out."""

    capabilities: frozenset[str] = frozenset()

    def analyze_gad(self, image: bytes) -> GadResult:
        raise AdapterUnavailable(f"{type(self).__name__} has no gad capability")


class FixtureVisionAdapter(VisionAdapter):
    """Replays recorded results keyed by sha256 of the image content."""

    capabilities = frozenset({GAD_CAPABILITY})

    def __init__(self, fixture: Union[str, Path, dict]):
        if isinstance(fixture, (str, Path)):
            path = Path(fixture)
            if not path.is_file():
                raise AdapterUnavailable(f"no adapter fixture at {path}")
            fixture = json.loads(path.read_text("utf-8"))
        if not isinstance(fixture, dict):
            raise AdapterUnavailable("adapter fixture must be a JSON object")
        self._table = fixture

    def analyze_gad(self, image: bytes) -> GadResult:
        digest = hashlib.sha256(image).hexdigest()
        entry = self._table.get(digest)
        if entry is None:
            raise AdapterError(f"no recorded result for image {digest[:12]}…")
        try:
            low, high = entry["age"]
            return GadResult((int(low), int(high)), entry["gender"], dict(entry.get("conf", {})))
        except (KeyError, TypeError, ValueError) as exc:
            raise AdapterError(f"malformed fixture entry: {exc}") from exc


def analyze_gad(image: bytes, adapter: VisionAdapter) -> GadResult:
    """Run gender/age detection through an adapter with the gad capability."""
    if GAD_CAPABILITY not in adapter.capabilities:
        raise AdapterUnavailable(f"{type(adapter).__name__} has no gad capability")
    return adapter.analyze_gad(image)
