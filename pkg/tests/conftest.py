import base64
import hashlib
import json
import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from exifgen import build_exif_jpeg, plain_jpeg  # noqa: E402

from idrecon.interpret import serialize_list  # noqa: E402

CRAWL_USERNAME = "olafscholz"
CRAWL_MANIFEST_URL = f"https://media.invalid/{CRAWL_USERNAME}/images.txt"
CRAWL_IMAGE_COUNT = 19

MUNICH_GPS = (((48, 1), (8, 1), (14, 1)), "N", ((11, 1), (34, 1), (32, 1)), "E")


def build_crawl_images(count: int = CRAWL_IMAGE_COUNT) -> list[bytes]:
    """Distinct tiny JPEGs; image 3 carries GPS EXIF so analysis modules
    have something to chew on."""
    images = []
    for i in range(count):
        if i == 3:
            images.append(build_exif_jpeg(gps=MUNICH_GPS, timestamp="2021:09:26 18:00:00"))
        else:
            images.append(plain_jpeg(f"img{i}".encode()))
    return images


def build_crawl_fixture(images: list[bytes]) -> dict:
    """Replay transport document: one manifest interaction (a list literal,
    the wrapped-tool output format) plus one interaction per image."""
    urls = [
        f"https://media.invalid/{CRAWL_USERNAME}/{CRAWL_USERNAME}.jpg?i={i}"
        for i in range(len(images))
    ]
    interactions = [
        {
            "request": {"method": "GET", "url": CRAWL_MANIFEST_URL},
            "response": {
                "status": 200,
                "headers": {"Content-Type": "text/plain"},
                "body_b64": base64.b64encode(serialize_list(urls).encode()).decode(),
            },
        }
    ]
    for url, image in zip(urls, images):
        interactions.append(
            {
                "request": {"method": "GET", "url": url},
                "response": {
                    "status": 200,
                    "headers": {"Content-Type": "image/jpeg"},
                    "body_b64": base64.b64encode(image).decode(),
                },
            }
        )
    return {"interactions": interactions}


def gad_fixture_for(image: bytes) -> dict:
    digest = hashlib.sha256(image).hexdigest()
    return {digest: {"age": [60, 70], "gender": "male", "conf": {"age": 0.72, "gender": 0.94}}}


@pytest.fixture
def crawl_images():
    return build_crawl_images()


@pytest.fixture
def crawl_fixture_path(tmp_path, crawl_images):
    path = tmp_path / "crawl_fixture.json"
    path.write_text(json.dumps(build_crawl_fixture(crawl_images)), encoding="utf-8")
    return path
