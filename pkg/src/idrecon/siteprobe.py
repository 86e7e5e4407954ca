"""Declarative profile-existence checking over a swappable HTTP transport.

Site packs describe, per site, how a "profile exists" and a "no such user"
response look. The transport records live interactions once and replays them
deterministically afterwards, so probe tests never touch the network.
"""

from __future__ import annotations

import base64
import json
import threading
import time
import urllib.parse
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Optional, Union

from .errors import BadTemplate, NetworkFailure, ReplayMiss, SchemaViolation
from .graph import SourceCategory

USER_AGENT = "idrecon-probe/0.1 (+identity self-assessment tool)"

LIVE, RECORD, REPLAY = "live", "record", "replay"


class Verdict(str, Enum):
    FOUND = "found"
    NOT_FOUND = "not_found"
    AMBIGUOUS = "ambiguous"
    TRANSPORT_ERROR = "transport_error"


@dataclass(frozen=True)
class DetectionRule:
    status_in: frozenset[int] = frozenset()
    body_contains: Optional[str] = None
    body_lacks: Optional[str] = None

    def has_criteria(self) -> bool:
        return bool(self.status_in) or self.body_contains is not None or self.body_lacks is not None

    def matches(self, status: int, body: str) -> bool:
        """All set criteria must hold (conjunction)."""
        if self.status_in and status not in self.status_in:
            return False
        if self.body_contains is not None and self.body_contains not in body:
            return False
        if self.body_lacks is not None and self.body_lacks in body:
            return False
        return True


@dataclass(frozen=True)
class SiteDescriptor:
    name: str
    category: SourceCategory
    url_template: str
    claim_found: DetectionRule
    claim_absent: DetectionRule

    def resolve(self, username: str) -> str:
        return self.url_template.replace("{username}", urllib.parse.quote(username, safe=""))


@dataclass(frozen=True)
class ProbeResult:
    site: str
    username: str
    verdict: Verdict
    url: str
    status: Optional[int] = None


def _rule_from_doc(raw: object, context: str) -> DetectionRule:
    if not isinstance(raw, dict):
        raise SchemaViolation(f"{context}: detection rule must be an object")
    try:
        rule = DetectionRule(
            status_in=frozenset(int(s) for s in raw.get("status_in") or ()),
            body_contains=raw.get("body_contains"),
            body_lacks=raw.get("body_lacks"),
        )
    except (TypeError, ValueError) as exc:
        raise SchemaViolation(f"{context}: {exc}") from exc
    if not rule.has_criteria():
        raise SchemaViolation(f"{context}: rule needs at least one criterion")
    return rule


def load_site_list(document: Union[str, bytes, dict, Path]) -> list[SiteDescriptor]:
    """Parse and validate a site pack; order is preserved."""
    if isinstance(document, Path):
        document = document.read_text("utf-8")
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"site list is not valid JSON: {exc}") from exc
    if not isinstance(document, dict) or not isinstance(document.get("sites"), list):
        raise SchemaViolation("site list requires a 'sites' array")
    sites = []
    for raw in document["sites"]:
        if not isinstance(raw, dict):
            raise SchemaViolation("site entry must be an object")
        try:
            name = raw["name"]
            category = SourceCategory(raw["category"])
            url = raw["url"]
        except (KeyError, ValueError) as exc:
            raise SchemaViolation(f"bad site entry: {exc}") from exc
        if url.count("{username}") != 1:
            raise BadTemplate(f"site {name!r}: url must contain {{username}} exactly once")
        sites.append(
            SiteDescriptor(
                name=name,
                category=category,
                url_template=url,
                claim_found=_rule_from_doc(raw.get("found"), f"site {name!r} found"),
                claim_absent=_rule_from_doc(raw.get("absent"), f"site {name!r} absent"),
            )
        )
    return sites


def _default_live_fetch(method: str, url: str) -> tuple[int, dict[str, str], bytes]:
    import requests

    try:
        resp = requests.request(method, url, headers={"User-Agent": USER_AGENT}, timeout=15)
    except requests.RequestException as exc:
        raise NetworkFailure(str(exc)) from exc
    return resp.status_code, dict(resp.headers), resp.content


class Transport:
    """HTTP layer with live / record / replay modes.

    Replay performs zero network operations: unrecorded (method, url) pairs
    raise ReplayMiss. Record appends each live interaction to the fixture
    document (and file, when given) as it happens. The live fetch callable is
    injectable so tests can prove no network is touched.
    """

    def __init__(
        self,
        mode: str = REPLAY,
        fixture: Union[None, dict, str, Path] = None,
        fixture_path: Union[None, str, Path] = None,
        live_fetch: Callable[[str, str], tuple[int, dict, bytes]] = _default_live_fetch,
        delay: float = 0.0,
    ):
        if mode not in (LIVE, RECORD, REPLAY):
            raise ValueError(f"unknown transport mode: {mode!r}")
        self.mode = mode
        self.delay = delay
        self._live_fetch = live_fetch
        self.live_calls = 0
        self._write_lock = threading.Lock()
        self._fixture_path = Path(fixture_path) if fixture_path else None
        if isinstance(fixture, (str, Path)):
            self._fixture_path = Path(fixture)
            fixture = json.loads(self._fixture_path.read_text("utf-8")) if self._fixture_path.is_file() else None
        self._doc: dict = fixture if fixture is not None else {"interactions": []}
        if not isinstance(self._doc.get("interactions"), list):
            raise SchemaViolation("fixture requires an 'interactions' array")

    @classmethod
    def replay(cls, fixture: Union[dict, str, Path]) -> "Transport":
        return cls(REPLAY, fixture=fixture)

    @classmethod
    def record(cls, fixture_path: Union[str, Path], **kwargs) -> "Transport":
        return cls(RECORD, fixture=fixture_path, fixture_path=fixture_path, **kwargs)

    @classmethod
    def live(cls, **kwargs) -> "Transport":
        return cls(LIVE, **kwargs)

    def fetch(self, method: str, url: str) -> tuple[int, dict[str, str], bytes]:
        method = method.upper()
        if self.mode == REPLAY:
            hit = self._lookup(method, url)
            if hit is None:
                raise ReplayMiss(f"{method} {url} not in fixture")
            return hit
        if self.delay:
            time.sleep(self.delay)
        self.live_calls += 1
        status, headers, body = self._live_fetch(method, url)
        if self.mode == RECORD:
            self._append(method, url, status, headers, body)
        return status, headers, body

    def _lookup(self, method: str, url: str) -> Optional[tuple[int, dict, bytes]]:
        for entry in self._doc["interactions"]:
            req = entry.get("request", {})
            if req.get("method") == method and req.get("url") == url:
                resp = entry.get("response", {})
                body = base64.b64decode(resp.get("body_b64", ""))
                return int(resp.get("status", 0)), dict(resp.get("headers", {})), body
        return None

    def _append(self, method: str, url: str, status: int, headers: dict, body: bytes) -> None:
        entry = {
            "request": {"method": method, "url": url},
            "response": {
                "status": status,
                "headers": {str(k): str(v) for k, v in headers.items()},
                "body_b64": base64.b64encode(body).decode("ascii"),
            },
        }
        with self._write_lock:
            self._doc["interactions"].append(entry)
            if self._fixture_path is not None:
                self._fixture_path.parent.mkdir(parents=True, exist_ok=True)
                tmp = self._fixture_path.with_suffix(".tmp")
                tmp.write_text(json.dumps(self._doc, indent=2) + "\n", encoding="utf-8")
                tmp.replace(self._fixture_path)

    def fixture_document(self) -> dict:
        return self._doc


def probe_username(
    username: str, sites: list[SiteDescriptor], transport: Transport
) -> list[ProbeResult]:
    """One result per site, in input order; per-site transport failures
    become TransportError verdicts and never abort the batch."""
    if not username:
        raise ValueError("username must be non-empty")
    results = []
    for site in sites:
        url = site.resolve(username)
        try:
            status, _headers, body_bytes = transport.fetch("GET", url)
        except (ReplayMiss, NetworkFailure):
            results.append(ProbeResult(site.name, username, Verdict.TRANSPORT_ERROR, url))
            continue
        body = body_bytes.decode("utf-8", errors="replace")
        found = site.claim_found.matches(status, body)
        absent = site.claim_absent.matches(status, body)
        if found and not absent:
            verdict = Verdict.FOUND
        elif absent and not found:
            verdict = Verdict.NOT_FOUND
        else:
            verdict = Verdict.AMBIGUOUS
        results.append(ProbeResult(site.name, username, verdict, url, status))
    return results


def validate_site_pack(
    sites: list[SiteDescriptor], username: str, transport: Transport
) -> list[str]:
    """QA helper: names of sites whose found/absent rules both match the
    recorded response for this username."""
    conflicts = []
    for result, site in zip(probe_username(username, sites, transport), sites):
        if result.verdict == Verdict.AMBIGUOUS and result.status is not None:
            status, _h, body = transport.fetch("GET", result.url)
            text = body.decode("utf-8", errors="replace")
            if site.claim_found.matches(status, text) and site.claim_absent.matches(status, text):
                conflicts.append(site.name)
    return conflicts
