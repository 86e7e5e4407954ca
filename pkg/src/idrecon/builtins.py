"""Built-in transform modules.

Descriptors live in data/modules.json (the registry manifest); this module
binds each name to its implementation and registers the lot on an engine.
"""

from __future__ import annotations

import json
import posixpath
import urllib.parse
from importlib import resources

from . import generators, media, text, wordlist
from .engine import (
    ModuleContext,
    ModuleDescriptor,
    ModuleEngine,
    ModulePhase,
    ParamSpec,
)
from .errors import AdapterUnavailable, InvalidDescriptor
from .graph import EntityGraph, EntityKind
from .interpret import interpret_list_output
from .siteprobe import Verdict, load_site_list, probe_username

GAD_ADAPTER = "gad"

# node kinds whose values may feed the wordlist generator when pulling
# tokens out of the graph
WORDLIST_SOURCE_KINDS = frozenset(
    {EntityKind.USERNAME, EntityKind.PERSON, EntityKind.TOKEN}
)


def gather_wordlist_tokens(graph: EntityGraph, node_id: str) -> list[str]:
    """The node's own value plus out-neighbor values of wordlist-eligible
    kinds, in edge creation order, cleaned."""
    node = graph.node(node_id)
    raw = []
    if node.kind in WORDLIST_SOURCE_KINDS:
        raw.append(node.value)
    for _edge, neighbor in graph.neighbors(node_id, "out"):
        if neighbor.kind in WORDLIST_SOURCE_KINDS:
            raw.append(neighbor.value)
    return text.clean_tokens(raw)


def descriptor_from_manifest(raw: dict) -> ModuleDescriptor:
    try:
        return ModuleDescriptor(
            name=raw["name"],
            phase=ModulePhase(raw["phase"]),
            input_kinds=frozenset(EntityKind(k) for k in raw["input_kinds"]),
            output_kinds=frozenset(EntityKind(k) for k in raw["output_kinds"]),
            produces_files=bool(raw.get("produces_files", False)),
            network_access=raw.get("network_access", "none"),
            params=tuple(
                ParamSpec(p["name"], p["type"], p["default"]) for p in raw.get("params", ())
            ),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise InvalidDescriptor(f"bad manifest entry: {exc}") from exc


def load_manifest() -> list[ModuleDescriptor]:
    data = resources.files("idrecon.data").joinpath("modules.json").read_text("utf-8")
    return [descriptor_from_manifest(raw) for raw in json.loads(data)["modules"]]


def bundled_site_pack() -> dict:
    data = resources.files("idrecon.data").joinpath("sites/builtin_pack.json").read_text("utf-8")
    return json.loads(data)


def _split_person(value: str) -> generators.NameParts:
    parts = value.split()
    if len(parts) < 2:
        raise ValueError(f"person value needs first and last name: {value!r}")
    return generators.NameParts(parts[0], parts[-1])


def _extras_tuple(raw: str) -> tuple[str, ...]:
    return tuple(e.strip() for e in raw.split(",") if e.strip())


# -- implementations ----------------------------------------------------------

def _email_generate(ctx: ModuleContext) -> None:
    name = _split_person(ctx.node.value)
    for address in generators.generate_email_candidates(name, ctx.params["domain"]):
        ctx.stage_node(EntityKind.EMAIL, address, "generated-email")


def _username_generate(ctx: ModuleContext) -> None:
    name = _split_person(ctx.node.value)
    name = generators.NameParts(name.first, name.last, _extras_tuple(ctx.params["extras"]))
    for candidate in generators.generate_username_candidates(name):
        ctx.stage_node(EntityKind.USERNAME, candidate, "generated-username")


def _site_probe(ctx: ModuleContext) -> None:
    sites_param = ctx.params["sites"]
    if sites_param:
        sites = load_site_list(ctx.project.resolve(sites_param).read_text("utf-8"))
    else:
        sites = load_site_list(bundled_site_pack())
    for result in probe_username(ctx.node.value, sites, ctx.transport):
        if result.verdict == Verdict.FOUND:
            category = next(s.category for s in sites if s.name == result.site)
            ctx.stage_node(
                EntityKind.SOCIAL_PROFILE, result.url, "profile-found", category
            )


def _image_crawl(ctx: ModuleContext) -> None:
    manifest_url = ctx.params["manifest_url"].replace(
        "{username}", urllib.parse.quote(ctx.node.value, safe="")
    )
    status, _headers, body = ctx.transport.fetch("GET", manifest_url)
    if status != 200:
        raise RuntimeError(f"manifest fetch returned {status}")
    for image_url in interpret_list_output(body.decode("utf-8")):
        img_status, _h, img_bytes = ctx.transport.fetch("GET", image_url)
        if img_status != 200:
            raise RuntimeError(f"image fetch {image_url} returned {img_status}")
        name = posixpath.basename(urllib.parse.urlsplit(image_url).path) or "image.jpg"
        relpath = ctx.stage_file(name, img_bytes)
        ctx.stage_node(EntityKind.IMAGE_FILE, relpath, "crawled-image")


def _exif_extract(ctx: ModuleContext) -> None:
    data = ctx.read_file(ctx.node.value)
    point = media.extract_exif_gps(data)
    if point is not None:
        value = f"gps:{point.latitude:.7f},{point.longitude:.7f}"
        ctx.stage_node(EntityKind.ATTRIBUTE, value, "exif-gps")
    taken = media.extract_exif_timestamp(data)
    if taken is not None:
        ctx.stage_node(EntityKind.ATTRIBUTE, f"taken:{taken.isoformat()}", "exif-timestamp")


def _gad(ctx: ModuleContext) -> None:
    adapter = ctx.adapters.get(GAD_ADAPTER)
    if adapter is None:
        fixture = ctx.project.resolve(ctx.params["fixture"])
        if not fixture.is_file():
            raise AdapterUnavailable(f"no gad adapter registered and no fixture at {fixture}")
        adapter = media.FixtureVisionAdapter(fixture)
    result = media.analyze_gad(ctx.read_file(ctx.node.value), adapter)
    low, high = result.age_range
    ctx.stage_node(EntityKind.ATTRIBUTE, f"age:{low}-{high}", "gad-result")
    ctx.stage_node(EntityKind.ATTRIBUTE, f"gender:{result.gender_label}", "gad-result")


def _ranked_clean_tokens(raw_text: str, backend: str, adapters: dict) -> list[str]:
    """Shared NER -> rank -> clean pipeline; output keeps rank order."""
    entities = text.extract_entities(raw_text, backend=backend, adapters=adapters)
    surfaces = [e.surface for e in entities]
    ranked = [stats.token for stats in text.rank_tokens(surfaces)]
    return text.clean_tokens(ranked)


def _ner_extract(ctx: ModuleContext) -> None:
    raw = ctx.read_file(ctx.node.value).decode("utf-8")
    for token in _ranked_clean_tokens(raw, ctx.params["backend"], ctx.adapters):
        ctx.stage_node(EntityKind.TOKEN, token, "ner-token")


def _password_candidates(ctx: ModuleContext) -> None:
    raw = ctx.read_file(ctx.node.value).decode("utf-8")
    tokens = _ranked_clean_tokens(raw, "rule", ctx.adapters)
    config = wordlist.WordlistConfig(
        leet=ctx.params["leet"],
        combine_depth=ctx.params["depth"],
        max_candidates=ctx.params["max"],
    )
    generated = wordlist.generate_wordlist(tokens, config)
    payload = "".join(c + "\n" for c in generated.candidates).encode("utf-8")
    relpath = ctx.stage_file("passwords.txt", payload)
    ctx.stage_node(EntityKind.TEXT_FILE, relpath, "wordlist")


IMPLEMENTATIONS = {
    "email-generate": _email_generate,
    "username-generate": _username_generate,
    "site-probe": _site_probe,
    "image-crawl": _image_crawl,
    "exif-extract": _exif_extract,
    "gad": _gad,
    "ner-extract": _ner_extract,
    "password-candidates": _password_candidates,
}


def register_builtin_modules(engine: ModuleEngine) -> None:
    for descriptor in load_manifest():
        implementation = IMPLEMENTATIONS.get(descriptor.name)
        if implementation is None:
            raise InvalidDescriptor(f"manifest names unknown module {descriptor.name!r}")
        engine.register_module(descriptor, implementation)
