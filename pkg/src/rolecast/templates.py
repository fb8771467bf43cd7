"""Role templates and verbalization of (event, candidate) pairs.

A template is a pattern over five placeholders:

    {arg}            the argument candidate surface (exactly once)
    {trg}            the raw trigger surface ("hired")
    {trg_type}       the coarse event type ("Movement")
    {trg_subtype}    the event subtype ("Transport")
    {canonical_trg}  a predefined trigger word looked up per event subtype

Substitution is purely mechanical string replacement, single pass, no
inflection; {trg} is the raw surface as it appears in text. Agent/patient
filler words like "someone" or "the defendant" are literal text inside
patterns, not placeholders.

Categories describe authoring style: `implicit-arg` states something about
the argument without naming the event; `explicit-trg` mentions the trigger
through a placeholder; `canonical-trg` and `canonical-with-placeholder`
substitute a canonical trigger word from the library's canonical_map (the
latter also carries filler words). The canonical categories must use
{canonical_trg}, and any pattern using it must declare an explicit scope of
event subtypes so the canonical_map coverage can be checked up front.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from importlib import resources

from .errors import RolecastError
from .ioutil import atomic_write_text, dumps_pretty

PLACEHOLDER_NAMES = ("arg", "trg", "trg_type", "trg_subtype", "canonical_trg")

CATEGORY_IMPLICIT = "implicit-arg"
CATEGORY_EXPLICIT = "explicit-trg"
CATEGORY_CANONICAL = "canonical-trg"
CATEGORY_CANONICAL_PLACEHOLDER = "canonical-with-placeholder"
CATEGORIES = (
    CATEGORY_IMPLICIT,
    CATEGORY_EXPLICIT,
    CATEGORY_CANONICAL,
    CATEGORY_CANONICAL_PLACEHOLDER,
)

_PLACEHOLDER_RE = re.compile(r"\{([^{}]*)\}")
_KNOWN_RE = re.compile(r"\{(%s)\}" % "|".join(PLACEHOLDER_NAMES))


class TemplateError(RolecastError, ValueError):
    pass


@dataclass(frozen=True)
class Template:
    id: str
    role: str
    pattern: str
    category: str
    scope: frozenset[str] | None = None  # None: applies to every event subtype

    def applies_to(self, event_subtype: str) -> bool:
        return self.scope is None or event_subtype in self.scope

    @property
    def placeholders(self) -> tuple[str, ...]:
        return tuple(_PLACEHOLDER_RE.findall(self.pattern))


@dataclass(frozen=True)
class EventContext:
    """Event surface information a template can draw on."""

    trigger_surface: str
    event_type: str
    event_subtype: str


def parse_template(pattern: str, role: str, category: str, scope=None,
                   template_id: str | None = None) -> Template:
    """Validate a raw pattern and build a Template.

    Rejects: empty pattern, unknown placeholder names, a missing or
    repeated {arg}, canonical categories without {canonical_trg}, and
    {canonical_trg} without an explicit scope.
    """
    if not pattern:
        raise TemplateError("empty template pattern")
    if not role:
        raise TemplateError("empty role")
    if category not in CATEGORIES:
        raise TemplateError(f"unknown category {category!r}; expected one of {CATEGORIES}")
    names = _PLACEHOLDER_RE.findall(pattern)
    unknown = [n for n in names if n not in PLACEHOLDER_NAMES]
    if unknown:
        raise TemplateError(f"unknown placeholder(s) {unknown} in {pattern!r}")
    n_arg = names.count("arg")
    if n_arg == 0:
        raise TemplateError(f"pattern {pattern!r} is missing {{arg}}")
    if n_arg > 1:
        raise TemplateError(f"pattern {pattern!r} contains {{arg}} {n_arg} times")
    uses_canonical = "canonical_trg" in names
    if category in (CATEGORY_CANONICAL, CATEGORY_CANONICAL_PLACEHOLDER) and not uses_canonical:
        raise TemplateError(f"category {category!r} requires {{canonical_trg}} in {pattern!r}")
    scope_set = frozenset(scope) if scope is not None else None
    if uses_canonical and not scope_set:
        raise TemplateError(f"{{canonical_trg}} pattern {pattern!r} needs an explicit scope")
    if template_id is None:
        digest = hashlib.blake2s(pattern.encode("utf-8"), digest_size=4).hexdigest()
        template_id = f"{role.lower()}-{digest}"
    return Template(id=template_id, role=role, pattern=pattern,
                    category=category, scope=scope_set)


def verbalize(template: Template, ctx: EventContext, arg_surface: str,
              canonical_map=None) -> str:
    """Render the hypothesis string for one (template, event, candidate).

    Single-pass substitution: placeholder-looking text inside substituted
    values is never re-expanded.
    """
    values = {
        "arg": arg_surface,
        "trg": ctx.trigger_surface,
        "trg_type": ctx.event_type,
        "trg_subtype": ctx.event_subtype,
    }
    if "canonical_trg" in template.placeholders:
        if not canonical_map or ctx.event_subtype not in canonical_map:
            raise TemplateError(
                f"template {template.id!r} needs a canonical trigger for "
                f"subtype {ctx.event_subtype!r} and none is mapped"
            )
        values["canonical_trg"] = canonical_map[ctx.event_subtype]
    return _KNOWN_RE.sub(lambda m: values[m.group(1)], template.pattern)


@dataclass
class LibraryMetadata:
    developer: str = ""
    created: str = ""
    elapsed_seconds_per_role: dict[str, float] = field(default_factory=dict)


@dataclass
class TemplateLibrary:
    """Role -> templates, plus per-subtype canonical trigger words.

    Treated as immutable after load; editing flows (the authoring service)
    build a replacement library and swap it wholesale.
    """

    templates: dict[str, list[Template]]
    canonical_map: dict[str, str] = field(default_factory=dict)
    metadata: LibraryMetadata = field(default_factory=LibraryMetadata)

    @property
    def roles(self) -> list[str]:
        return sorted(self.templates)

    def validate(self) -> None:
        if not isinstance(self.templates, dict):
            raise TemplateError("templates must map role -> list of Template")
        for role, templates in self.templates.items():
            if not templates:
                raise TemplateError(f"role {role!r} has an empty template list")
            ids = [t.id for t in templates]
            if len(set(ids)) != len(ids):
                raise TemplateError(f"role {role!r} has duplicate template ids")
            for t in templates:
                if t.role != role:
                    raise TemplateError(
                        f"template {t.id!r} carries role {t.role!r} but is filed under {role!r}"
                    )
                if "canonical_trg" in t.placeholders:
                    missing = sorted((t.scope or frozenset()) - set(self.canonical_map))
                    if missing:
                        raise TemplateError(
                            f"template {t.id!r} scope subtypes {missing} have no canonical_map entry"
                        )

    def templates_for(self, role: str, event_subtype: str | None = None) -> list[Template]:
        """Templates of a role, scope-filtered when a subtype is given."""
        if role not in self.templates:
            raise TemplateError(f"role {role!r} not in library")
        templates = sorted(self.templates[role], key=lambda t: t.id)
        if event_subtype is None:
            return templates
        return [t for t in templates if t.applies_to(event_subtype)]

    def with_role_templates(self, role: str, templates: list[Template]) -> "TemplateLibrary":
        """New library with one role's template list replaced (validated)."""
        updated = dict(self.templates)
        updated[role] = list(templates)
        lib = TemplateLibrary(updated, dict(self.canonical_map), self.metadata)
        lib.validate()
        return lib


def verbalize_role_set(library: TemplateLibrary, ctx: EventContext, arg_surface: str,
                       roles) -> list[tuple[str, str, str]]:
    """(role, template_id, hypothesis) for every applicable template.

    Deterministic order: sorted by (role, template id). Scope-restricted
    templates are skipped for non-matching event subtypes.
    """
    missing = sorted(set(roles) - set(library.templates))
    if missing:
        raise TemplateError(f"role(s) {missing} not in library")
    out = []
    for role in sorted(set(roles)):
        for t in library.templates_for(role, ctx.event_subtype):
            out.append((role, t.id, verbalize(t, ctx, arg_surface, library.canonical_map)))
    return out


# ---------------------------------------------------------------------------
# Library files

def _template_to_record(t: Template) -> dict:
    record = {"id": t.id, "pattern": t.pattern, "category": t.category}
    if t.scope is not None:
        record["scope"] = sorted(t.scope)
    return record


def library_to_record(library: TemplateLibrary) -> dict:
    return {
        "roles": {
            role: [_template_to_record(t) for t in sorted(templates, key=lambda t: t.id)]
            for role, templates in library.templates.items()
        },
        "canonical_map": dict(library.canonical_map),
        "metadata": {
            "developer": library.metadata.developer,
            "created": library.metadata.created,
            "elapsed_seconds_per_role": dict(library.metadata.elapsed_seconds_per_role),
        },
    }


def library_from_record(record: dict) -> TemplateLibrary:
    if not isinstance(record, dict) or not isinstance(record.get("roles"), dict):
        raise TemplateError("library record must be an object with a 'roles' object")
    templates: dict[str, list[Template]] = {}
    for role, rows in record["roles"].items():
        if not isinstance(rows, list):
            raise TemplateError(f"roles.{role}: expected a list of template records")
        parsed = []
        for i, row in enumerate(rows):
            try:
                parsed.append(
                    parse_template(
                        row["pattern"], role, row["category"],
                        scope=row.get("scope"), template_id=row.get("id"),
                    )
                )
            except (KeyError, TypeError) as exc:
                raise TemplateError(f"roles.{role}[{i}]: malformed template record ({exc})") from exc
            except TemplateError as exc:
                raise TemplateError(f"roles.{role}[{i}]: {exc}") from exc
        templates[role] = parsed
    meta = record.get("metadata", {})
    library = TemplateLibrary(
        templates=templates,
        canonical_map=dict(record.get("canonical_map", {})),
        metadata=LibraryMetadata(
            developer=meta.get("developer", ""),
            created=meta.get("created", ""),
            elapsed_seconds_per_role=dict(meta.get("elapsed_seconds_per_role", {})),
        ),
    )
    library.validate()
    return library


def load_library(path) -> TemplateLibrary:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            record = json.load(fh)
        except json.JSONDecodeError as exc:
            raise TemplateError(f"{path}: {exc}") from exc
    try:
        return library_from_record(record)
    except TemplateError as exc:
        raise TemplateError(f"{path}: {exc}") from exc


def save_library(library: TemplateLibrary, path) -> None:
    """Canonical save (sorted keys); save(load(x)) is byte-stable."""
    library.validate()
    atomic_write_text(path, dumps_pretty(library_to_record(library)))


def shipped_library(name: str) -> TemplateLibrary:
    """Load one of the packaged example libraries: 'main' or 'linguist'."""
    filename = {"main": "ace_templates_main.json", "linguist": "ace_templates_linguist.json"}
    if name not in filename:
        raise TemplateError(f"unknown shipped library {name!r}; expected 'main' or 'linguist'")
    record = json.loads(
        resources.files("rolecast.data").joinpath(filename[name]).read_text(encoding="utf-8")
    )
    return library_from_record(record)
