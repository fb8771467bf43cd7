"""Trigger-entity type constraints.

A constraint table states, per event subtype and role, which entity types
may fill the role. Inference discards candidates that match no role, and
the recast module's constrained sampling draws negatives only from
candidates that match at least one.

The entity-type lists accept a "*" wildcard so a permissive allow-all
table (any type fills any role of the schema) is plain data. The shipped
ACE table is reconstructed from task guidelines and should be read as a
configuration artifact, not ground truth.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .errors import RolecastError
from .ioutil import atomic_write_text, dumps_pretty

WILDCARD_TYPE = "*"


class ConstraintError(RolecastError, ValueError):
    pass


class UnknownEventSubtypeError(ConstraintError, KeyError):
    """Query for a subtype the table does not know (schema mismatch,
    distinct from an empty result)."""

    def __init__(self, subtype: str):
        ConstraintError.__init__(self, f"event subtype {subtype!r} not in constraint table")
        self.subtype = subtype

    def __str__(self):  # KeyError.__str__ would repr-quote the message
        return self.args[0]


@dataclass
class ConstraintTable:
    allowed: dict[tuple[str, str], frozenset[str]]
    roles_of_event: dict[str, frozenset[str]]

    def validate(self) -> None:
        for (subtype, role), types in self.allowed.items():
            if subtype not in self.roles_of_event or role not in self.roles_of_event[subtype]:
                raise ConstraintError(f"({subtype!r}, {role!r}) key without matching roles_of_event entry")
            if not types:
                raise ConstraintError(f"({subtype!r}, {role!r}) grants no entity types")
        for subtype, roles in self.roles_of_event.items():
            for role in roles:
                if (subtype, role) not in self.allowed:
                    raise ConstraintError(f"role {role!r} of {subtype!r} has no entity-type grant")

    def allowed_roles(self, event_subtype: str, entity_type: str) -> set[str]:
        """Roles of the subtype that this entity type may fill."""
        if event_subtype not in self.roles_of_event:
            raise UnknownEventSubtypeError(event_subtype)
        out = set()
        for role in self.roles_of_event[event_subtype]:
            types = self.allowed[(event_subtype, role)]
            if entity_type in types or WILDCARD_TYPE in types:
                out.add(role)
        return out

    def satisfies_any(self, event_subtype: str, entity_type: str) -> bool:
        return bool(self.allowed_roles(event_subtype, entity_type))

    @property
    def subtypes(self) -> list[str]:
        return sorted(self.roles_of_event)

    def all_roles(self) -> set[str]:
        return set().union(*self.roles_of_event.values()) if self.roles_of_event else set()


def table_from_mapping(mapping: dict) -> ConstraintTable:
    """Build from the file shape {subtype: {role: [entity_type, ...]}}."""
    if not isinstance(mapping, dict):
        raise ConstraintError("constraint mapping must be an object")
    allowed: dict[tuple[str, str], frozenset[str]] = {}
    roles_of_event: dict[str, frozenset[str]] = {}
    for subtype, roles in mapping.items():
        if not isinstance(roles, dict) or not roles:
            raise ConstraintError(f"subtype {subtype!r} must map to a non-empty role object")
        roles_of_event[subtype] = frozenset(roles)
        for role, types in roles.items():
            if not types:
                raise ConstraintError(f"({subtype!r}, {role!r}) grants no entity types")
            allowed[(subtype, role)] = frozenset(types)
    table = ConstraintTable(allowed=allowed, roles_of_event=roles_of_event)
    table.validate()
    return table


def table_to_mapping(table: ConstraintTable) -> dict:
    return {
        subtype: {role: sorted(table.allowed[(subtype, role)]) for role in sorted(roles)}
        for subtype, roles in table.roles_of_event.items()
    }


def allow_all_table(roles_of_event: dict) -> ConstraintTable:
    """Permissive table: every listed role accepts every entity type."""
    return table_from_mapping(
        {subtype: {role: [WILDCARD_TYPE] for role in roles} for subtype, roles in roles_of_event.items()}
    )


def load_constraints(path) -> ConstraintTable:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            mapping = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConstraintError(f"{path}: {exc}") from exc
    try:
        return table_from_mapping(mapping)
    except ConstraintError as exc:
        raise ConstraintError(f"{path}: {exc}") from exc


def save_constraints(table: ConstraintTable, path) -> None:
    atomic_write_text(path, dumps_pretty(table_to_mapping(table)))


def shipped_constraints(name: str = "ace") -> ConstraintTable:
    """Packaged tables: 'ace' (reconstructed) or 'ace-allow-all'."""
    filename = {"ace": "ace_constraints.json", "ace-allow-all": "ace_allow_all.json"}
    if name not in filename:
        raise ConstraintError(f"unknown shipped constraint table {name!r}")
    mapping = json.loads(
        resources.files("rolecast.data").joinpath(filename[name]).read_text(encoding="utf-8")
    )
    return table_from_mapping(mapping)
