"""Dialogue-act vocabulary: act ids, act definitions, and the taxonomy loader.

The vocabulary ships as a versioned data file (``data/taxonomy.txt``) rather
than hard-coded constants; the loader enforces the category layout (34 tutor
acts split 1/3/4/22/4 over General/Operational/Assessment/Teaching/Engagement,
9 student acts split 1/3/2/3 over General/Operational/Question/Answer) so
edits to the file cannot silently drift.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Iterator, Optional

TUTOR = "tutor"
STUDENT = "student"

TUTOR_CATEGORIES = ("General", "Operational", "Assessment", "Teaching", "Engagement")
STUDENT_CATEGORIES = ("General", "Operational", "Question", "Answer")

TUTOR_CATEGORY_SIZES = {
    "General": 1,
    "Operational": 3,
    "Assessment": 4,
    "Teaching": 22,
    "Engagement": 4,
}
STUDENT_CATEGORY_SIZES = {
    "General": 1,
    "Operational": 3,
    "Question": 2,
    "Answer": 3,
}

# Canonical act-id grammar: role prefix, then lowercase dot-separated segments.
ACT_ID_RE = re.compile(r"^[ts]\.[a-z_]+(?:\.[a-z_]+)*$")
# Loose scan used to pull an act id out of free-form model replies.
ACT_ID_SCAN_RE = re.compile(r"\b[ts]\.[a-z_]+(?:\.[a-z_]+)*\b")


class TaxonomyError(ValueError):
    """Raised for malformed act ids or an invalid taxonomy document."""


class UnknownActError(TaxonomyError):
    """Raised when an act id is well-formed but not registered."""

    def __init__(self, raw: str):
        super().__init__(f"unknown act id: {raw!r}")
        self.raw = raw


@dataclass(frozen=True)
class ActId:
    """A registered dialogue-act identifier, e.g. ``t.teach.repair``."""

    role: str  # "tutor" or "student"
    path: tuple[str, ...]

    def __str__(self) -> str:
        return ("t." if self.role == TUTOR else "s.") + ".".join(self.path)

    @property
    def canonical(self) -> str:
        return str(self)

    @classmethod
    def from_string(cls, raw: str) -> "ActId":
        if not ACT_ID_RE.match(raw):
            raise TaxonomyError(f"malformed act id: {raw!r}")
        prefix, rest = raw.split(".", 1)
        role = TUTOR if prefix == "t" else STUDENT
        return cls(role=role, path=tuple(rest.split(".")))


@dataclass(frozen=True)
class ActDef:
    """One vocabulary entry: id, category, prompt description, optional example."""

    id: ActId
    category: str
    description: str
    example: Optional[str] = None
    provisional: bool = False


class Taxonomy:
    """Immutable registry of act definitions; safe to share across threads."""

    def __init__(self, defs: Iterable[ActDef]):
        self._defs: dict[str, ActDef] = {}
        for d in defs:
            key = str(d.id)
            if key in self._defs:
                raise TaxonomyError(f"duplicate act id: {key}")
            allowed = TUTOR_CATEGORIES if d.id.role == TUTOR else STUDENT_CATEGORIES
            if d.category not in allowed:
                raise TaxonomyError(
                    f"{key}: invalid category {d.category!r} for role {d.id.role}"
                )
            self._defs[key] = d
        self._check_counts()

    def _check_counts(self) -> None:
        for role, sizes in ((TUTOR, TUTOR_CATEGORY_SIZES), (STUDENT, STUDENT_CATEGORY_SIZES)):
            for category, expected in sizes.items():
                got = sum(
                    1
                    for d in self._defs.values()
                    if d.id.role == role and d.category == category
                )
                if got != expected:
                    raise TaxonomyError(
                        f"count mismatch: {role}/{category} has {got} acts, expected {expected}"
                    )
        for d in self._defs.values():
            if d.category == "Teaching" and not d.description.strip():
                raise TaxonomyError(f"{d.id}: Teaching act must carry a description")

    def __len__(self) -> int:
        return len(self._defs)

    def __iter__(self) -> Iterator[ActDef]:
        return iter(sorted(self._defs.values(), key=lambda d: str(d.id)))

    def __contains__(self, raw: str) -> bool:
        return raw in self._defs

    def get(self, act: "ActId | str") -> ActDef:
        key = str(act)
        try:
            return self._defs[key]
        except KeyError:
            raise UnknownActError(key) from None

    def validate_act(self, raw: str) -> ActId:
        """Resolve ``raw`` (whitespace/brackets tolerated) to a registered ActId."""
        cleaned = raw.strip().strip("[]").strip()
        if not ACT_ID_RE.match(cleaned):
            raise TaxonomyError(f"malformed act id: {raw!r}")
        if cleaned not in self._defs:
            raise UnknownActError(raw)
        return self._defs[cleaned].id

    def acts_by(self, role: str, category: Optional[str] = None) -> list[ActDef]:
        """Acts of ``role`` (optionally one category), ordered by canonical string."""
        out = [
            d
            for d in self._defs.values()
            if d.id.role == role and (category is None or d.category == category)
        ]
        return sorted(out, key=lambda d: str(d.id))

    def teaching_acts(self) -> list[ActDef]:
        return self.acts_by(TUTOR, "Teaching")


_FIELDS = {"id", "category", "description", "example", "provisional"}


def _parse_records(text: str) -> Iterator[dict[str, str]]:
    record: dict[str, str] = {}
    last_field: Optional[str] = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith("#"):
            continue
        if not stripped:
            if record:
                yield record
                record, last_field = {}, None
            continue
        if ":" not in stripped:
            raise TaxonomyError(f"line {lineno}: expected 'field: value', got {stripped!r}")
        name, _, value = stripped.partition(":")
        name = name.strip()
        if name not in _FIELDS:
            # Continuation of the previous field's value (e.g. a description
            # containing a colon) is not supported; keep the format strict.
            raise TaxonomyError(f"line {lineno}: unknown field {name!r}")
        if name in record:
            raise TaxonomyError(f"line {lineno}: repeated field {name!r} in record")
        record[name] = value.strip()
        last_field = name
    if record:
        yield record


def load_taxonomy(text: str) -> Taxonomy:
    """Parse a definition document into a validated Taxonomy.

    Raises TaxonomyError naming the offending entry on duplicate ids, malformed
    ids, missing fields, or per-category count mismatches.
    """
    defs = []
    for record in _parse_records(text):
        for required in ("id", "category", "description"):
            if required not in record:
                raise TaxonomyError(
                    f"record {record.get('id', '<no id>')!r}: missing field {required!r}"
                )
        act_id = ActId.from_string(record["id"])
        defs.append(
            ActDef(
                id=act_id,
                category=record["category"],
                description=record["description"],
                example=record.get("example"),
                provisional=record.get("provisional", "").lower() == "true",
            )
        )
    return Taxonomy(defs)


def load_taxonomy_file(path: Optional[str] = None) -> Taxonomy:
    """Load a taxonomy file; defaults to the bundled vocabulary."""
    if path is None:
        text = resources.files("tutorkit.data").joinpath("taxonomy.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return load_taxonomy(text)
