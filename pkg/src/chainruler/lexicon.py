"""Name / predicate database backing generation, rendering and parsing.

Lexicon files are plain UTF-8 text with three sections::

    [names]
    Jill
    [pairs]
    guilty | innocent
    [predicates]
    green
    in need of money
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .logic import Predicate


class LexiconError(ValueError):
    pass


@dataclass(frozen=True)
class Lexicon:
    names: tuple[str, ...]
    pairs: tuple[tuple[Predicate, Predicate], ...]
    free_predicates: tuple[Predicate, ...]
    _complements: dict[Predicate, Predicate] = field(init=False, repr=False, compare=False)
    _by_surface: dict[str, Predicate] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        comp: dict[Predicate, Predicate] = {}
        for a, b in self.pairs:
            comp[a] = b
            comp[b] = a
        by_surface = {p.surface: p for p in self.all_predicates()}
        surfaces = [p.surface for p in self.all_predicates()]
        if len(set(surfaces)) != len(surfaces):
            raise LexiconError("duplicate predicate surfaces")
        if len(set(self.names)) != len(self.names):
            raise LexiconError("duplicate names")
        object.__setattr__(self, "_complements", comp)
        object.__setattr__(self, "_by_surface", by_surface)

    def all_predicates(self) -> tuple[Predicate, ...]:
        paired = tuple(p for pair in self.pairs for p in pair)
        return paired + self.free_predicates

    def complement_of(self, predicate: Predicate) -> Predicate | None:
        return self._complements.get(predicate)

    def predicate(self, surface: str) -> Predicate | None:
        return self._by_surface.get(surface)

    def has_name(self, name: str) -> bool:
        return name in self.names

    # --- serialization ---------------------------------------------------

    def to_text(self) -> str:
        lines = ["[names]", *self.names, "", "[pairs]"]
        lines += [f"{a.surface} | {b.surface}" for a, b in self.pairs]
        lines += ["", "[predicates]", *[p.surface for p in self.free_predicates], ""]
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str) -> "Lexicon":
        names: list[str] = []
        pairs: list[tuple[Predicate, Predicate]] = []
        preds: list[Predicate] = []
        section = None
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].lower()
                if section not in ("names", "pairs", "predicates"):
                    raise LexiconError(f"unknown section {section!r}")
                continue
            if section == "names":
                names.append(line)
            elif section == "pairs":
                if "|" not in line:
                    raise LexiconError(f"malformed pair line {line!r}")
                a, b = (s.strip() for s in line.split("|", 1))
                pairs.append((Predicate(a), Predicate(b)))
            elif section == "predicates":
                preds.append(Predicate(line))
            else:
                raise LexiconError(f"content before first section: {line!r}")
        return cls(tuple(names), tuple(pairs), tuple(preds))

    @classmethod
    def from_file(cls, path: str | Path) -> "Lexicon":
        return cls.from_text(Path(path).read_text(encoding="utf-8"))


_DEFAULT_NAMES = (
    "Jill", "Lily", "Bill", "Chris", "Marion", "Loretta",
    "Anna", "Tom", "Maria", "Peter", "Susan", "David",
)

_DEFAULT_PAIRS = (
    ("guilty", "innocent"),
    ("generous", "stingy"),
    ("hungry", "full"),
    ("rich", "poor"),
    ("strong", "weak"),
    ("awake", "asleep"),
)

_DEFAULT_PREDICATES = (
    "green", "blue", "loud", "careful", "empty", "gray", "clever", "tall",
    "boring", "tired", "small", "lonely", "brown", "big", "popular",
    "in need of money",
    "red", "yellow", "purple", "quiet", "calm", "brave", "shy", "proud",
    "curious", "friendly", "sleepy", "noisy", "gentle", "fierce",
    "polite", "cheerful", "stubborn", "patient", "witty", "graceful",
)


def default_lexicon() -> Lexicon:
    return Lexicon(
        names=_DEFAULT_NAMES,
        pairs=tuple((Predicate(a), Predicate(b)) for a, b in _DEFAULT_PAIRS),
        free_predicates=tuple(Predicate(s) for s in _DEFAULT_PREDICATES),
    )
