"""Enumeration of labelled partitions of colored parameter sets.

Every sum in the action formulas, recurrences and scalar products runs over
assignments of each colored set into disjoint labelled subsets ``I, II, III``
with prescribed cardinalities.  One label per color (by default ``II``) takes
whatever is left over.

Order is deterministic: for each color, the subsets are chosen label by label
in the order ``I, II, III`` (skipping the remainder label) via
``itertools.combinations`` on element positions, so assignments come out
lexicographically by element index.  Colors are combined with the lowest color
varying slowest.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterator, Mapping, Sequence

LABELS = ("I", "II", "III")


class InfeasiblePartition(ValueError):
    """Requested subset cardinalities exceed the parent set."""


@dataclass(frozen=True)
class Split:
    """One color's assignment into labelled subsets."""

    I: tuple = ()
    II: tuple = ()
    III: tuple = ()

    def __getitem__(self, label: str) -> tuple:
        return getattr(self, label)

    def as_dict(self) -> dict:
        return {"I": list(self.I), "II": list(self.II), "III": list(self.III)}


def split_set(items: Sequence, sizes: Mapping[str, int], remainder: str = "II") -> Iterator[Split]:
    """Yield every split of ``items`` with ``|label| = sizes[label]``; ``remainder`` gets the rest."""
    items = tuple(items)
    fixed = [(lab, sizes.get(lab, 0)) for lab in LABELS if lab != remainder]
    if remainder in sizes:
        raise ValueError(f"remainder label {remainder!r} cannot carry a size")
    if any(k < 0 for _, k in fixed) or sum(k for _, k in fixed) > len(items):
        raise InfeasiblePartition(f"cannot split {len(items)} elements into sizes {dict(sizes)}")

    def rec(avail: tuple, k: int, acc: dict) -> Iterator[Split]:
        if k == len(fixed):
            acc = dict(acc)
            acc[remainder] = tuple(items[i] for i in avail)
            yield Split(**acc)
            return
        label, size = fixed[k]
        for chosen in itertools.combinations(avail, size):
            rest = tuple(i for i in avail if i not in chosen)
            acc[label] = tuple(items[i] for i in chosen)
            yield from rec(rest, k + 1, acc)
        acc.pop(label, None)

    yield from rec(tuple(range(len(items))), 0, {})


def count_splits(n: int, sizes: Mapping[str, int]) -> int:
    out, left = 1, n
    for k in sizes.values():
        out *= comb(left, k)
        left -= k
    return out


def is_feasible(sets: Mapping[int, Sequence], constraints: Mapping[int, Mapping[str, int]]) -> bool:
    return all(sum(constraints[c].values()) <= len(sets[c]) for c in constraints)


def enumerate_partitions(
    sets: Mapping[int, Sequence],
    constraints: Mapping[int, Mapping[str, int]],
    fixed: Mapping[int, Split] | None = None,
    remainder: str | Mapping[int, str] = "II",
) -> Iterator[dict]:
    """Stream assignments ``{color: Split}`` for every color in ``constraints``.

    ``fixed`` injects boundary pseudo-colors verbatim (they are not enumerated).
    Raises :class:`InfeasiblePartition` up front if any color cannot be split.
    """
    colors = sorted(constraints)
    for c in colors:
        if sum(constraints[c].values()) > len(sets[c]):
            raise InfeasiblePartition(f"color {c}: sizes {dict(constraints[c])} exceed |set| = {len(sets[c])}")
    base = dict(fixed or {})

    def rem(c: int) -> str:
        return remainder if isinstance(remainder, str) else remainder.get(c, "II")

    def rec(k: int, acc: dict) -> Iterator[dict]:
        if k == len(colors):
            yield dict(acc)
            return
        c = colors[k]
        for s in split_set(sets[c], constraints[c], rem(c)):
            acc[c] = s
            yield from rec(k + 1, acc)
        acc.pop(c, None)

    yield from rec(0, base)
