"""Labeled feature partitions: canonical types, enumeration, order relations.

A feature partition splits the feature index set into non-empty disjoint
blocks, each labeled *good* (jointly class-distinct) or *bad* (identical
across classes).  Partitions with no good blocks or no bad blocks are
permitted.  Canonical form orders the blocks of each label by their
minimum element, which makes partitions hashable dictionary keys and
gives the enumerator a deterministic output order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

from .errors import CapExceededError, InputError, InvalidPartitionError, UniverseMismatchError

DEFAULT_ENUMERATION_CAP = 12


@dataclass(frozen=True)
class FeatureSet:
    """An ordered set of 0-based feature indices (ascending, no duplicates)."""

    indices: tuple[int, ...] = ()

    def __post_init__(self):
        for a, b in zip(self.indices, self.indices[1:]):
            if a >= b:
                raise InputError(f"feature indices must be strictly ascending, got {self.indices}")
        if self.indices and self.indices[0] < 0:
            raise InputError(f"feature indices must be non-negative, got {self.indices}")

    @classmethod
    def of(cls, items: Iterable[int]) -> "FeatureSet":
        return cls(tuple(sorted(set(int(i) for i in items))))

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, item) -> bool:
        return item in self.indices

    def __bool__(self) -> bool:
        return bool(self.indices)

    def issubset(self, other: "FeatureSet") -> bool:
        members = set(other.indices)
        return all(i in members for i in self.indices)

    def union(self, other: "FeatureSet") -> "FeatureSet":
        return FeatureSet.of(self.indices + other.indices)

    def __str__(self) -> str:
        return "{" + ",".join(str(i) for i in self.indices) + "}"


@dataclass(frozen=True)
class FeaturePartition:
    """An ordered pair of good and bad block lists.

    Construct through :meth:`of`, which canonicalizes block order.  The
    type itself permits structurally broken partitions (overlapping or
    non-covering blocks) so that :func:`validate_partition` can describe
    the defect; every other operation assumes a valid canonical value.
    """

    good_blocks: tuple[FeatureSet, ...] = ()
    bad_blocks: tuple[FeatureSet, ...] = ()

    @classmethod
    def of(cls, good: Iterable[Iterable[int]], bad: Iterable[Iterable[int]]) -> "FeaturePartition":
        g = tuple(sorted((FeatureSet.of(b) for b in good), key=lambda s: s.indices))
        b = tuple(sorted((FeatureSet.of(b) for b in bad), key=lambda s: s.indices))
        return cls(g, b)

    @property
    def blocks(self) -> tuple[FeatureSet, ...]:
        return self.good_blocks + self.bad_blocks

    @property
    def universe(self) -> FeatureSet:
        return FeatureSet.of(i for block in self.blocks for i in block)

    @property
    def good_set(self) -> FeatureSet:
        return FeatureSet.of(i for block in self.good_blocks for i in block)

    def __str__(self) -> str:
        return format_partition(self)


@dataclass(frozen=True)
class PartitionViolation:
    """First defect found while validating a partition against a universe."""

    kind: str  # "empty-block" | "duplicate-feature" | "foreign-feature" | "missing-feature"
    message: str


def validate_partition(partition: FeaturePartition, universe: FeatureSet) -> PartitionViolation | None:
    """Check that blocks are non-empty, disjoint, and cover ``universe``.

    Returns ``None`` when the partition is valid, otherwise the first
    violation in scan order (good blocks before bad blocks).
    """
    seen: dict[int, str] = {}
    for label, blocks in (("good", partition.good_blocks), ("bad", partition.bad_blocks)):
        for pos, block in enumerate(blocks):
            where = f"{label} block #{pos}"
            if len(block) == 0:
                return PartitionViolation("empty-block", f"{where} is empty")
            for f in block:
                if f in seen:
                    return PartitionViolation(
                        "duplicate-feature",
                        f"feature {f} appears in both {seen[f]} and {where}",
                    )
                seen[f] = where
    for f in seen:
        if f not in universe:
            return PartitionViolation(
                "foreign-feature", f"feature {f} ({seen[f]}) is not in the universe {universe}"
            )
    for f in universe:
        if f not in seen:
            return PartitionViolation("missing-feature", f"feature {f} is not covered by any block")
    return None


def require_valid(partition: FeaturePartition, universe: FeatureSet) -> None:
    violation = validate_partition(partition, universe)
    if violation is not None:
        raise InvalidPartitionError(violation.message)


@lru_cache(maxsize=None)
def _stirling2(n: int, k: int) -> int:
    if n == 0:
        return 1 if k == 0 else 0
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


def count_partitions(num_features: int) -> int:
    """Number of labeled partitions of ``num_features`` features.

    Each set partition into k blocks yields 2**k labelings, so the total
    is sum_k S(n, k) * 2**k with S the Stirling numbers of the second kind.
    """
    if num_features < 0:
        raise InputError("num_features must be non-negative")
    return sum(_stirling2(num_features, k) << k for k in range(num_features + 1))


def iter_set_partition_blocks(ids: tuple[int, ...]) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Yield each set partition of ``ids`` as a tuple of blocks.

    Iterates restricted growth strings in lexicographic order.  Blocks are
    emitted in order of first occurrence, which equals min-element order,
    so downstream consumers never re-sort.
    """
    n = len(ids)
    if n == 0:
        return
    codes = [0] * n
    maxes = [0] * n  # maxes[i] = max(codes[:i]); entry 0 is unused
    while True:
        nblocks = (maxes[n - 1] if n > 1 else 0)
        nblocks = max(nblocks, codes[n - 1]) + 1
        blocks: list[list[int]] = [[] for _ in range(nblocks)]
        for pos, c in enumerate(codes):
            blocks[c].append(ids[pos])
        yield tuple(tuple(b) for b in blocks)
        i = n - 1
        while i > 0 and codes[i] > maxes[i]:
            i -= 1
        if i == 0:
            return
        codes[i] += 1
        peak = max(maxes[i], codes[i])
        for j in range(i + 1, n):
            codes[j] = 0
            maxes[j] = peak


def enumerate_partitions(
    universe: FeatureSet, cap: int = DEFAULT_ENUMERATION_CAP
) -> Iterator[FeaturePartition]:
    """Yield every labeled partition of ``universe`` exactly once.

    Order is deterministic: set partitions in restricted-growth order, and
    for each set partition all 2**k good/bad labelings by ascending label
    bitmask (bit i marks block i good).  Refuses universes larger than
    ``cap`` (default 12, about 2.8e7 labeled partitions) to bound time and
    memory.
    """
    n = len(universe)
    if n < 1:
        raise InputError("universe must contain at least one feature")
    if n > cap:
        raise CapExceededError(
            f"universe has {n} features, above the enumeration cap of {cap} "
            f"({count_partitions(n)} labeled partitions)"
        )
    for blocks in iter_set_partition_blocks(universe.indices):
        k = len(blocks)
        sets = tuple(FeatureSet(b) for b in blocks)
        for mask in range(1 << k):
            good = tuple(sets[i] for i in range(k) if (mask >> i) & 1)
            bad = tuple(sets[i] for i in range(k) if not (mask >> i) & 1)
            yield FeaturePartition(good, bad)


def _same_universe(p1: FeaturePartition, p2: FeaturePartition) -> None:
    if p1.universe != p2.universe:
        raise UniverseMismatchError(
            f"partitions cover different universes: {p1.universe} vs {p2.universe}"
        )


def is_mesh(p1: FeaturePartition, p2: FeaturePartition) -> bool:
    """True iff every block of ``p1`` (either label) lies inside a block of ``p2``."""
    _same_universe(p1, p2)
    owner: dict[int, int] = {}
    for bid, block in enumerate(p2.blocks):
        for f in block:
            owner[f] = bid
    for block in p1.blocks:
        owners = {owner[f] for f in block}
        if len(owners) != 1:
            return False
    return True


def is_refinement(p1: FeaturePartition, p2: FeaturePartition, strict: bool = False) -> bool:
    """True iff good blocks of ``p1`` nest in good blocks of ``p2`` and bad in bad.

    With ``strict=True`` additionally requires ``p1 != p2``.
    """
    _same_universe(p1, p2)
    if strict and p1 == p2:
        return False
    for own_blocks, other_blocks in (
        (p1.good_blocks, p2.good_blocks),
        (p1.bad_blocks, p2.bad_blocks),
    ):
        owner: dict[int, int] = {}
        for bid, block in enumerate(other_blocks):
            for f in block:
                owner[f] = bid
        for block in own_blocks:
            owners = set()
            for f in block:
                if f not in owner:
                    return False
                owners.add(owner[f])
            if len(owners) != 1:
                return False
    return True


# Literal syntax: good blocks before the semicolon, e.g. "G:{0,1}|G:{3};B:{2}|B:{4,5}".
_BLOCK_RE = re.compile(r"^([GB]):\{(\d+(?:,\d+)*)\}$")


def format_partition(partition: FeaturePartition) -> str:
    good = "|".join(f"G:{block}" for block in partition.good_blocks)
    bad = "|".join(f"B:{block}" for block in partition.bad_blocks)
    return f"{good};{bad}"


def parse_partition(text: str) -> FeaturePartition:
    """Parse the partition literal syntax; round-trips bit-exactly with the printer."""
    if text.count(";") != 1:
        raise InputError(f"partition literal must contain exactly one ';': {text!r}")
    good_text, bad_text = text.split(";")
    good: list[tuple[int, ...]] = []
    bad: list[tuple[int, ...]] = []
    for part_text, expected, target in ((good_text, "G", good), (bad_text, "B", bad)):
        if not part_text:
            continue
        for chunk in part_text.split("|"):
            m = _BLOCK_RE.match(chunk)
            if m is None:
                raise InputError(f"malformed block {chunk!r} in partition literal {text!r}")
            if m.group(1) != expected:
                raise InputError(
                    f"block {chunk!r} has label {m.group(1)} on the {expected} side of {text!r}"
                )
            target.append(tuple(int(t) for t in m.group(2).split(",")))
    return FeaturePartition.of(good, bad)
