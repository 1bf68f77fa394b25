"""TLB and second-level dirty-flag model.

The TLB decides which accesses reach the page-table walker: only walks feed
the logging hardware. The model is a set-associative LRU cache keyed by the
guest physical page number, with the set index ``gppn mod n_sets``.

Dirty flags live in a per-page table that outlives TLB evictions, mirroring
the second-level page-table entry. A write to a page whose dirty flag is
clear always takes the walk path, even when a (clean) translation is
resident: hardware must update the in-memory flag, and that microwalk is
what write-logging hardware hooks. Such an access is classified as a Miss.
Once the flag is set, writes behave exactly like reads.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import ValidationError
from .trace import MemAccess, Op

# Outcome codes of Tlb.lookup_raw; kept as plain ints for the hot path.
TLB_HIT = 0
TLB_WALK = 1
TLB_WALK_DIRTY = 2


@dataclass(frozen=True)
class TlbConfig:
    """Geometry of a single vCPU's TLB. Defaults model a 4-way, 64-entry TLB."""

    entries: int = 64
    ways: int = 4
    replacement: str = "lru"

    def validate(self) -> None:
        if self.ways < 1:
            raise ValidationError("ways: must be >= 1")
        if self.entries < self.ways:
            raise ValidationError("entries: must be >= ways")
        if self.entries % self.ways != 0:
            raise ValidationError("entries: must be a multiple of ways")
        if self.replacement != "lru":
            raise ValidationError("replacement: only lru is implemented")

    @property
    def n_sets(self) -> int:
        return self.entries // self.ways


@dataclass(frozen=True)
class WalkEvent:
    """A page-table walk produced by a missing access.

    ``dirty_set`` is true iff this walk transitioned the page's dirty flag
    from clear to set, which requires a write.
    """

    access: MemAccess
    dirty_set: bool

    def __post_init__(self):
        if self.dirty_set and self.access.op is not Op.WRITE:
            raise ValidationError("dirty_set: only a write can set the dirty flag")


class Tlb:
    """Set-associative LRU TLB plus the per-page dirty-flag table."""

    __slots__ = ("config", "_n_sets", "_ways", "_sets", "_dirty", "hits", "misses")

    def __init__(self, config: TlbConfig = TlbConfig()):
        config.validate()
        self.config = config
        self._n_sets = config.n_sets
        self._ways = config.ways
        self._sets: list[OrderedDict[int, None]] = [OrderedDict() for _ in range(self._n_sets)]
        self._dirty: set[int] = set()
        self.hits = 0
        self.misses = 0

    def lookup_raw(self, gppn: int, is_write: bool) -> int:
        """Classify one access; returns TLB_HIT, TLB_WALK or TLB_WALK_DIRTY.

        Walk outcomes install (or refresh) the translation.
        """
        s = self._sets[gppn % self._n_sets]
        if is_write and gppn not in self._dirty:
            # Dirty-flag update: walk regardless of residency.
            self._dirty.add(gppn)
            if gppn in s:
                s.move_to_end(gppn)
            else:
                if len(s) == self._ways:
                    s.popitem(last=False)
                s[gppn] = None
            self.misses += 1
            return TLB_WALK_DIRTY
        if gppn in s:
            s.move_to_end(gppn)
            self.hits += 1
            return TLB_HIT
        if len(s) == self._ways:
            s.popitem(last=False)
        s[gppn] = None
        self.misses += 1
        return TLB_WALK

    def lookup(self, access: MemAccess) -> Optional[WalkEvent]:
        """Object-level variant of :meth:`lookup_raw`: None on hit, else the walk."""
        code = self.lookup_raw(access.gppn, access.op is Op.WRITE)
        if code == TLB_HIT:
            return None
        return WalkEvent(access=access, dirty_set=(code == TLB_WALK_DIRTY))

    def clear_dirty(self, pages: Iterable[int]) -> None:
        """Clear the dirty flags of ``pages`` and drop their translations.

        Dropping the translation forces the next write to re-walk, so the
        flag transition is observable again.
        """
        for gppn in pages:
            self._dirty.discard(gppn)
            s = self._sets[gppn % self._n_sets]
            s.pop(gppn, None)

    def dirty_pages(self) -> set[int]:
        return set(self._dirty)

    def resident(self, gppn: int) -> bool:
        return gppn in self._sets[gppn % self._n_sets]

    def occupancy(self) -> int:
        return sum(len(s) for s in self._sets)

    def set_sizes(self) -> list[int]:
        return [len(s) for s in self._sets]


__all__ = [
    "TLB_HIT",
    "TLB_WALK",
    "TLB_WALK_DIRTY",
    "TlbConfig",
    "WalkEvent",
    "Tlb",
]
