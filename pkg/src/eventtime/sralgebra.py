"""Sub-level relations (SRs) between two time anchors.

Each anchor has a begin and an end bound pair. Comparing the event's pairs
with the target's pairs gives four labels::

    sr1  event begin vs target begin
    sr2  event begin vs target end
    sr3  event end   vs target begin
    sr4  event end   vs target end
"""
from __future__ import annotations

import enum
from typing import NamedTuple, Sequence

from .timecore import BoundPair, TimeAnchor


class SRLabel(str, enum.Enum):
    # declaration order is the argmax tie-break order
    EQUAL = "equal"
    AFTER = "after"
    BEFORE = "before"
    VAGUE = "vague"

    def inverse(self) -> "SRLabel":
        return _INVERSE[self]

    def __str__(self) -> str:
        return self.value


_INVERSE = {
    SRLabel.EQUAL: SRLabel.EQUAL,
    SRLabel.AFTER: SRLabel.BEFORE,
    SRLabel.BEFORE: SRLabel.AFTER,
    SRLabel.VAGUE: SRLabel.VAGUE,
}
LABELS: tuple[SRLabel, ...] = tuple(SRLabel)
LABEL_INDEX = {lab: i for i, lab in enumerate(LABELS)}


class SRVector(NamedTuple):
    sr1: SRLabel
    sr2: SRLabel
    sr3: SRLabel
    sr4: SRLabel

    @classmethod
    def parse(cls, items: Sequence[str]) -> "SRVector":
        if len(items) != 4:
            raise ValueError(f"SR vector needs 4 labels, got {len(items)}")
        return cls(*(SRLabel(str(x).lower()) for x in items))

    def to_list(self) -> list[str]:
        return [lab.value for lab in self]

    def indices(self) -> list[int]:
        return [LABEL_INDEX[lab] for lab in self]


def compare_pairs(e: BoundPair, t: BoundPair) -> SRLabel:
    """Label the event pair ``e`` relative to the target pair ``t``.

    Rules are tried in the order equal, after, before. A comparison that
    touches a BLANK bound is false, except for the explicit event-side BLANK
    allowances in the after and before rules.
    """
    ee, el, te, tl = e.earliest, e.latest, t.earliest, t.latest
    if None not in (ee, el, te, tl) and ee == te and el == tl:
        return SRLabel.EQUAL
    if ee is not None and tl is not None and ee >= tl and (el is None or el > tl):
        return SRLabel.AFTER
    if el is not None and te is not None and el <= te and (ee is None or ee < te):
        return SRLabel.BEFORE
    return SRLabel.VAGUE


def induce_sr(event: TimeAnchor, target: TimeAnchor) -> SRVector:
    return SRVector(
        compare_pairs(event.begin, target.begin),
        compare_pairs(event.begin, target.end),
        compare_pairs(event.end, target.begin),
        compare_pairs(event.end, target.end),
    )


class AllenRelation(str, enum.Enum):
    BEFORE = "before"
    AFTER = "after"
    MEETS = "meets"
    MET_BY = "met-by"
    OVERLAPS = "overlaps"
    OVERLAPPED_BY = "overlapped-by"
    STARTS = "starts"
    STARTED_BY = "started-by"
    DURING = "during"
    CONTAINS = "contains"
    FINISHES = "finishes"
    FINISHED_BY = "finished-by"
    EQUALS = "equals"


class NotCertainError(ValueError):
    pass


def _interval(anchor: TimeAnchor, name: str):
    if not anchor.is_certain:
        raise NotCertainError(f"{name} anchor {anchor} is not certain")
    return anchor.begin.earliest, anchor.end.earliest


def allen_of(event: TimeAnchor, target: TimeAnchor) -> AllenRelation:
    """Allen relation of two certain anchors, read as closed day intervals.

    Checks run equals, before/after, meets/met-by, starts/started-by,
    finishes/finished-by, then overlap and containment, so a one-day
    interval touching an endpoint of the other resolves to the earliest
    matching relation in that order.
    """
    s1, e1 = _interval(event, "event")
    s2, e2 = _interval(target, "target")
    R = AllenRelation
    if s1 == s2 and e1 == e2:
        return R.EQUALS
    if e1 < s2:
        return R.BEFORE
    if s1 > e2:
        return R.AFTER
    if e1 == s2:
        return R.MEETS
    if s1 == e2:
        return R.MET_BY
    if s1 == s2:
        return R.STARTS if e1 < e2 else R.STARTED_BY
    if e1 == e2:
        return R.FINISHES if s1 > s2 else R.FINISHED_BY
    if s1 < s2:
        return R.OVERLAPS if e1 < e2 else R.CONTAINS
    return R.DURING if e1 < e2 else R.OVERLAPPED_BY
