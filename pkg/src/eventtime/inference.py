"""Infer an event's quadruple from SR vectors against the DCT and nearby timexes.

Clues are applied in priority order: DCT first, then timexes by sentence
distance, ties broken by document order. ``equal`` narrows the event pair to
the target pair (a plain copy from the open state), ``after`` raises the
earliest bound, ``before`` lowers the latest bound. A clue that would leave
the quadruple inconsistent is dropped for that index and counted. An
``equal`` against the DCT locks that SR index for the rest of the fold.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .corpus import E_D, LinkInstance
from .sralgebra import SRLabel, SRVector
from .timecore import DayPoint, TimeAnchor, anchor_to_string

DCT_SOURCE = "DCT"

# SR index -> (event pair, target pair); 0 = begin, 1 = end
_SR_PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class TimeClue:
    source: str
    target_anchor: TimeAnchor
    sr: SRVector
    distance: int = 0
    order: int = -1

    @property
    def is_dct(self) -> bool:
        return self.source == DCT_SOURCE

    @property
    def rank(self) -> tuple[int, int, int]:
        return (0, 0, 0) if self.is_dct else (1, self.distance, self.order)


@dataclass(frozen=True)
class AnchorState:
    days: tuple[DayPoint, DayPoint, DayPoint, DayPoint] = (None, None, None, None)
    locked: tuple[bool, bool, bool, bool] = (False, False, False, False)
    conflicts: int = 0

    def anchor(self) -> TimeAnchor:
        return TimeAnchor.from_days(*self.days)


def _max_lo(a: DayPoint, b: DayPoint) -> DayPoint:
    # earliest bounds: BLANK is -inf
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def _min_hi(a: DayPoint, b: DayPoint) -> DayPoint:
    # latest bounds: BLANK is +inf
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _consistent(days) -> bool:
    """True when the quadruple satisfies the pair and cross-pair orderings."""
    be, bl, ee, el = days
    # the last pair: an event cannot begin after it has certainly ended
    for lo, hi in ((be, bl), (ee, el), (be, ee), (bl, el), (be, el)):
        if lo is not None and hi is not None and lo > hi:
            return False
    return True


def apply_clue(state: AnchorState, clue: TimeClue) -> AnchorState:
    target = (clue.target_anchor.begin, clue.target_anchor.end)
    days = list(state.days)
    locked = list(state.locked)
    conflicts = state.conflicts
    for i, label in enumerate(clue.sr):
        if locked[i]:
            continue
        ev, tg = _SR_PAIRS[i]
        q = target[tg]
        lo, hi = days[2 * ev], days[2 * ev + 1]
        if label == SRLabel.EQUAL:
            # from an open state this is a copy; otherwise it may only narrow
            lo, hi = _max_lo(lo, q.earliest), _min_hi(hi, q.latest)
        elif label == SRLabel.AFTER:
            lo = _max_lo(lo, q.latest)
        elif label == SRLabel.BEFORE:
            hi = _min_hi(hi, q.earliest)
        if (lo, hi) != (days[2 * ev], days[2 * ev + 1]):
            trial = list(days)
            trial[2 * ev], trial[2 * ev + 1] = lo, hi
            if _consistent(trial):
                days = trial
            else:
                conflicts += 1
        if clue.is_dct and label == SRLabel.EQUAL:
            locked[i] = True
    return AnchorState(tuple(days), tuple(locked), conflicts)


@dataclass
class InferenceResult:
    anchor: TimeAnchor
    clues: int
    conflicts: int


def infer_event(clues: Iterable[TimeClue]) -> InferenceResult:
    """Fold ``apply_clue`` over the clues in priority order from an all-BLANK state."""
    ordered = sorted(clues, key=lambda c: c.rank)
    state = AnchorState()
    for clue in ordered:
        state = apply_clue(state, clue)
    return InferenceResult(state.anchor(), len(ordered), state.conflicts)


def clue_from_link(link: LinkInstance, sr: SRVector) -> TimeClue:
    if link.kind == E_D:
        return TimeClue(DCT_SOURCE, link.target_anchor, sr)
    return TimeClue(link.target, link.target_anchor, sr, link.sentence_distance, link.target_offset)


@dataclass
class EventInference:
    doc: str
    eid: str
    inferred: TimeAnchor
    gold: Optional[TimeAnchor]
    anchorable: bool
    clues: int
    conflicts: int

    def to_json(self) -> dict:
        return {
            "doc": self.doc,
            "eid": self.eid,
            "inferred": anchor_to_string(self.inferred),
            "gold": anchor_to_string(self.gold) if self.gold else None,
            "anchorable": self.anchorable,
            "clues": self.clues,
            "conflicts": self.conflicts,
        }


def infer_from_links(links: Sequence[LinkInstance], srs: Sequence[Optional[SRVector]],
                     max_distance: Optional[int] = None, kinds: Optional[set[str]] = None) -> list[EventInference]:
    """Group links by event and infer each event's anchor.

    ``srs[i]`` is the SR vector for ``links[i]`` (gold or predicted); links
    whose SR is None, whose kind is not in ``kinds`` or whose sentence
    distance exceeds ``max_distance`` contribute no clue. Events keep their
    first-seen order.
    """
    if len(links) != len(srs):
        raise ValueError("links and SR vectors differ in length")
    groups: dict[tuple[str, str], list[TimeClue]] = {}
    meta: dict[tuple[str, str], LinkInstance] = {}
    for link, sr in zip(links, srs):
        key = (link.doc, link.event)
        groups.setdefault(key, [])
        meta.setdefault(key, link)
        if sr is None or (kinds is not None and link.kind not in kinds):
            continue
        if max_distance is not None and link.kind != E_D and link.sentence_distance > max_distance:
            continue
        groups[key].append(clue_from_link(link, sr))
    out = []
    for key, clues in groups.items():
        res = infer_event(clues)
        first = meta[key]
        out.append(EventInference(key[0], key[1], res.anchor, first.event_anchor, first.event_anchorable,
                                  res.clues, res.conflicts))
    return out

