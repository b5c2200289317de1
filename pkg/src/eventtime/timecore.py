"""Day-granularity time anchors.

A day point is a :class:`datetime.date` or ``None`` (BLANK, an open bound).
A :class:`BoundPair` holds the earliest and latest possible day of one
endpoint; a :class:`TimeAnchor` holds the begin and end pairs.

Anchor strings follow the TBET annotation style::

    1998-01-26                              certain single day
    after1998-01-26before1998-02-06         uncertain single day
    begin:1998-01-01,end:after1998-02-06    multi-day
    ~                                       fully unknown endpoint
"""
from __future__ import annotations

import calendar
import datetime as dt
import enum
import re
from dataclasses import dataclass
from typing import Optional

DayPoint = Optional[dt.date]
BLANK: DayPoint = None


class AnchorParseError(ValueError):
    """Malformed anchor string; ``offset`` is the byte offset of the failure."""

    def __init__(self, text: str, offset: int, reason: str):
        self.text = text
        self.offset = offset
        self.reason = reason
        super().__init__(f"{reason} at offset {offset} in {text!r}")


class AnchorDateError(ValueError):
    """A syntactically valid date that does not exist on the calendar."""


class AnchorInvariantError(ValueError):
    pass


class NormalizationError(ValueError):
    def __init__(self, value: str, reason: str = "malformed TIMEX3 value"):
        self.value = value
        super().__init__(f"{reason}: {value!r}")


class Order(enum.Enum):
    BEFORE = "before"
    EQUAL = "equal"
    AFTER = "after"
    UNKNOWN = "unknown"


def compare_days(a: DayPoint, b: DayPoint) -> Order:
    if a is None or b is None:
        return Order.UNKNOWN
    if a < b:
        return Order.BEFORE
    if a > b:
        return Order.AFTER
    return Order.EQUAL


def _le(a: DayPoint, b: DayPoint) -> bool:
    return compare_days(a, b) in (Order.BEFORE, Order.EQUAL)


@dataclass(frozen=True)
class BoundPair:
    earliest: DayPoint
    latest: DayPoint

    def __post_init__(self):
        if self.earliest is not None and self.latest is not None and self.earliest > self.latest:
            raise AnchorInvariantError(f"earliest {self.earliest} after latest {self.latest}")

    @classmethod
    def day(cls, d: dt.date) -> "BoundPair":
        return cls(d, d)

    @property
    def is_certain(self) -> bool:
        return self.earliest is not None and self.earliest == self.latest


@dataclass(frozen=True)
class TimeAnchor:
    begin: BoundPair
    end: BoundPair

    def __post_init__(self):
        if self.begin.earliest is not None and self.end.earliest is not None and not _le(
            self.begin.earliest, self.end.earliest
        ):
            raise AnchorInvariantError("begin earliest after end earliest")
        if self.begin.latest is not None and self.end.latest is not None and not _le(
            self.begin.latest, self.end.latest
        ):
            raise AnchorInvariantError("begin latest after end latest")

    @classmethod
    def single_day(cls, d: dt.date) -> "TimeAnchor":
        p = BoundPair(d, d)
        return cls(p, p)

    @classmethod
    def span(cls, first: dt.date, last: dt.date) -> "TimeAnchor":
        """Certain multi-day anchor covering ``first`` through ``last`` inclusive."""
        return cls(BoundPair(first, first), BoundPair(last, last))

    @classmethod
    def from_days(cls, be: DayPoint, bl: DayPoint, ee: DayPoint, el: DayPoint) -> "TimeAnchor":
        return cls(BoundPair(be, bl), BoundPair(ee, el))

    def days(self) -> tuple[DayPoint, DayPoint, DayPoint, DayPoint]:
        return (self.begin.earliest, self.begin.latest, self.end.earliest, self.end.latest)

    @property
    def is_certain(self) -> bool:
        return self.begin.is_certain and self.end.is_certain

    @property
    def is_single_day(self) -> bool:
        return self.begin == self.end

    def __str__(self) -> str:
        return anchor_to_string(self)


# -- anchor string grammar -------------------------------------------------

_DATE_RE = re.compile(r"(\d{4})-(\d{2})-(\d{2})")
_SEP_RE = re.compile(r"[ ,]*")


def _make_date(y: int, m: int, d: int, text: str) -> dt.date:
    if y < 1:
        raise AnchorDateError(f"year {y} out of range in {text!r}")
    try:
        return dt.date(y, m, d)
    except ValueError as exc:
        raise AnchorDateError(f"invalid date {y:04d}-{m:02d}-{d:02d} in {text!r}") from exc


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, reason: str, pos: Optional[int] = None):
        raise AnchorParseError(self.text, self.pos if pos is None else pos, reason)

    def accept(self, literal: str) -> bool:
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def skip_sep(self):
        self.pos = _SEP_RE.match(self.text, self.pos).end()

    def date(self) -> dt.date:
        m = _DATE_RE.match(self.text, self.pos)
        if not m:
            self.error("expected YYYY-MM-DD")
        self.pos = m.end()
        return _make_date(int(m.group(1)), int(m.group(2)), int(m.group(3)), self.text)

    def pair(self) -> BoundPair:
        start = self.pos
        if self.accept("~"):
            return BoundPair(None, None)
        if self.accept("after"):
            lo = self.date()
            mark = self.pos
            self.skip_sep()
            if self.accept("before"):
                hi = self.date()
                if hi < lo:
                    self.error("after-bound later than before-bound", start)
                return BoundPair(lo, hi)
            self.pos = mark
            return BoundPair(lo, None)
        if self.accept("before"):
            return BoundPair(None, self.date())
        if _DATE_RE.match(self.text, self.pos):
            d = self.date()
            return BoundPair(d, d)
        self.error("expected date, 'after', 'before' or '~'")


def parse_anchor(text: str) -> TimeAnchor:
    """Parse an anchor string into a quadruple.

    ``afterX`` and ``beforeX`` are inclusive of X. Single-day forms set the
    begin and end pairs to the same value.
    """
    if not text.isascii():
        bad = next(i for i, ch in enumerate(text) if not ch.isascii())
        raise AnchorParseError(text, bad, "non-ASCII character")
    sc = _Scanner(text)
    if sc.accept("begin:"):
        begin = sc.pair()
        sc.skip_sep()
        if not sc.accept("end:"):
            sc.error("expected 'end:'")
        end = sc.pair()
    else:
        begin = end = sc.pair()
    if sc.pos != len(sc.text):
        sc.error("trailing characters")
    try:
        return TimeAnchor(begin, end)
    except AnchorInvariantError as exc:
        raise AnchorParseError(text, 0, str(exc)) from exc


def _pair_to_string(p: BoundPair) -> str:
    lo, hi = p.earliest, p.latest
    if lo is None and hi is None:
        return "~"
    if lo is None:
        return f"before{hi.isoformat()}"
    if hi is None:
        return f"after{lo.isoformat()}"
    if lo == hi:
        return lo.isoformat()
    return f"after{lo.isoformat()}before{hi.isoformat()}"


def anchor_to_string(anchor: TimeAnchor) -> str:
    if anchor.begin == anchor.end:
        return _pair_to_string(anchor.begin)
    return f"begin:{_pair_to_string(anchor.begin)},end:{_pair_to_string(anchor.end)}"


# -- TIMEX3 normalization --------------------------------------------------

_TIMEX_DAY = re.compile(r"^(\d{4})-(\d{2})-(\d{2})(T.*)?$")
_TIMEX_MONTH = re.compile(r"^(\d{4})-(\d{2})$")
_TIMEX_YEAR = re.compile(r"^(\d{4})$")
_TIMEX_WEEK = re.compile(r"^(\d{4})-W(\d{2})(-WE)?$")
_TIMEX_QUARTER = re.compile(r"^(\d{4})-Q([1-4])$")
_TIMEX_HALF = re.compile(r"^(\d{4})-H([12])$")
# Well-formed TIMEX3 values that have no fixed extent on the day axis
# (placeholders, seasons, decades, time-of-day without a date).
_TIMEX_UNRESOLVABLE = re.compile(
    r"^(?:[0-9X]{1,4}(?:-[0-9A-Z]{1,3}){0,2}(?:T[0-9A-Z:.]*)?|T[0-9A-Z:.]+)$"
)
_TIMEX_SHAPES = (_TIMEX_DAY, _TIMEX_MONTH, _TIMEX_YEAR, _TIMEX_WEEK, _TIMEX_QUARTER, _TIMEX_HALF)


def _month_end(y: int, m: int) -> dt.date:
    return dt.date(y, m, calendar.monthrange(y, m)[1])


def normalize_timex(value: str, type_: str = "DATE", dct: Optional[TimeAnchor] = None) -> Optional[TimeAnchor]:
    """Map a TIMEX3 ``value`` to an anchor, or ``None`` if it cannot be anchored.

    Coarse values become certain multi-day anchors spanning their calendar
    extent (ISO weeks run Monday to Sunday). Time-of-day suffixes are dropped.
    Durations, sets, PAST_REF/FUTURE_REF and values containing placeholders
    are not anchorable. Raises :class:`NormalizationError` for values that do
    not look like TIMEX3 at all or name impossible dates.
    """
    raw = value
    value = (value or "").strip()
    type_ = (type_ or "DATE").upper()
    if not value:
        raise NormalizationError(raw, "empty TIMEX3 value")
    if value == "PRESENT_REF":
        return dct
    if value in ("PAST_REF", "FUTURE_REF") or type_ in ("DURATION", "SET") or value.startswith("P"):
        return None
    try:
        if m := _TIMEX_DAY.match(value):
            return TimeAnchor.single_day(dt.date(int(m[1]), int(m[2]), int(m[3])))
        if m := _TIMEX_MONTH.match(value):
            y, mo = int(m[1]), int(m[2])
            return TimeAnchor.span(dt.date(y, mo, 1), _month_end(y, mo))
        if m := _TIMEX_YEAR.match(value):
            y = int(m[1])
            return TimeAnchor.span(dt.date(y, 1, 1), dt.date(y, 12, 31))
        if m := _TIMEX_WEEK.match(value):
            y, w = int(m[1]), int(m[2])
            if m[3]:
                return TimeAnchor.span(dt.date.fromisocalendar(y, w, 6), dt.date.fromisocalendar(y, w, 7))
            return TimeAnchor.span(dt.date.fromisocalendar(y, w, 1), dt.date.fromisocalendar(y, w, 7))
        if m := _TIMEX_QUARTER.match(value):
            y, q = int(m[1]), int(m[2])
            return TimeAnchor.span(dt.date(y, 3 * q - 2, 1), _month_end(y, 3 * q))
        if m := _TIMEX_HALF.match(value):
            y, h = int(m[1]), int(m[2])
            return TimeAnchor.span(dt.date(y, 6 * h - 5, 1), _month_end(y, 6 * h))
    except ValueError as exc:
        raise NormalizationError(raw, f"invalid calendar value ({exc})") from exc
    if _TIMEX_UNRESOLVABLE.match(value):
        return None
    raise NormalizationError(raw)
