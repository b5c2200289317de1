"""Document model, TimeML/JSON ingestion and SR-labeled link generation."""
from __future__ import annotations

import dataclasses
import json
import logging
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .sralgebra import SRVector, induce_sr
from .timecore import (
    NormalizationError,
    TimeAnchor,
    anchor_to_string,
    normalize_timex,
    parse_anchor,
)

log = logging.getLogger(__name__)

E_D = "E-D"
E_T = "E-T"
LINK_KINDS = (E_D, E_T)
NOT_ANCHORABLE = "NOT_ANCHORABLE"
DCT_REF = "DCT"


class CorpusError(ValueError):
    pass


@dataclass
class EventMention:
    eid: str
    sentence: int
    start: int
    end: int  # exclusive
    gold_anchor: Optional[TimeAnchor] = None
    anchorable: bool = True
    eiids: tuple[str, ...] = ()

    def head(self, which: str = "last") -> int:
        return self.start if which == "first" else self.end - 1


@dataclass
class TimexMention:
    tid: str
    sentence: int
    start: int
    end: int
    value: str
    type: str = "DATE"
    anchor: Optional[TimeAnchor] = None

    def head(self, which: str = "last") -> int:
        return self.start if which == "first" else self.end - 1


@dataclass
class Document:
    id: str
    dct: TimeAnchor
    sentences: list[list[str]]
    events: list[EventMention] = field(default_factory=list)
    timexes: list[TimexMention] = field(default_factory=list)

    def __post_init__(self):
        if not (self.dct.is_certain and self.dct.is_single_day):
            raise CorpusError(f"{self.id}: DCT {self.dct} is not a certain single day")
        for m in [*self.events, *self.timexes]:
            ok = 0 <= m.sentence < len(self.sentences) and 0 <= m.start < m.end <= len(self.sentences[m.sentence])
            if not ok:
                name = getattr(m, "eid", None) or getattr(m, "tid", "?")
                raise CorpusError(f"{self.id}: mention {name} span outside document")

    def event(self, key: str) -> Optional[EventMention]:
        for ev in self.events:
            if ev.eid == key or key in ev.eiids:
                return ev
        return None


@dataclass
class LinkInstance:
    kind: str
    doc: str
    event: str
    target: str
    sentence_distance: int
    tokens: list[str]
    event_position: int
    target_anchor: TimeAnchor
    timex_position: Optional[int] = None
    signed_distance: int = 0
    target_offset: int = -1  # timex token offset in the document; -1 for DCT
    gold: Optional[SRVector] = None
    event_anchor: Optional[TimeAnchor] = None
    event_anchorable: bool = True

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "doc": self.doc,
            "event": self.event,
            "target": self.target,
            "sentence_distance": self.sentence_distance,
            "signed_distance": self.signed_distance,
            "target_offset": self.target_offset,
            "tokens": self.tokens,
            "event_position": self.event_position,
            "timex_position": self.timex_position,
            "target_anchor": anchor_to_string(self.target_anchor),
            "gold": self.gold.to_list() if self.gold else None,
            "event_anchor": anchor_to_string(self.event_anchor) if self.event_anchor else None,
            "event_anchorable": self.event_anchorable,
        }

    @classmethod
    def from_json(cls, rec: dict) -> "LinkInstance":
        return cls(
            kind=rec["kind"],
            doc=rec["doc"],
            event=rec["event"],
            target=rec["target"],
            sentence_distance=int(rec["sentence_distance"]),
            signed_distance=int(rec.get("signed_distance", 0)),
            target_offset=int(rec.get("target_offset", -1)),
            tokens=list(rec["tokens"]),
            event_position=int(rec["event_position"]),
            timex_position=rec.get("timex_position"),
            target_anchor=parse_anchor(rec["target_anchor"]),
            gold=SRVector.parse(rec["gold"]) if rec.get("gold") else None,
            event_anchor=parse_anchor(rec["event_anchor"]) if rec.get("event_anchor") else None,
            event_anchorable=bool(rec.get("event_anchorable", True)),
        )


# -- tokenization ------------------------------------------------------------

_ABBREV = r"(?:Mr|Mrs|Ms|Dr|Jr|Sr|St|Inc|Corp|Co|Ltd|Gen|Sen|Rep|Gov|Jan|Feb|Mar|Apr|Aug|Sept|Sep|Oct|Nov|Dec|No|U\.S)\."
_TOKEN_RE = re.compile(
    _ABBREV + r"|(?:[A-Za-z]\.){2,}|\d+(?:[.,:/]\d+)*|\w+(?:[-'’]\w+)*|[^\w\s]"
)
_TERMINATORS = {".", "!", "?"}
_CLOSERS = {'"', "''", "'", ")", "”"}


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text)


def split_sentences(tokens: list[str], protected: set[int] = frozenset()) -> list[int]:
    """Indices at which new sentences start (excluding 0).

    A sentence ends after ., ! or ? plus any closing quotes or brackets.
    ``protected`` indices (tokens inside mentions) never end a sentence.
    """
    starts = []
    i = 0
    while i < len(tokens):
        if tokens[i] in _TERMINATORS and i not in protected:
            j = i + 1
            while j < len(tokens) and tokens[j] in _CLOSERS:
                j += 1
            if j < len(tokens):
                starts.append(j)
            i = j
        else:
            i += 1
    return starts


# -- TimeML ------------------------------------------------------------------

_DCT_FUNCTIONS = {"CREATION_TIME", "PUBLICATION_TIME"}


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_timeml(xml_text: str, doc_id: Optional[str] = None) -> Document:
    """Build a :class:`Document` from TimeML markup.

    Sentences come from ``<s>`` elements when present, otherwise from a
    punctuation-based splitter. Raises :class:`CorpusError` on malformed XML
    or a missing creation-time TIMEX3.
    """
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise CorpusError(f"{doc_id or '<document>'}: malformed XML ({exc})") from exc

    for el in root.iter():
        if _local(el.tag) in ("DOCID", "DOCNO") and (el.text or "").strip():
            doc_id = el.text.strip()
            break
    doc_id = doc_id or "doc"

    dct_el = None
    for el in root.iter():
        if _local(el.tag) == "TIMEX3" and el.get("functionInDocument") in _DCT_FUNCTIONS:
            dct_el = el
            break
    if dct_el is None:
        raise CorpusError(f"{doc_id}: no TIMEX3 with functionInDocument=CREATION_TIME")
    try:
        dct = normalize_timex(dct_el.get("value", ""), dct_el.get("type", "DATE"))
    except NormalizationError as exc:
        raise CorpusError(f"{doc_id}: bad DCT value ({exc})") from exc
    if dct is None or not dct.is_single_day or not dct.is_certain:
        raise CorpusError(f"{doc_id}: DCT {dct_el.get('value')!r} is not a single day")

    text_el = next((el for el in root.iter() if _local(el.tag) == "TEXT"), None)
    if text_el is None:
        raise CorpusError(f"{doc_id}: no TEXT element")

    tokens: list[str] = []
    breaks: set[int] = set()
    mentions: list[tuple[str, dict, int, int]] = []
    has_s = any(_local(el.tag) == "s" for el in text_el.iter())

    def emit(text: Optional[str]):
        if text:
            tokens.extend(tokenize(text))

    def walk(el):
        emit(el.text)
        for child in el:
            tag = _local(child.tag)
            if tag in ("EVENT", "TIMEX3") and child is not dct_el:
                start = len(tokens)
                emit("".join(child.itertext()))
                if len(tokens) > start:
                    mentions.append((tag, dict(child.attrib), start, len(tokens)))
                else:
                    log.warning("%s: empty %s mention %s skipped", doc_id, tag, child.attrib)
            elif tag == "s":
                breaks.add(len(tokens))
                walk(child)
                breaks.add(len(tokens))
            elif child is dct_el:
                pass
            else:
                walk(child)
            emit(child.tail)

    walk(text_el)

    if has_s:
        starts = sorted(b for b in breaks if 0 < b < len(tokens))
    else:
        protected = {i for _, _, s, e in mentions for i in range(s, e - 1)}
        starts = split_sentences(tokens, protected)
    bounds = [0, *starts, len(tokens)]
    sentences = [tokens[a:b] for a, b in zip(bounds, bounds[1:]) if b > a]
    sent_starts = [a for a, b in zip(bounds, bounds[1:]) if b > a]

    def locate(start: int, end: int) -> tuple[int, int, int]:
        for si in range(len(sent_starts) - 1, -1, -1):
            if sent_starts[si] <= start:
                base = sent_starts[si]
                # a mention crossing a sentence boundary is clipped to its first sentence
                return si, start - base, min(end, base + len(sentences[si])) - base
        raise CorpusError(f"{doc_id}: mention outside text")

    eiids: dict[str, list[str]] = {}
    for el in root.iter():
        if _local(el.tag) == "MAKEINSTANCE" and el.get("eventID") and el.get("eiid"):
            eiids.setdefault(el.get("eventID"), []).append(el.get("eiid"))

    events, timexes = [], []
    for tag, attrs, s, e in mentions:
        si, a, b = locate(s, e)
        if tag == "EVENT":
            eid = attrs.get("eid") or attrs.get("id")
            events.append(EventMention(eid, si, a, b, eiids=tuple(eiids.get(eid, ()))))
        else:
            value, type_ = attrs.get("value", ""), attrs.get("type", "DATE")
            try:
                anchor = normalize_timex(value, type_, dct)
            except NormalizationError as exc:
                log.warning("%s: timex %s not anchorable (%s)", doc_id, attrs.get("tid"), exc)
                anchor = None
            timexes.append(TimexMention(attrs.get("tid", f"t{len(timexes)}"), si, a, b, value, type_, anchor))
    return Document(doc_id, dct, sentences, events, timexes)


# -- JSON documents ------------------------------------------------------------

def document_from_json(rec: dict) -> Document:
    dct = parse_anchor(rec["dct"])
    events = []
    for ev in rec.get("events", []):
        raw = ev.get("anchor")
        events.append(
            EventMention(
                ev["eid"], int(ev["sentence"]), int(ev["start"]), int(ev["end"]),
                gold_anchor=parse_anchor(raw) if raw and raw != NOT_ANCHORABLE else None,
                anchorable=raw != NOT_ANCHORABLE,
            )
        )
    timexes = []
    for tx in rec.get("timexes", []):
        value, type_ = tx["value"], tx.get("type", "DATE")
        timexes.append(
            TimexMention(tx["tid"], int(tx["sentence"]), int(tx["start"]), int(tx["end"]), value, type_,
                         normalize_timex(value, type_, dct))
        )
    return Document(rec["id"], dct, [list(s) for s in rec["sentences"]], events, timexes)


def document_to_json(doc: Document) -> dict:
    def ev_anchor(ev: EventMention):
        if not ev.anchorable:
            return NOT_ANCHORABLE
        return anchor_to_string(ev.gold_anchor) if ev.gold_anchor else None

    return {
        "id": doc.id,
        "dct": anchor_to_string(doc.dct),
        "sentences": doc.sentences,
        "events": [
            {"eid": ev.eid, "sentence": ev.sentence, "start": ev.start, "end": ev.end, "anchor": ev_anchor(ev)}
            for ev in doc.events
        ],
        "timexes": [
            {"tid": tx.tid, "sentence": tx.sentence, "start": tx.start, "end": tx.end,
             "value": tx.value, "type": tx.type}
            for tx in doc.timexes
        ],
    }


def load_documents(paths: Iterable[str | Path]) -> list[Document]:
    """Load ``.tml``/``.xml`` and ``.json`` documents from files or directories.

    Results are sorted by document id.
    """
    files: list[Path] = []
    for p in map(Path, paths):
        if p.is_dir():
            files.extend(sorted(f for f in p.rglob("*") if f.suffix.lower() in (".tml", ".xml", ".json")))
        elif p.exists():
            files.append(p)
        else:
            raise CorpusError(f"corpus path not found: {p}")
    docs = []
    for f in files:
        text = f.read_text(encoding="utf-8")
        try:
            if f.suffix.lower() == ".json":
                docs.append(document_from_json(json.loads(text)))
            else:
                docs.append(parse_timeml(text, doc_id=f.stem))
        except (ValueError, KeyError) as exc:
            raise CorpusError(f"{f}: {exc}") from exc
    ids = [d.id for d in docs]
    if len(set(ids)) != len(ids):
        raise CorpusError("duplicate document ids in corpus")
    return sorted(docs, key=lambda d: d.id)


# -- event-time annotations ------------------------------------------------------

@dataclass
class LoadDiagnostics:
    skipped: list[tuple[int, str]] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.skipped)


def read_event_times(table_text: str) -> dict[str, list[tuple[int, str, str]]]:
    """Group TSV rows ``doc_id, eid, anchor`` by document id."""
    rows: dict[str, list[tuple[int, str, str]]] = {}
    for lineno, line in enumerate(table_text.splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.rstrip("\r\n").split("\t")
        if len(parts) < 3:
            raise CorpusError(f"line {lineno}: expected 3 tab-separated fields")
        rows.setdefault(parts[0].strip(), []).append((lineno, parts[1].strip(), parts[2].strip()))
    return rows


def load_event_times(table_text: str, doc: Document, diagnostics: Optional[LoadDiagnostics] = None) -> Document:
    """Return a copy of ``doc`` with gold anchors from the TSV rows for this document.

    Rows naming an unknown event are skipped with a warning; an unparseable
    anchor raises.
    """
    rows = read_event_times(table_text).get(doc.id, [])
    return _apply_event_times(doc, rows, diagnostics)


def _apply_event_times(doc, rows, diagnostics=None) -> Document:
    events = [dataclasses.replace(ev) for ev in doc.events]
    out = dataclasses.replace(doc, events=events)
    for lineno, eid, raw in rows:
        ev = out.event(eid)
        if ev is None:
            log.warning("%s line %d: unknown event %s skipped", doc.id, lineno, eid)
            if diagnostics is not None:
                diagnostics.skipped.append((lineno, f"unknown event {eid}"))
            continue
        if raw == NOT_ANCHORABLE:
            ev.gold_anchor, ev.anchorable = None, False
        else:
            ev.gold_anchor, ev.anchorable = parse_anchor(raw), True
    return out


def attach_event_times(docs: list[Document], table_text: str,
                       diagnostics: Optional[LoadDiagnostics] = None) -> list[Document]:
    rows = read_event_times(table_text)
    return [_apply_event_times(d, rows.get(d.id, []), diagnostics) for d in docs]


# -- link generation -------------------------------------------------------------

def generate_links(doc: Document, sw: int, head: str = "last") -> list[LinkInstance]:
    """One E-D link per event plus E-T links to anchorable timexes within ``sw`` sentences.

    E-T links for an event come ordered by sentence distance, then by timex
    position in the document.
    """
    if sw < 0:
        raise ValueError("sentence window must be >= 0")
    offsets = [0]
    for s in doc.sentences:
        offsets.append(offsets[-1] + len(s))
    links = []
    for ev in doc.events:
        gold_known = ev.gold_anchor is not None
        links.append(
            LinkInstance(
                kind=E_D, doc=doc.id, event=ev.eid, target=DCT_REF, sentence_distance=0,
                tokens=list(doc.sentences[ev.sentence]), event_position=ev.head(head),
                target_anchor=doc.dct,
                gold=induce_sr(ev.gold_anchor, doc.dct) if gold_known else None,
                event_anchor=ev.gold_anchor, event_anchorable=ev.anchorable,
            )
        )
        near = [
            tx for tx in doc.timexes
            if tx.anchor is not None and abs(tx.sentence - ev.sentence) <= sw
        ]
        near.sort(key=lambda tx: (abs(tx.sentence - ev.sentence), offsets[tx.sentence] + tx.start))
        for tx in near:
            lo, hi = min(ev.sentence, tx.sentence), max(ev.sentence, tx.sentence)
            tokens = [t for s in doc.sentences[lo:hi + 1] for t in s]
            base = offsets[lo]
            links.append(
                LinkInstance(
                    kind=E_T, doc=doc.id, event=ev.eid, target=tx.tid,
                    sentence_distance=hi - lo, signed_distance=tx.sentence - ev.sentence,
                    target_offset=offsets[tx.sentence] + tx.start,
                    tokens=tokens,
                    event_position=offsets[ev.sentence] - base + ev.head(head),
                    timex_position=offsets[tx.sentence] - base + tx.head(head),
                    target_anchor=tx.anchor,
                    gold=induce_sr(ev.gold_anchor, tx.anchor) if gold_known else None,
                    event_anchor=ev.gold_anchor, event_anchorable=ev.anchorable,
                )
            )
    return links


def write_links(path: str | Path, links: Iterable[LinkInstance]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for link in links:
            f.write(json.dumps(link.to_json(), ensure_ascii=False, sort_keys=True) + "\n")
            n += 1
    return n


def read_links(path: str | Path) -> Iterator[LinkInstance]:
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if line.strip():
                try:
                    yield LinkInstance.from_json(json.loads(line))
                except (KeyError, ValueError) as exc:
                    raise CorpusError(f"{path}:{lineno}: bad link record ({exc})") from exc
