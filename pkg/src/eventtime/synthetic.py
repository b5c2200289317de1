"""Deterministic synthetic data: separable link sets and small annotated corpora.

Run ``python -m eventtime.synthetic OUT_DIR`` to write the bundled corpus.
"""
from __future__ import annotations

import argparse
import datetime as dt
import json
from pathlib import Path

import numpy as np

from .corpus import (
    E_D,
    E_T,
    Document,
    EventMention,
    LinkInstance,
    TimexMention,
    document_to_json,
)
from .sralgebra import SRVector
from .timecore import TimeAnchor, anchor_to_string, normalize_timex

FILLER = (
    "the officials said on talks were held in city after report that a new deal would be "
    "signed by both sides while markets rose and analysts expected more news soon"
).split()


# cue word -> SR vector it determines
CUES = {
    "earlier": ("before", "before", "before", "before"),
    "today": ("equal", "equal", "equal", "equal"),
    "later": ("after", "after", "after", "after"),
    "since": ("equal", "before", "after", "vague"),
}


# small filler vocabulary so 50 sentences cover it and the cue is the only signal
SEPARABLE_FILLER = ("the", "officials", "said", "talks", "in", "city", "markets", "news")


def separable_links(n: int, kind: str = E_D, seed: int = 0) -> list[LinkInstance]:
    """Links whose gold SR vector is fixed by the cue word right before the event.

    Fillers, sentence length and event position are random; the SR vector is
    a function of which cue from :data:`CUES` precedes the event token, so
    the set is separable.
    """
    rng = np.random.default_rng(seed)
    dct = TimeAnchor.single_day(dt.date(1998, 2, 6))
    cues = sorted(CUES)
    links = []
    for _ in range(n):
        cue = cues[int(rng.integers(len(cues)))]
        length = int(rng.integers(8, 15))
        tokens = [SEPARABLE_FILLER[j] for j in rng.integers(0, len(SEPARABLE_FILLER), size=length)]
        pos = int(rng.integers(1, length))
        tokens[pos - 1] = cue
        tokens[pos] = "announced"
        timex_pos = None
        if kind == E_T:
            free = [i for i in range(length) if i not in (pos - 1, pos)]
            timex_pos = int(free[int(rng.integers(len(free)))])
            tokens[timex_pos] = "monday"
        links.append(
            LinkInstance(
                kind=kind, doc="sep", event=f"e{len(links)}", target="DCT" if kind == E_D else "t1",
                sentence_distance=0, tokens=tokens, event_position=pos,
                timex_position=timex_pos, target_anchor=dct, gold=SRVector.parse(CUES[cue]),
            )
        )
    return links


# -- synthetic annotated corpus -----------------------------------------------------

_VERBS = ("met", "signed", "announced", "visited", "resigned", "launched", "voted", "opened")


def synthetic_corpus(n_docs: int = 6, seed: int = 7, prefix: str = "SYN") -> list[Document]:
    """Small news-like documents whose event anchors are fixed by nearby timexes.

    Every event's gold anchor is determined exactly once E-T links reach the
    sentences holding its timexes (at most two sentences away), so gold-SR
    inference with a wide enough window recovers every anchor.
    """
    rng = np.random.default_rng(seed)
    docs = []
    for di in range(n_docs):
        dct_day = dt.date(1998, 1, 1) + dt.timedelta(days=int(rng.integers(20, 300)))
        dct = TimeAnchor.single_day(dct_day)
        sentences: list[list[str]] = []
        events: list[EventMention] = []
        timexes: list[TimexMention] = []

        def sentence(words):
            sentences.append(list(words))
            return len(sentences) - 1

        def add_timex(si, pos, value, n_tok=1):
            tid = f"t{len(timexes) + 1}"
            timexes.append(TimexMention(tid, si, pos, pos + n_tok, value, "DATE", normalize_timex(value, "DATE", dct)))

        def add_event(si, pos, anchor):
            events.append(EventMention(f"e{len(events) + 1}", si, pos, pos + 1, anchor))

        for k in range(4):
            verb = _VERBS[int(rng.integers(len(_VERBS)))]
            pattern = (di + k) % 4
            if pattern == 0:
                # happened on the publication day
                si = sentence(["the", "ministry", verb, "the", "plan", "today", "."])
                add_event(si, 2, dct)
            elif pattern == 1:
                # a dated day mentioned in the same sentence
                day = dct_day - dt.timedelta(days=int(rng.integers(1, 10)))
                si = sentence(["officials", verb, "on", day.strftime("%B").lower(), str(day.day), "."])
                add_timex(si, 3, day.isoformat(), 2)
                add_event(si, 1, TimeAnchor.single_day(day))
            elif pattern == 2:
                # a month span given in the previous sentence
                month = dct_day.replace(day=1) - dt.timedelta(days=1)
                s0 = sentence(["in", month.strftime("%B").lower(), ",", "prices", "kept", "rising", "."])
                add_timex(s0, 1, month.strftime("%Y-%m"))
                si = sentence(["the", "company", verb, "steadily", "throughout", "that", "period", "."])
                add_event(si, 2, normalize_timex(month.strftime("%Y-%m")))
            else:
                # begin and end fixed by two dated days, the end two sentences later
                d0 = dct_day - dt.timedelta(days=int(rng.integers(12, 20)))
                d1 = d0 + dt.timedelta(days=int(rng.integers(2, 8)))
                s0 = sentence(["the", "strike", "began", "on", d0.isoformat(), "."])
                add_timex(s0, 4, d0.isoformat())
                si = sentence(["workers", verb, "for", "days", "."])
                add_event(si, 1, TimeAnchor.span(d0, d1))
                sentence(["talks", "resumed", "quietly", "."])
                s2 = sentence(["it", "ended", "on", d1.isoformat(), "."])
                add_timex(s2, 3, d1.isoformat())
        docs.append(Document(f"{prefix}{di:03d}", dct, sentences, events, timexes))
    return docs


def write_corpus(docs: list[Document], out_dir: str | Path) -> None:
    """Write one JSON file per document and an ``event_times.tsv`` with gold anchors.

    The JSON documents omit gold anchors; they live only in the TSV.
    """
    out = Path(out_dir)
    (out / "docs").mkdir(parents=True, exist_ok=True)
    rows = []
    for doc in docs:
        rec = document_to_json(doc)
        for ev in rec["events"]:
            ev.pop("anchor", None)
        (out / "docs" / f"{doc.id}.json").write_text(json.dumps(rec, indent=1, sort_keys=True) + "\n")
        for ev in doc.events:
            if ev.gold_anchor is not None:
                rows.append(f"{doc.id}\t{ev.eid}\t{anchor_to_string(ev.gold_anchor)}")
    (out / "event_times.tsv").write_text("\n".join(rows) + "\n")


def write_second_annotator(docs: list[Document], path: str | Path, every: int = 5) -> None:
    """An event-time TSV that disagrees with the gold on every ``every``-th event.

    Disagreeing rows replace the anchor with an uncertain "before DCT"
    anchor, which pairs with the gold TSV for agreement statistics.
    """
    rows, k = [], 0
    for doc in docs:
        for ev in doc.events:
            if ev.gold_anchor is None:
                continue
            text = anchor_to_string(ev.gold_anchor)
            if k % every == every - 1:
                text = f"before{doc.dct.begin.earliest.isoformat()}"
            rows.append(f"{doc.id}\t{ev.eid}\t{text}")
            k += 1
    Path(path).write_text("\n".join(rows) + "\n")


def main(argv=None):
    ap = argparse.ArgumentParser(description="write the synthetic corpus")
    ap.add_argument("out_dir")
    ap.add_argument("--docs", type=int, default=6)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--prefix", default="SYN")
    ap.add_argument("--second-annotator", metavar="TSV", help="also write a disagreeing annotation table")
    args = ap.parse_args(argv)
    docs = synthetic_corpus(args.docs, args.seed, args.prefix)
    write_corpus(docs, args.out_dir)
    if args.second_annotator:
        write_second_annotator(docs, args.second_annotator)


if __name__ == "__main__":
    main()
