"""Scoring: per-SR F1, complete match, event-time accuracy, IAA and the oracle test."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import permutations
from typing import Mapping, Optional, Sequence

from .corpus import E_D, Document, generate_links
from .inference import infer_from_links
from .sralgebra import LABELS, SRVector
from .timecore import TimeAnchor, anchor_to_string


class MetricError(ValueError):
    pass


@dataclass
class PRF:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def to_json(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn,
                "precision": self.precision, "recall": self.recall, "f1": self.f1}


@dataclass
class SRScores:
    labels: dict[str, PRF]
    micro: PRF

    @property
    def macro_f1(self) -> float:
        seen = [p for p in self.labels.values() if p.tp + p.fp + p.fn]
        return sum(p.f1 for p in seen) / len(seen) if seen else 0.0

    @property
    def micro_f1(self) -> float:
        return self.micro.f1


@dataclass
class ScoreReport:
    per_sr: list[SRScores]
    complete: PRF
    n_gold: int
    n_predicted: int

    @property
    def complete_match_accuracy(self) -> float:
        return self.complete.tp / self.n_gold if self.n_gold else 0.0

    @property
    def complete_match_f1(self) -> float:
        return self.complete.f1

    def to_json(self) -> dict:
        return {
            "n_gold": self.n_gold,
            "n_predicted": self.n_predicted,
            "per_sr": [
                {
                    "labels": {k: v.to_json() for k, v in s.labels.items()},
                    "micro_f1": s.micro_f1,
                    "macro_f1": s.macro_f1,
                }
                for s in self.per_sr
            ],
            "complete_match": {"accuracy": self.complete_match_accuracy, **self.complete.to_json()},
        }


def per_sr_scores(golds: Sequence[SRVector], preds: Sequence[Optional[SRVector]]) -> ScoreReport:
    """Per-SR, per-label precision/recall/F1 and 4-SR complete match.

    A ``None`` prediction abstains: it counts as a miss for recall and is
    excluded from precision. Without abstentions complete-match F1 equals
    complete-match accuracy.
    """
    if len(golds) != len(preds):
        raise MetricError(f"{len(golds)} gold vectors but {len(preds)} predictions")
    per_sr = []
    for i in range(4):
        labels = {lab.value: PRF() for lab in LABELS}
        micro = PRF()
        for g, p in zip(golds, preds):
            gl = g[i].value
            if p is None:
                labels[gl].fn += 1
                micro.fn += 1
                continue
            pl = p[i].value
            if gl == pl:
                labels[gl].tp += 1
                micro.tp += 1
            else:
                labels[gl].fn += 1
                labels[pl].fp += 1
                micro.fn += 1
                micro.fp += 1
        per_sr.append(SRScores(labels, micro))
    complete = PRF()
    for g, p in zip(golds, preds):
        if p is None:
            complete.fn += 1
        elif tuple(g) == tuple(p):
            complete.tp += 1
        else:
            complete.fp += 1
            complete.fn += 1
    n_pred = sum(p is not None for p in preds)
    report = ScoreReport(per_sr, complete, len(golds), n_pred)
    if golds and n_pred == len(golds):
        assert abs(report.complete_match_f1 - report.complete_match_accuracy) < 1e-12
    return report


def event_time_accuracy(gold_anchors: Sequence[Optional[TimeAnchor]],
                        inferred_anchors: Sequence[Optional[TimeAnchor]]) -> float:
    """Fraction of events whose canonical anchor strings match exactly.

    A missing gold (not anchorable) or missing inference counts as wrong.
    """
    if len(gold_anchors) != len(inferred_anchors):
        raise MetricError("gold and inferred anchor lists differ in length")
    if not gold_anchors:
        return 0.0
    hits = sum(
        g is not None and p is not None and anchor_to_string(g) == anchor_to_string(p)
        for g, p in zip(gold_anchors, inferred_anchors)
    )
    return hits / len(gold_anchors)


# -- inter-annotator agreement ----------------------------------------------------

@dataclass
class IAARecord:
    """items -> annotator -> category; absent annotators are missing codings."""

    units: dict[str, dict[str, str]] = field(default_factory=dict)

    @property
    def annotators(self) -> list[str]:
        return sorted({a for codes in self.units.values() for a in codes})

    def add(self, item: str, annotator: str, value: str) -> None:
        self.units.setdefault(item, {})[annotator] = value


def krippendorff_alpha(record: IAARecord | Mapping[str, Mapping[str, str]]) -> float:
    """Krippendorff's alpha, nominal metric, from the coincidence matrix.

    Units with fewer than two codings are not pairable and are dropped.
    """
    units = record.units if isinstance(record, IAARecord) else record
    if len({a for codes in units.values() for a in codes}) < 2:
        raise MetricError("need at least two annotators")
    coincidence: Counter = Counter()
    for codes in units.values():
        values = [v for v in codes.values() if v is not None]
        m = len(values)
        if m < 2:
            continue
        for a, b in permutations(values, 2):
            coincidence[a, b] += 1.0 / (m - 1)
    n_c: Counter = Counter()
    for (a, _), w in coincidence.items():
        n_c[a] += w
    n = sum(n_c.values())
    if n < 2:
        raise MetricError("no pairable codings")
    if len(n_c) == 1:
        return 1.0
    d_o = sum(w for (a, b), w in coincidence.items() if a != b) / n
    d_e = sum(n_c[a] * n_c[b] for a in n_c for b in n_c if a != b) / (n * (n - 1))
    if d_e == 0:
        raise MetricError("expected disagreement is zero")
    return 1.0 - d_o / d_e


def iaa_from_tables(tables: Sequence[str], names: Optional[Sequence[str]] = None) -> IAARecord:
    """Build an IAA record from one event-time TSV per annotator.

    Anchors are compared by canonical string, so equivalent spellings agree.
    """
    from .corpus import NOT_ANCHORABLE, read_event_times
    from .timecore import parse_anchor

    rec = IAARecord()
    for k, text in enumerate(tables):
        who = names[k] if names else f"a{k + 1}"
        for doc_id, rows in read_event_times(text).items():
            for _, eid, raw in rows:
                value = raw if raw == NOT_ANCHORABLE else anchor_to_string(parse_anchor(raw))
                rec.add(f"{doc_id}/{eid}", who, value)
    return rec


# -- oracle test -------------------------------------------------------------------

@dataclass
class OracleResult:
    label: str
    accuracy: float
    avg_links: float
    n_events: int
    n_links: int

    def to_json(self) -> dict:
        return {"links": self.label, "accuracy": self.accuracy, "avg_links": self.avg_links,
                "events": self.n_events, "total_links": self.n_links}


def oracle_test(docs: Sequence[Document], sw: Optional[int]) -> OracleResult:
    """Event-time accuracy when inference is fed gold SRs.

    ``sw=None`` uses E-D links only. Only events carrying an annotation are
    scored; not-anchorable events count as misses.
    """
    golds, inferred = [], []
    n_links = 0
    for doc in docs:
        links = generate_links(doc, sw if sw is not None else 0)
        if sw is None:
            links = [link for link in links if link.kind == E_D]
        annotated = {ev.eid for ev in doc.events if ev.gold_anchor is not None or not ev.anchorable}
        links = [link for link in links if link.event in annotated]
        n_links += len(links)
        for res in infer_from_links(links, [link.gold for link in links]):
            golds.append(res.gold)
            inferred.append(res.inferred if res.clues else None)
    n_events = len(golds)
    label = "E-D" if sw is None else f"E-D + E-T (sw={sw})"
    return OracleResult(label, event_time_accuracy(golds, inferred), n_links / n_events if n_events else 0.0,
                        n_events, n_links)


# -- text tables -------------------------------------------------------------------

def format_table(headers: Sequence[str], rows: Sequence[Sequence], title: str = "") -> str:
    cells = [[str(h) for h in headers]] + [[_fmt(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = [title] if title else []
    for k, r in enumerate(cells):
        lines.append("  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths))))
        if k == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _fmt(c) -> str:
    # callers round floats to the precision they want shown
    return str(c)


def sr_table(report: ScoreReport, label: str) -> list:
    """One summary row: link label, SR1..SR4 micro F1 and complete match (percent)."""
    return [label, *(round(100 * s.micro_f1, 1) for s in report.per_sr), round(100 * report.complete_match_f1, 1)]
