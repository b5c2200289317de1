"""Command line pipeline: induce, train, predict, infer, oracle, evaluate, corpus-stats.

Every command reads a flat JSON config (``--config``), applies ``--override
KEY=VALUE`` pairs and writes into the output directory. Commands talk to each
other only through files in that directory.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional

from . import __version__
from .corpus import (
    E_D,
    E_T,
    NOT_ANCHORABLE,
    CorpusError,
    Document,
    LinkInstance,
    LoadDiagnostics,
    attach_event_times,
    generate_links,
    load_documents,
    read_event_times,
    read_links,
    write_links,
)
from .evaluation import (
    MetricError,
    event_time_accuracy,
    format_table,
    iaa_from_tables,
    krippendorff_alpha,
    oracle_test,
    per_sr_scores,
    sr_table,
)
from .inference import infer_from_links
from .neuralnet.io import ModelFileError, load_model, read_embeddings, save_model
from .neuralnet.model import ConfigError, ModelConfig
from .neuralnet.training import TrainConfig, TrainingError, train
from .sralgebra import LABELS, SRVector
from .timecore import AnchorParseError, TimeAnchor, parse_anchor

log = logging.getLogger("eventtime")

SEED_ENV = "CHRONO_SEED"
KIND_FILES = {E_D: "ed", E_T: "et"}


class UserError(Exception):
    """Bad configuration or missing inputs; exit code 1."""


# -- configuration ------------------------------------------------------------------


def _positive_int(v):
    return isinstance(v, int) and not isinstance(v, bool) and v > 0


def _nonneg_int(v):
    return isinstance(v, int) and not isinstance(v, bool) and v >= 0


def _positive_num(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and v > 0


def _fraction(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and 0 <= v < 1


def _bool(v):
    return isinstance(v, bool)


def _path(v):
    return isinstance(v, str) and v != ""


def _paths(v):
    return _path(v) or (isinstance(v, list) and v and all(_path(x) for x in v))


# key -> (validator, default, is_path)
SCHEMA: dict[str, tuple[Callable[[Any], bool], Any, bool]] = {
    "seed": (lambda v: _nonneg_int(v), None, False),
    "corpus": (_paths, None, True),
    "event_times": (_path, None, True),
    "test_corpus": (_paths, None, True),
    "test_event_times": (_path, None, True),
    "annotators": (lambda v: isinstance(v, list) and len(v) >= 2 and all(_path(x) for x in v), None, True),
    "embeddings": (_path, None, True),
    "model_ed": (_path, None, True),
    "model_et": (_path, None, True),
    "gold_times": (_path, None, True),
    "pred_times": (_path, None, True),
    "out": (_path, None, True),
    "kind": (lambda v: v in ("E-D", "E-T", "both"), "both", False),
    "sw": (_nonneg_int, 1, False),
    "oracle_sw": (lambda v: isinstance(v, list) and all(_nonneg_int(x) for x in v), [0, 1, 2], False),
    "head": (lambda v: v in ("first", "last"), "last", False),
    "attention": (_bool, True, False),
    "lowercase": (_bool, True, False),
    "d_w": (_positive_int, 200, False),
    "d_p": (_positive_int, 16, False),
    "d_h": (_positive_int, 64, False),
    "max_offset": (_positive_int, 30, False),
    "lr": (_positive_num, 1e-3, False),
    "batch_size": (_positive_int, 16, False),
    "epochs": (_positive_int, 50, False),
    "patience": (_positive_int, 5, False),
    "clip_norm": (_positive_num, 5.0, False),
    "valid_fraction": (_fraction, 0.2, False),
}


@dataclass
class RunConfig:
    values: dict[str, Any]

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        v = self.values.get(key)
        return default if v is None else v

    @property
    def out(self) -> Path:
        return Path(self.values["out"])

    def require(self, key):
        if self.values.get(key) is None:
            raise UserError(f"config key {key!r} is required for this command")
        return self.values[key]

    def model_config(self, kind: str) -> ModelConfig:
        return ModelConfig(kind=kind, d_w=self["d_w"], d_p=self["d_p"], d_h=self["d_h"],
                           max_offset=self["max_offset"], attention=self["attention"],
                           lowercase=self["lowercase"])

    def train_config(self) -> TrainConfig:
        return TrainConfig(seed=self["seed"], lr=float(self["lr"]), batch_size=self["batch_size"],
                           epochs=self["epochs"], patience=self["patience"],
                           clip_norm=float(self["clip_norm"]), valid_fraction=float(self["valid_fraction"]))

    def kinds(self) -> list[str]:
        return [E_D, E_T] if self["kind"] == "both" else [self["kind"]]


def _parse_override(item: str) -> tuple[str, Any]:
    if "=" not in item:
        raise UserError(f"override {item!r} is not KEY=VALUE")
    key, raw = item.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def load_config(path: Optional[str], overrides: list[str], out: Optional[str],
                env: Optional[dict] = None) -> RunConfig:
    """Read, override and validate a run configuration.

    Relative paths in the file resolve against the file's directory; paths
    given as overrides resolve against the working directory.
    """
    env = os.environ if env is None else env
    raw: dict[str, Any] = {}
    base = Path.cwd()
    if path:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise UserError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise UserError(f"config file {path}: {exc}") from None
        if not isinstance(raw, dict):
            raise UserError(f"config file {path} must hold a JSON object")
        base = Path(path).resolve().parent
    values: dict[str, Any] = {}
    sources: dict[str, Path] = {}
    for key, v in raw.items():
        values[key], sources[key] = v, base
    for item in overrides:
        key, v = _parse_override(item)
        values[key], sources[key] = v, Path.cwd()
    if out is not None:
        values["out"], sources["out"] = out, Path.cwd()
    if env.get(SEED_ENV) not in (None, ""):
        try:
            values["seed"] = int(env[SEED_ENV])
        except ValueError:
            raise UserError(f"{SEED_ENV} must be an integer, got {env[SEED_ENV]!r}") from None

    unknown = sorted(set(values) - set(SCHEMA))
    if unknown:
        raise UserError(f"unknown config keys: {', '.join(unknown)}")
    if values.get("seed") is None:
        raise UserError(f"config must set 'seed' (or {SEED_ENV})")
    if values.get("out") is None:
        raise UserError("no output directory: set 'out' or pass --out")
    resolved = {}
    for key, (check, default, is_path) in SCHEMA.items():
        v = values.get(key, default)
        if v is None:
            resolved[key] = None
            continue
        if not check(v):
            raise UserError(f"invalid value for {key!r}: {v!r}")
        if is_path:
            root = sources.get(key, base)
            v = [str(root / x) for x in v] if isinstance(v, list) else str(root / v)
        resolved[key] = v
    return RunConfig(resolved)


# -- shared helpers -----------------------------------------------------------------


def _as_list(v) -> list[str]:
    return v if isinstance(v, list) else [v]


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise UserError(f"file not found: {path}") from None


def _load_corpus(paths, times: Optional[str]) -> tuple[list[Document], LoadDiagnostics]:
    docs = load_documents(_as_list(paths))
    diag = LoadDiagnostics()
    if times:
        docs = attach_event_times(docs, _read_text(times), diag)
    return docs, diag


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_jsonl(path: Path, records) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def _read_jsonl(path: Path) -> list[dict]:
    if not path.exists():
        raise UserError(f"required input missing: {path}")
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def _links_path(cfg: RunConfig, kind: str, test: bool = False) -> Path:
    prefix = "test_links" if test else "links"
    return cfg.out / f"{prefix}_{KIND_FILES[kind]}.jsonl"


def _model_path(cfg: RunConfig, kind: str) -> Path:
    explicit = cfg.get(f"model_{KIND_FILES[kind]}")
    return Path(explicit) if explicit else cfg.out / f"model_{KIND_FILES[kind]}.bin"


def _split_links(links: list[LinkInstance]) -> dict[str, list[LinkInstance]]:
    return {k: [link for link in links if link.kind == k] for k in (E_D, E_T)}


def link_stats(docs: list[Document], links: list[LinkInstance], sw: int) -> dict:
    by_kind = _split_links(links)
    n_events = sum(len(d.events) for d in docs)
    hist = {}
    for kind, ls in by_kind.items():
        per_sr = []
        for i in range(4):
            c = Counter(link.gold[i].value for link in ls if link.gold is not None)
            per_sr.append({lab.value: c.get(lab.value, 0) for lab in LABELS})
        hist[kind] = per_sr
    distances = Counter(link.sentence_distance for link in by_kind[E_T])
    return {
        "sw": sw,
        "documents": len(docs),
        "events": n_events,
        "timexes": sum(len(d.timexes) for d in docs),
        "links": {k: len(v) for k, v in by_kind.items()},
        "labeled_links": {k: sum(link.gold is not None for link in v) for k, v in by_kind.items()},
        "avg_links_per_event": len(links) / n_events if n_events else 0.0,
        "et_distance_histogram": {str(k): distances[k] for k in sorted(distances)},
        "label_histogram": hist,
    }


def _stats_text(stats: dict) -> str:
    rows = [
        ["documents", stats["documents"]],
        ["events", stats["events"]],
        ["timexes", stats["timexes"]],
        ["E-D links", stats["links"][E_D]],
        ["E-T links", stats["links"][E_T]],
        ["avg links/event", round(stats["avg_links_per_event"], 4)],
    ]
    text = format_table(["statistic", "value"], rows, title=f"Link statistics (sw={stats['sw']})")
    for kind, per_sr in stats["label_histogram"].items():
        hrows = [[f"SR{i + 1}", *(per_sr[i][lab.value] for lab in LABELS)] for i in range(4)]
        text += "\n" + format_table(["", *(lab.value for lab in LABELS)], hrows, title=f"{kind} gold labels")
    return text


# -- commands -----------------------------------------------------------------------


def cmd_induce(cfg: RunConfig) -> None:
    cfg.out.mkdir(parents=True, exist_ok=True)
    sw = cfg["sw"]
    docs, diag = _load_corpus(cfg.require("corpus"), cfg.get("event_times"))
    links = [link for d in docs for link in generate_links(d, sw, cfg["head"])]
    by_kind = _split_links(links)
    for kind in (E_D, E_T):
        write_links(_links_path(cfg, kind), by_kind[kind])
    stats = link_stats(docs, links, sw)
    stats["skipped_event_time_rows"] = diag.count
    if cfg.get("test_corpus"):
        tdocs, tdiag = _load_corpus(cfg["test_corpus"], cfg.get("test_event_times"))
        tlinks = [link for d in tdocs for link in generate_links(d, sw, cfg["head"])]
        for kind, ls in _split_links(tlinks).items():
            write_links(_links_path(cfg, kind, test=True), ls)
        stats["test"] = link_stats(tdocs, tlinks, sw)
        stats["test"]["skipped_event_time_rows"] = tdiag.count
    _write_json(cfg.out / "stats.json", stats)
    (cfg.out / "stats.txt").write_text(_stats_text(stats), encoding="utf-8")


def _pretrained(cfg: RunConfig, links: list[LinkInstance]) -> tuple[Optional[dict], tuple[str, ...]]:
    """Embedding rows for every token seen in the datasets (train and test)."""
    if not cfg.get("embeddings"):
        return None, ()
    tokens = {t for link in links for t in link.tokens}
    for kind in (E_D, E_T):
        p = _links_path(cfg, kind, test=True)
        if p.exists():
            tokens.update(t for link in read_links(p) for t in link.tokens)
    vecs = read_embeddings(cfg["embeddings"], dim=cfg["d_w"], keep=tokens, lowercase=cfg["lowercase"])
    return vecs, tuple(sorted(vecs))


def cmd_train(cfg: RunConfig) -> None:
    report = {}
    for kind in cfg.kinds():
        path = _links_path(cfg, kind)
        if not path.exists():
            raise UserError(f"dataset missing for {kind}: {path} (run induce first)")
        links = list(read_links(path))
        labeled = [link for link in links if link.gold is not None]
        if not labeled:
            raise UserError(f"no gold-labeled {kind} links in {path}")
        pretrained, extra = _pretrained(cfg, labeled)
        result = train(labeled, cfg.model_config(kind), cfg.train_config(), pretrained=pretrained,
                       extra_vocab=extra)
        save_model(result.model, _model_path(cfg, kind),
                   meta={"seed": cfg["seed"], "best_epoch": result.best_epoch, "version": __version__})
        report[kind] = {
            "instances": len(labeled),
            "best_epoch": result.best_epoch,
            "best_valid_complete_match": result.best_valid,
            "history": [
                {"epoch": r.epoch, "train_loss": round(r.train_loss, 10), "valid_match": r.valid_match}
                for r in result.history
            ],
        }
    _write_json(cfg.out / "train_log.json", report)


def _prediction_inputs(cfg: RunConfig, kind: str) -> Path:
    test = _links_path(cfg, kind, test=True)
    return test if test.exists() else _links_path(cfg, kind)


def cmd_predict(cfg: RunConfig) -> None:
    rows, scores = [], {}
    for kind in cfg.kinds():
        mpath = _model_path(cfg, kind)
        if not mpath.exists():
            log.info("no %s model at %s; skipping", kind, mpath)
            continue
        model, _ = load_model(mpath)
        if model.config.kind != kind:
            raise UserError(f"{mpath} holds a {model.config.kind} model, expected {kind}")
        links = list(read_links(_prediction_inputs(cfg, kind)))
        preds = [model.predict(link) for link in links]
        _write_jsonl(cfg.out / f"pred_{KIND_FILES[kind]}.jsonl",
                     ({**link.to_json(), "pred": p.to_list()} for link, p in zip(links, preds)))
        gold_pairs = [(link.gold, p) for link, p in zip(links, preds) if link.gold is not None]
        if gold_pairs:
            scores[kind] = per_sr_scores([g for g, _ in gold_pairs], [p for _, p in gold_pairs])
    if not scores and not any((cfg.out / f"pred_{KIND_FILES[k]}.jsonl").exists() for k in cfg.kinds()):
        raise UserError("no trained model found; run train first")
    _write_json(cfg.out / "sr_scores.json", {k: v.to_json() for k, v in scores.items()})
    rows = [sr_table(rep, kind) for kind, rep in scores.items()]
    (cfg.out / "sr_scores.txt").write_text(
        format_table(["Link", "SR1", "SR2", "SR3", "SR4", "Comp."], rows, title="SR classification F1 (%)"),
        encoding="utf-8")


def _read_predictions(cfg: RunConfig, kind: str) -> Optional[tuple[list[LinkInstance], list[SRVector]]]:
    path = cfg.out / f"pred_{KIND_FILES[kind]}.jsonl"
    if not path.exists():
        return None
    recs = _read_jsonl(path)
    return [LinkInstance.from_json(r) for r in recs], [SRVector.parse(r["pred"]) for r in recs]


def _scored(results) -> tuple[list, list]:
    golds, inferred = [], []
    for r in results:
        if r.gold is None and r.anchorable:
            continue
        golds.append(r.gold)
        inferred.append(r.inferred)
    return golds, inferred


def cmd_infer(cfg: RunConfig) -> None:
    ed = _read_predictions(cfg, E_D)
    if ed is None:
        raise UserError(f"E-D predictions missing in {cfg.out} (run predict first)")
    et = _read_predictions(cfg, E_T)
    notes = []
    if et is None:
        notes.append("E-T clues absent: inference used E-D (DCT) predictions only")
    links, srs = list(ed[0]), list(ed[1])
    if et is not None:
        links += et[0]
        srs += et[1]
    results = infer_from_links(links, srs)
    results.sort(key=lambda r: (r.doc, _eid_key(r.eid)))
    _write_jsonl(cfg.out / "inferred.jsonl", (r.to_json() for r in results))

    variant = "attention" if cfg["attention"] else "baseline"
    rows, report = [], {"notes": notes, "rows": []}
    settings = [("E-D", {E_D})] + ([("E-D + E-T", {E_D, E_T})] if et is not None else [])
    for label, kinds in settings:
        res = results if kinds == {E_D, E_T} else sorted(infer_from_links(links, srs, kinds=kinds),
                                                         key=lambda r: (r.doc, _eid_key(r.eid)))
        golds, inferred = _scored(res)
        acc = event_time_accuracy(golds, inferred) if golds else 0.0
        rows.append([variant, label, round(100 * acc, 1)])
        report["rows"].append({"model": variant, "links": label, "accuracy": acc, "events": len(golds)})
    _write_json(cfg.out / "infer_report.json", report)
    text = format_table(["Model", "Links", "Event Time Acc. (%)"], rows, title="End-to-end event time inference")
    if notes:
        text += "".join(f"note: {n}\n" for n in notes)
    (cfg.out / "infer_report.txt").write_text(text, encoding="utf-8")


def _eid_key(eid: str):
    digits = "".join(ch for ch in eid if ch.isdigit())
    return (int(digits) if digits else -1, eid)


def cmd_oracle(cfg: RunConfig) -> None:
    cfg.out.mkdir(parents=True, exist_ok=True)
    if cfg.get("test_corpus") and cfg.get("test_event_times"):
        docs, _ = _load_corpus(cfg["test_corpus"], cfg["test_event_times"])
    else:
        docs, _ = _load_corpus(cfg.require("corpus"), cfg.require("event_times"))
    results = [oracle_test(docs, None)] + [oracle_test(docs, sw) for sw in cfg["oracle_sw"]]
    _write_json(cfg.out / "oracle.json", [r.to_json() for r in results])
    rows = [["E-D" if i == 0 else "E-D + E-T", "-" if i == 0 else cfg["oracle_sw"][i - 1],
             round(100 * r.accuracy, 1), round(r.avg_links, 2)] for i, r in enumerate(results)]
    (cfg.out / "oracle.txt").write_text(
        format_table(["Link Type", "sw", "Acc. (%)", "Link"], rows, title="Oracle test with gold SRs"),
        encoding="utf-8")


def _read_anchor_table(path: str) -> dict[tuple[str, str], Optional[TimeAnchor]]:
    """Anchor table from an event-time TSV or an ``inferred.jsonl`` file."""
    text = _read_text(path)
    out: dict[tuple[str, str], Optional[TimeAnchor]] = {}
    if path.endswith(".jsonl"):
        for line in text.splitlines():
            if line.strip():
                rec = json.loads(line)
                out[rec["doc"], rec["eid"]] = parse_anchor(rec["inferred"]) if rec.get("inferred") else None
        return out
    for doc_id, rows in read_event_times(text).items():
        for _, eid, raw in rows:
            out[doc_id, eid] = None if raw == NOT_ANCHORABLE else parse_anchor(raw)
    return out


def cmd_evaluate(cfg: RunConfig) -> None:
    cfg.out.mkdir(parents=True, exist_ok=True)
    gold_path = cfg.get("gold_times") or cfg.get("test_event_times") or cfg.require("event_times")
    pred_path = cfg.get("pred_times") or str(cfg.out / "inferred.jsonl")
    gold = _read_anchor_table(gold_path)
    pred = _read_anchor_table(pred_path)
    keys = sorted(gold, key=lambda k: (k[0], _eid_key(k[1])))
    acc = event_time_accuracy([gold[k] for k in keys], [pred.get(k) for k in keys])
    report = {"events": len(keys), "predicted": sum(k in pred for k in keys), "event_time_accuracy": acc}
    rows = [["event time", len(keys), round(100 * acc, 1)]]
    for kind in (E_D, E_T):
        preds = _read_predictions(cfg, kind) if not cfg.get("pred_times") else None
        if preds is None:
            continue
        pairs = [(link.gold, p) for link, p in zip(*preds) if link.gold is not None]
        if pairs:
            rep = per_sr_scores([g for g, _ in pairs], [p for _, p in pairs])
            report[f"sr_{kind}"] = rep.to_json()
            rows.append([f"{kind} complete match", len(pairs), round(100 * rep.complete_match_f1, 1)])
    _write_json(cfg.out / "evaluation.json", report)
    (cfg.out / "evaluation.txt").write_text(
        format_table(["Metric", "n", "Score (%)"], rows, title="Evaluation"), encoding="utf-8")


def _anchor_kind(a: Optional[TimeAnchor], anchorable: bool) -> str:
    if not anchorable:
        return "not anchorable"
    if a is None:
        return "unannotated"
    shape = "single-day" if a.is_single_day else "multi-day"
    return f"{shape} {'certain' if a.is_certain else 'uncertain'}"


def cmd_corpus_stats(cfg: RunConfig) -> None:
    cfg.out.mkdir(parents=True, exist_ok=True)
    docs, diag = _load_corpus(cfg.require("corpus"), cfg.get("event_times"))
    kinds = Counter(_anchor_kind(ev.gold_anchor, ev.anchorable) for d in docs for ev in d.events)
    stats = {
        "documents": len(docs),
        "sentences": sum(len(d.sentences) for d in docs),
        "tokens": sum(len(s) for d in docs for s in d.sentences),
        "events": sum(len(d.events) for d in docs),
        "timexes": sum(len(d.timexes) for d in docs),
        "anchorable_timexes": sum(t.anchor is not None for d in docs for t in d.timexes),
        "anchor_types": dict(sorted(kinds.items())),
        "skipped_event_time_rows": diag.count,
    }
    if cfg.get("annotators"):
        rec = iaa_from_tables([_read_text(p) for p in cfg["annotators"]],
                              [Path(p).stem for p in cfg["annotators"]])
        stats["iaa"] = {"annotators": rec.annotators, "items": len(rec.units),
                        "krippendorff_alpha": krippendorff_alpha(rec)}
    _write_json(cfg.out / "corpus_stats.json", stats)
    rows = [[k, v] for k, v in stats.items() if isinstance(v, int)]
    rows += [[f"events: {k}", v] for k, v in stats["anchor_types"].items()]
    if "iaa" in stats:
        rows.append(["Krippendorff alpha", round(stats["iaa"]["krippendorff_alpha"], 4)])
    (cfg.out / "corpus_stats.txt").write_text(format_table(["statistic", "value"], rows, title="Corpus statistics"),
                                              encoding="utf-8")


COMMANDS = {
    "induce": (cmd_induce, "build E-D and E-T link datasets and link statistics"),
    "train": (cmd_train, "train one classifier per link kind"),
    "predict": (cmd_predict, "predict SR vectors for the test links"),
    "infer": (cmd_infer, "infer event anchors from predicted SR vectors"),
    "oracle": (cmd_oracle, "event time accuracy from gold SR vectors per sentence window"),
    "evaluate": (cmd_evaluate, "score inferred anchors against gold anchors"),
    "corpus-stats": (cmd_corpus_stats, "corpus counts and inter-annotator agreement"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="eventtime", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_) in COMMANDS.items():
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", metavar="PATH")
        p.add_argument("--override", metavar="KEY=VALUE", action="append", default=[])
        p.add_argument("--out", metavar="DIR")
        p.add_argument("-v", "--verbose", action="store_true")
    return ap


USER_ERRORS = (UserError, CorpusError, AnchorParseError, ConfigError, ModelFileError, MetricError,
               TrainingError, FileNotFoundError)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.override, args.out)
        cfg.out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command][0](cfg)
    except USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
