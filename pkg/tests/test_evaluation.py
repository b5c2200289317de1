import datetime as dt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eventtime.corpus import Document, EventMention, generate_links
from eventtime.evaluation import (
    IAARecord,
    MetricError,
    event_time_accuracy,
    format_table,
    iaa_from_tables,
    krippendorff_alpha,
    oracle_test,
    per_sr_scores,
)
from eventtime.sralgebra import SRVector
from eventtime.synthetic import synthetic_corpus
from eventtime.timecore import TimeAnchor, parse_anchor

D = dt.date
LABELS = ["equal", "after", "before", "vague"]


def vec(*labels):
    return SRVector.parse(labels)


GOLDS = [vec("equal", "before", "after", "vague"), vec("before", "before", "before", "before"),
         vec("after", "after", "after", "after"), vec("equal", "equal", "equal", "equal")]

vectors = st.lists(st.sampled_from(LABELS), min_size=4, max_size=4).map(SRVector.parse)


def test_perfect_predictions():
    rep = per_sr_scores(GOLDS, GOLDS)
    assert all(s.micro_f1 == 1.0 and s.macro_f1 == 1.0 for s in rep.per_sr)
    assert rep.complete_match_accuracy == rep.complete_match_f1 == 1.0


def test_sr4_wrong_everywhere():
    preds = [g._replace(sr4=vec(*["vague"] * 4).sr1 if g.sr4.value != "vague" else vec(*["equal"] * 4).sr1)
             for g in GOLDS]
    rep = per_sr_scores(GOLDS, preds)
    assert [s.micro_f1 for s in rep.per_sr[:3]] == [1.0, 1.0, 1.0]
    assert rep.per_sr[3].micro_f1 == 0.0
    assert rep.complete_match_accuracy == 0.0


def test_three_of_four_complete():
    preds = list(GOLDS)
    preds[1] = preds[1]._replace(sr2=preds[1].sr1.inverse())
    assert per_sr_scores(GOLDS, preds).complete_match_accuracy == 0.75


def test_length_mismatch():
    with pytest.raises(MetricError):
        per_sr_scores(GOLDS, GOLDS[:2])


def test_per_label_counts():
    golds = [vec(*["equal"] * 4), vec(*["after"] * 4)]
    preds = [vec(*["equal"] * 4), vec(*["equal"] * 4)]
    lab = per_sr_scores(golds, preds).per_sr[0].labels
    assert (lab["equal"].tp, lab["equal"].fp, lab["equal"].fn) == (1, 1, 0)
    assert (lab["after"].tp, lab["after"].fn) == (0, 1)
    assert lab["equal"].precision == 0.5 and lab["equal"].recall == 1.0


def test_abstentions_lower_recall_only():
    rep = per_sr_scores(GOLDS, [GOLDS[0], None, None, None])
    assert rep.complete.precision == 1.0
    assert rep.complete_match_accuracy == 0.25
    assert rep.n_predicted == 1


@given(st.lists(st.tuples(vectors, vectors), min_size=1, max_size=30))
def test_report_invariants(pairs):
    golds, preds = [g for g, _ in pairs], [p for _, p in pairs]
    rep = per_sr_scores(golds, preds)
    assert rep.complete_match_f1 == pytest.approx(rep.complete_match_accuracy)
    for s in rep.per_sr:
        assert sum(p.tp + p.fn for p in s.labels.values()) == len(golds)
        assert 0 <= s.micro_f1 <= 1 and 0 <= s.macro_f1 <= 1
        assert s.micro_f1 == pytest.approx(sum(p.tp for p in s.labels.values()) / len(golds))


def test_to_json_shape():
    js = per_sr_scores(GOLDS, GOLDS).to_json()
    assert len(js["per_sr"]) == 4 and js["complete_match"]["accuracy"] == 1.0


# -- event time accuracy ---------------------------------------------------------

def test_identical_anchor_lists():
    anchors = [parse_anchor("1998-01-26"), parse_anchor("begin:1998-01-01,end:after1998-02-06")]
    assert event_time_accuracy(anchors, anchors) == 1.0


def test_blank_inferred_vs_certain_gold():
    gold = [parse_anchor("1998-01-26")]
    assert event_time_accuracy(gold, [parse_anchor("after1998-01-26")]) == 0.0


def test_missing_entries_are_misses():
    gold = [parse_anchor("1998-01-26"), None]
    assert event_time_accuracy(gold, [None, None]) == 0.0


def test_partially_blank_identical_strings_match():
    a = parse_anchor("after1998-01-26")
    assert event_time_accuracy([a], [parse_anchor("after1998-01-26")]) == 1.0


def test_accuracy_length_mismatch():
    with pytest.raises(MetricError):
        event_time_accuracy([None], [])


# -- Krippendorff's alpha ---------------------------------------------------------------

def two_coder(pairs):
    return IAARecord({f"i{k}": {"a": x, "b": y} for k, (x, y) in enumerate(pairs)})


def test_perfect_agreement():
    rec = two_coder([(c, c) for c in "ABCABCABCA"])
    assert krippendorff_alpha(rec) == 1.0


def test_hand_computed_fixture():
    # coincidences: (A,A)=2 from item 1, (A,B)=(B,A)=1 from item 2; n_A=3, n_B=1, n=4
    d_o = 2 / 4
    d_e = (3 * 1 + 1 * 3) / (4 * 3)
    assert krippendorff_alpha(two_coder([("A", "A"), ("A", "B")])) == pytest.approx(1 - d_o / d_e, abs=1e-9)
    assert krippendorff_alpha(two_coder([("A", "A"), ("A", "B")])) == pytest.approx(0.0, abs=1e-9)


def test_published_reliability_example():
    # four coders, twelve units, missing values; nominal alpha 0.743
    rows = {
        "A": "1 2 3 3 2 1 4 1 2 . . .",
        "B": "1 2 3 3 2 2 4 1 2 5 . 3",
        "C": ". 3 3 3 2 3 4 2 2 5 1 .",
        "D": "1 2 3 3 2 4 4 1 2 5 1 .",
    }
    rec = IAARecord()
    for coder, row in rows.items():
        for unit, v in enumerate(row.split()):
            if v != ".":
                rec.add(f"u{unit}", coder, v)
    assert krippendorff_alpha(rec) == pytest.approx(0.743, abs=5e-4)


def test_single_category_is_one():
    assert krippendorff_alpha(two_coder([("A", "A"), ("A", "A")])) == 1.0


def test_no_pairable_units():
    rec = IAARecord({"i1": {"a": "A"}, "i2": {"b": "B"}})
    with pytest.raises(MetricError):
        krippendorff_alpha(rec)


def test_needs_two_annotators():
    with pytest.raises(MetricError):
        krippendorff_alpha(IAARecord({"i1": {"a": "A"}}))


codes = st.lists(st.tuples(st.sampled_from("ABCD"), st.sampled_from("ABCD")), min_size=2, max_size=25)


@given(codes, st.permutations("ABCD"))
def test_alpha_invariant_under_relabeling(pairs, perm):
    rename = dict(zip("ABCD", perm))
    try:
        base = krippendorff_alpha(two_coder(pairs))
    except MetricError:
        return
    renamed = krippendorff_alpha(two_coder([(rename[x], rename[y]) for x, y in pairs]))
    assert renamed == pytest.approx(base, abs=1e-12)


@given(codes)
def test_alpha_invariant_under_annotator_swap(pairs):
    try:
        base = krippendorff_alpha(two_coder(pairs))
    except MetricError:
        return
    assert krippendorff_alpha(two_coder([(y, x) for x, y in pairs])) == pytest.approx(base, abs=1e-12)
    assert base <= 1.0


def test_iaa_from_tables_uses_canonical_strings():
    a = "DOC\te1\tafter1998-01-26before1998-02-06\nDOC\te2\t1998-01-01\n"
    b = "DOC\te1\tafter1998-01-26, before1998-02-06\nDOC\te2\t1998-01-01\n"
    rec = iaa_from_tables([a, b], ["x", "y"])
    assert rec.annotators == ["x", "y"]
    assert rec.units["DOC/e1"]["x"] == rec.units["DOC/e1"]["y"]


# -- oracle harness --------------------------------------------------------------------

def test_ed_only_average_is_one():
    docs = synthetic_corpus(3, seed=1)
    assert oracle_test(docs, None).avg_links == 1.0


def test_synthetic_oracle_accuracy_grows_to_one():
    docs = synthetic_corpus(6, seed=7)
    accs = [oracle_test(docs, sw).accuracy for sw in (0, 1, 2)]
    assert accs == sorted(accs)
    assert accs[-1] == 1.0


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 4), st.integers(0, 500))
def test_oracle_monotone_in_window(n_docs, seed):
    docs = synthetic_corpus(n_docs, seed)
    results = [oracle_test(docs, sw) for sw in (0, 1, 2, 3)]
    accs = [r.accuracy for r in results]
    assert accs == sorted(accs)
    for doc in docs:
        assert len(generate_links(doc, 0)) <= len(generate_links(doc, 1))


def test_no_timexes_matches_ed_only():
    dct = TimeAnchor.single_day(D(1998, 2, 6))
    doc = Document("d", dct, [["a", "b"], ["c"]], [EventMention("e1", 0, 0, 1, dct), EventMention("e2", 1, 0, 1, None)])
    ed = oracle_test([doc], None)
    wide = oracle_test([doc], 5)
    assert (wide.accuracy, wide.avg_links) == (ed.accuracy, ed.avg_links) == (1.0, 1.0)


def test_format_table_alignment():
    text = format_table(["Link", "Acc."], [["E-D", 12.5], ["E-D + E-T", 100.0]], title="T")
    lines = text.splitlines()
    assert lines[0] == "T"
    assert len({len(line) for line in lines[1:]}) == 1
