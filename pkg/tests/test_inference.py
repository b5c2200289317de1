import datetime as dt

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eventtime.corpus import E_D, E_T, generate_links
from eventtime.inference import (
    DCT_SOURCE,
    AnchorState,
    TimeClue,
    apply_clue,
    infer_event,
    infer_from_links,
)
from eventtime.sralgebra import SRVector, induce_sr
from eventtime.synthetic import synthetic_corpus
from eventtime.timecore import TimeAnchor, anchor_to_string, parse_anchor

D = dt.date
DCT = TimeAnchor.single_day(D(1998, 2, 6))


def sr(*labels):
    return SRVector.parse(labels)


def dct_clue(vec):
    return TimeClue(DCT_SOURCE, DCT, vec)


def timex_clue(anchor, vec, distance=0, order=0, name="t1"):
    return TimeClue(name, anchor if isinstance(anchor, TimeAnchor) else parse_anchor(anchor), vec, distance, order)


def test_equal_copies_target_begin_pair():
    state = apply_clue(AnchorState(), dct_clue(sr("equal", "vague", "vague", "vague")))
    assert state.days[:2] == (D(1998, 2, 6), D(1998, 2, 6))
    assert state.days[2:] == (None, None)


def test_after_raises_earliest_bound():
    target = parse_anchor("after1998-01-20before1998-01-26")
    state = apply_clue(AnchorState(), timex_clue(target, sr("after", "vague", "vague", "vague")))
    assert state.days == (D(1998, 1, 26), None, None, None)


def test_before_lowers_latest_bound():
    state = apply_clue(AnchorState(), dct_clue(sr("vague", "vague", "vague", "before")))
    assert state.days == (None, None, None, D(1998, 2, 6))


def test_vague_is_a_no_op():
    start = AnchorState((D(1998, 1, 1), None, None, None))
    assert apply_clue(start, dct_clue(sr("vague", "vague", "vague", "vague"))) == start


def test_dct_copy_through():
    res = infer_event([dct_clue(sr("equal", "equal", "equal", "equal"))])
    assert res.anchor == DCT and res.conflicts == 0


def test_lock_blocks_later_contradiction():
    clues = [
        dct_clue(sr("equal", "vague", "vague", "vague")),
        timex_clue("1998-02-10", sr("after", "vague", "vague", "vague")),
    ]
    res = infer_event(clues)
    assert res.anchor.begin.earliest == D(1998, 2, 6) and res.anchor.begin.latest == D(1998, 2, 6)
    assert res.conflicts == 0


def test_lock_is_per_index():
    clues = [
        dct_clue(sr("equal", "vague", "vague", "vague")),
        timex_clue("1998-02-20", sr("vague", "vague", "before", "before")),
    ]
    res = infer_event(clues)
    assert res.anchor.end.latest == D(1998, 2, 20)


def test_timex_equal_does_not_lock():
    clues = [
        timex_clue("begin:1998-01-01,end:1998-01-31", sr("equal", "vague", "vague", "vague"), order=1),
        timex_clue("1998-01-10", sr("vague", "vague", "vague", "vague"), distance=1),
    ]
    state = AnchorState()
    for c in clues:
        state = apply_clue(state, c)
    assert state.locked == (False,) * 4


def test_conflicting_tightening_rejected_and_counted():
    clues = [
        dct_clue(sr("vague", "vague", "before", "before")),      # end <= 02-06
        timex_clue("1998-03-01", sr("after", "after", "vague", "vague")),  # begin >= 03-01
    ]
    res = infer_event(clues)
    assert res.conflicts >= 1
    assert res.anchor.begin.earliest is None
    assert res.anchor.end.latest == D(1998, 2, 6)


def test_priority_order_dct_then_distance_then_offset():
    a = timex_clue("1998-01-01", sr(*["vague"] * 4), distance=1, order=2, name="a")
    b = timex_clue("1998-01-01", sr(*["vague"] * 4), distance=0, order=9, name="b")
    c = timex_clue("1998-01-01", sr(*["vague"] * 4), distance=1, order=1, name="c")
    d = dct_clue(sr(*["vague"] * 4))
    assert [x.source for x in sorted([a, b, c, d], key=lambda x: x.rank)] == [DCT_SOURCE, "b", "c", "a"]


def test_earlier_clue_wins_conflict():
    first = timex_clue("1998-01-10", sr("equal", "equal", "vague", "vague"), distance=0)
    second = timex_clue("1998-01-20", sr("equal", "equal", "vague", "vague"), distance=1)
    res = infer_event([second, first])
    assert (res.anchor.begin.earliest, res.anchor.begin.latest) == (D(1998, 1, 10), D(1998, 1, 10))
    # SR1 and SR2 both target the begin pair, so each index records a conflict
    assert res.conflicts == 2


def test_pinned_endpoints_recover_gold():
    doc = synthetic_corpus(1, seed=3)[0]
    links = generate_links(doc, 2)
    for res in infer_from_links(links, [link.gold for link in links]):
        assert res.inferred == res.gold


# -- properties ---------------------------------------------------------------------

BASE = D(1998, 1, 1)
offsets = st.integers(0, 40)


@st.composite
def any_anchor(draw):
    pts = sorted(draw(st.lists(offsets, min_size=4, max_size=4)))
    be, ee, bl, el = [BASE + dt.timedelta(days=x) for x in pts]
    blanks = draw(st.lists(st.booleans(), min_size=4, max_size=4))
    vals = [None if b else v for v, b in zip((be, bl, ee, el), blanks)]
    return TimeAnchor.from_days(*vals)


@st.composite
def target_anchor(draw):
    a = draw(offsets)
    b = draw(st.integers(a, 41))
    kind = draw(st.sampled_from(["day", "span", "uncertain"]))
    d0, d1 = BASE + dt.timedelta(days=a), BASE + dt.timedelta(days=b)
    if kind == "day":
        return TimeAnchor.single_day(d0)
    if kind == "span":
        return TimeAnchor.span(d0, d1)
    return TimeAnchor.from_days(d0, d1, d0, d1)


def gold_clues(gold, dct, targets):
    clues = [TimeClue(DCT_SOURCE, dct, induce_sr(gold, dct))]
    for i, t in enumerate(targets):
        clues.append(TimeClue(f"t{i}", t, induce_sr(gold, t), distance=i % 3, order=i))
    return clues


def brackets(inferred, gold):
    ib, il, ie, iel = inferred.days()
    gb, gl, ge, gel = gold.days()
    for lo, g in ((ib, gb), (ie, ge)):
        if lo is not None:
            assert g is not None and lo <= g
    for hi, g in ((il, gl), (iel, gel)):
        if hi is not None:
            assert g is not None and hi >= g


@given(any_anchor(), target_anchor(), st.lists(target_anchor(), max_size=5))
def test_no_overshoot_with_gold_srs(gold, dct_like, targets):
    dct = TimeAnchor.single_day(dct_like.begin.earliest)
    res = infer_event(gold_clues(gold, dct, targets))
    brackets(res.anchor, gold)
    assert res.conflicts == 0


@given(any_anchor(), target_anchor(), st.lists(target_anchor(), max_size=6), st.integers(0, 6))
def test_more_clues_never_widen(gold, dct_like, targets, k):
    dct = TimeAnchor.single_day(dct_like.begin.earliest)
    clues = gold_clues(gold, dct, targets)
    fewer = infer_event(clues[:1 + min(k, len(targets))]).anchor.days()
    more = infer_event(clues).anchor.days()
    for i, (a, b) in enumerate(zip(fewer, more)):
        if a is None:
            continue
        assert b is not None
        assert (b >= a) if i in (0, 2) else (b <= a)


@given(st.lists(target_anchor(), min_size=1, max_size=5), any_anchor(), st.randoms())
def test_result_independent_of_input_order(targets, gold, rnd):
    clues = gold_clues(gold, DCT, targets)
    shuffled = list(clues)
    rnd.shuffle(shuffled)
    assert infer_event(shuffled) == infer_event(clues)


# -- link-level driver ------------------------------------------------------------------

def corpus_links(sw=2):
    doc = synthetic_corpus(1, seed=0)[0]
    return generate_links(doc, sw)


def test_infer_from_links_groups_by_event():
    links = corpus_links()
    results = infer_from_links(links, [link.gold for link in links])
    assert [r.eid for r in results] == [f"e{i}" for i in range(1, 5)]
    rec = results[0].to_json()
    assert set(rec) == {"doc", "eid", "inferred", "gold", "anchorable", "clues", "conflicts"}
    assert rec["inferred"] == anchor_to_string(results[0].inferred)


def test_kind_filter_and_missing_predictions():
    links = corpus_links()
    ed_only = infer_from_links(links, [link.gold for link in links], kinds={E_D})
    assert all(r.clues == 1 for r in ed_only)
    none_et = infer_from_links(links, [link.gold if link.kind == E_D else None for link in links])
    assert [r.inferred for r in none_et] == [r.inferred for r in ed_only]


def test_max_distance_filter():
    links = corpus_links(sw=2)
    near = infer_from_links(links, [link.gold for link in links], max_distance=0)
    expected = sum(1 for link in links if link.kind == E_D or link.sentence_distance == 0)
    assert sum(r.clues for r in near) == expected


def test_length_mismatch():
    with pytest.raises(ValueError):
        infer_from_links(corpus_links(), [])


def test_et_only_clues_allowed():
    links = [link for link in corpus_links() if link.kind == E_T]
    results = infer_from_links(links, [link.gold for link in links])
    assert results and all(r.clues >= 1 for r in results)
