import pytest

import random

from conftest import DORR_NAMES, GOLDEN, golden_pair, make_pair, random_pair
from core.domain.models import CsrScope, DorrType
from core.services.divergence_service import DivergenceService
from core.services.dorr_service import DorrService

COUNTER_FIELDS = (
    "thematic_full", "thematic_nsubj_to_obj_obl", "promotional", "demotional", "structural",
    "conflational", "categorial_nsubj_obj", "categorial_nsubj_iobj_obl",
)

EXPECTED = {
    "thematic": {"thematic_full", "thematic_nsubj_to_obj_obl"},
    "promotional": {"promotional"},
    "demotional": {"demotional"},
    "structural": {"structural"},
    "conflational": {"conflational"},
    "categorial": {"categorial_nsubj_obj", "categorial_nsubj_iobj_obl"},
}


def _report(name, alignment_service, scope=CsrScope.ONE_TO_ONE_ONLY, with_direction=False):
    pair = golden_pair(name)
    csrs = DivergenceService(alignment_service, scope=scope, with_direction=with_direction).extract_csr(pair)
    return DorrService(alignment_service, with_direction=with_direction).detect_dorr(csrs, pair)


@pytest.mark.parametrize("name", DORR_NAMES)
def test_each_golden_pair_trips_only_its_own_counter(name, alignment_service):
    report = _report(name, alignment_service)
    fired = {f for f in COUNTER_FIELDS if getattr(report, f)}
    assert fired == EXPECTED[name]
    assert all(getattr(report, f) == 1 for f in fired)
    assert report.sentences == 1


def test_fig1_has_no_dorr_divergence(alignment_service):
    report = _report("fig1", alignment_service)
    assert all(getattr(report, f) == 0 for f in COUNTER_FIELDS)


def test_conflation_shows_structural_under_reduced_scope(alignment_service):
    report = _report("conflational", alignment_service, scope=CsrScope.REDUCED)
    assert report.conflational == 1
    assert report.structural == 1


@pytest.mark.parametrize("name", DORR_NAMES)
def test_golden_pairs_fire_with_direction(name, alignment_service):
    report = _report(name, alignment_service, with_direction=True)
    fired = {f for f in COUNTER_FIELDS if getattr(report, f)}
    assert fired == EXPECTED[name]


def _detect(pair, alignment_service, with_direction):
    csrs = DivergenceService(alignment_service, with_direction=with_direction).extract_csr(pair)
    return DorrService(alignment_service, with_direction=with_direction).detect_dorr(csrs, pair)


def test_promotional_head_swap_is_order_independent(alignment_service):
    # 源端中心词在左：advmod 下行对应 xcomp 上行
    pair = make_pair(
        [("John", "PROPN", 2, "nsubj"), ("goes", "VERB", 0, "root"), ("usually", "ADV", 2, "advmod")],
        GOLDEN["promotional"][1],
        "1-1 2-3 3-2",
    )
    for with_direction in (False, True):
        report = _detect(pair, alignment_service, with_direction)
        assert report.promotional == 1
        assert report.demotional == 0


def test_promotional_without_head_swap_needs_plain_mode(alignment_service):
    # advmod 上行对应 xcomp 上行：标签吻合，中心词没有互换
    src, tgt, _ = GOLDEN["promotional"]
    pair = make_pair(src, tgt, "1-1 2-3 3-2")
    assert _detect(pair, alignment_service, with_direction=False).promotional == 1
    assert _detect(pair, alignment_service, with_direction=True).promotional == 0


def test_thematic_with_obj_target(alignment_service):
    # I miss you / Tu me manques
    pair = make_pair(
        [("I", "PRON", 2, "nsubj"), ("miss", "VERB", 0, "root"), ("you", "PRON", 2, "obj")],
        [("Tu", "PRON", 3, "nsubj"), ("me", "PRON", 3, "obj"), ("manques", "VERB", 0, "root")],
        "1-2 2-3 3-1",
    )
    for with_direction in (False, True):
        report = _detect(pair, alignment_service, with_direction)
        assert report.thematic_nsubj_to_obj_obl == 1
        assert report.thematic_full == 1


@pytest.mark.parametrize("deprel", ["iobj", "obl"])
def test_categorial_iobj_and_obl_targets(deprel, alignment_service):
    src = GOLDEN["categorial"][0]
    tgt = [("Ich", "PRON", 2, "nsubj"), ("leide", "VERB", 0, "root"), ("an", "ADP", 4, "case"),
           ("Hunger", "NOUN", 2, deprel)]
    report = _detect(make_pair(src, tgt, "1-1 3-4"), alignment_service, with_direction=False)
    assert report.categorial_nsubj_obj == 0
    assert report.categorial_nsubj_iobj_obl == 1


def test_categorial_counts_are_nested(alignment_service):
    rng = random.Random(31)
    corpus = [random_pair(rng, k) for k in range(300)]
    for with_direction in (False, True):
        divergence = DivergenceService(alignment_service, with_direction=with_direction)
        per_pair = [(p, divergence.extract_csr(p)) for p in corpus]
        report = DorrService(alignment_service, with_direction=with_direction).detect_corpus(per_pair)
        assert report.categorial_nsubj_obj <= report.categorial_nsubj_iobj_obl


def test_corpus_report(alignment_service):
    pairs = [golden_pair(name, k) for k, name in enumerate(DORR_NAMES)]
    divergence = DivergenceService(alignment_service)
    per_pair = [(p, divergence.extract_csr(p)) for p in pairs]
    report = DorrService(alignment_service).detect_corpus(per_pair)
    rows = dict(report.rows())
    assert rows["#Sentences"] == 6
    assert rows[DorrType.THEMATIC_FULL.value] == 1
    assert rows[DorrType.CONFLATIONAL.value] == 1
    assert report.thematic_full_csr_pairs == 1
    assert [h.sent_index for h in report.per_sentence_hits] == sorted(h.sent_index for h in report.per_sentence_hits)

    reversed_report = DorrService(alignment_service).detect_corpus(list(reversed(per_pair)))
    assert reversed_report.rows() == report.rows()
    assert reversed_report.per_sentence_hits == report.per_sentence_hits
