import pytest

from conftest import GOLDEN, conllu_text
from core.domain.errors import CorpusMismatchError, InputError
from core.domain.models import RunConfig
from core.services.conllu_service import ConlluService
from core.services.corpus_service import CorpusService


@pytest.fixture
def corpus_service(alignment_service, divergence_service):
    return CorpusService(ConlluService(), alignment_service, divergence_service)


def _config(paths, **kw):
    return RunConfig(src_path=paths["src"], tgt_path=paths["tgt"], align_path=paths["align"], **kw)


def test_load_corpus(corpus_service, write_corpus):
    pairs = corpus_service.load_corpus(_config(write_corpus(["fig1", "structural", "demotional"])))
    assert [p.index for p in pairs] == [0, 1, 2]
    assert pairs[0].src.sentence.sent_id == "s0"
    # 默认去掉子类型
    assert pairs[0].tgt.token(2).deprel == "acl"


def test_load_corpus_keeps_subtypes(corpus_service, write_corpus):
    pairs = corpus_service.load_corpus(_config(write_corpus(["fig1"]), strip_subtypes=False))
    assert pairs[0].tgt.token(2).deprel == "acl:relcl"


def test_count_mismatch(corpus_service, write_corpus):
    paths = write_corpus(["fig1", "structural"], align_override="2-3 4-1\n")
    with pytest.raises(CorpusMismatchError, match="2 sentence pairs but 1 alignment lines"):
        corpus_service.load_corpus(_config(paths))


def test_missing_file(corpus_service, tmp_path):
    with pytest.raises(InputError, match="cannot read"):
        corpus_service.read_text(str(tmp_path / "nope.conllu"))


def test_diagnose(corpus_service, write_corpus):
    ok = corpus_service.diagnose(_config(write_corpus(["fig1", "structural", "demotional"])))
    assert ok["pairs"] == 3 and ok["issues"] == [] and not ok["fatal"]

    paths = write_corpus(["fig1", "structural"], align_override="2-3 4-1\n# skipped\n1-1 99-2\n")
    bad = corpus_service.diagnose(_config(paths))
    assert bad["fatal"]
    (issue,) = bad["issues"]
    assert "pair 1 (line 3)" in issue and "99-2" in issue


def test_diagnose_reports_drops(corpus_service, write_corpus):
    paths = write_corpus(["structural"], align_override="1-1 2-1\n")
    report = corpus_service.diagnose(_config(paths))
    assert not report["fatal"]
    assert report["warnings"] == []
    paths = write_corpus(["structural"], align_override="1-1 4-1\n")
    report = corpus_service.diagnose(_config(paths))
    assert "depth tie" in report["warnings"][0]


def test_pair_by_sent_id(corpus_service, tmp_path):
    src = conllu_text(GOLDEN["fig1"][0], sent_id="a") + conllu_text(GOLDEN["structural"][0], sent_id="b")
    tgt = conllu_text(GOLDEN["structural"][1], sent_id="b") + conllu_text(GOLDEN["fig1"][1], sent_id="a")
    service = corpus_service.conllu_service
    src_sents, tgt_sents = corpus_service.pair_sentences(
        service.parse_conllu(src), service.parse_conllu(tgt), "sent_id"
    )
    assert [s.sent_id for s in tgt_sents] == ["a", "b"]
    with pytest.raises(CorpusMismatchError, match="no target counterpart"):
        corpus_service.pair_sentences(service.parse_conllu(src), tgt_sents[:1], "sent_id")


def test_extract_all_is_order_preserving(corpus_service, write_corpus):
    pairs = corpus_service.load_corpus(_config(write_corpus(list(GOLDEN))))
    assert corpus_service.extract_all(pairs, threads=4) == corpus_service.extract_all(pairs, threads=1)


def test_pair_by_sent_id_rejects_duplicates(corpus_service):
    service = corpus_service.conllu_service
    src = service.parse_conllu(conllu_text(GOLDEN["fig1"][0], sent_id="a"))
    tgt = service.parse_conllu(
        conllu_text(GOLDEN["fig1"][1], sent_id="a") + conllu_text(GOLDEN["structural"][1], sent_id="a")
    )
    with pytest.raises(CorpusMismatchError, match="duplicate target sent_id 'a'"):
        corpus_service.pair_sentences(src, tgt, "sent_id")
    twice = service.parse_conllu(
        conllu_text(GOLDEN["fig1"][0], sent_id="a") + conllu_text(GOLDEN["structural"][0], sent_id="a")
    )
    with pytest.raises(CorpusMismatchError, match="duplicate source sent_id 'a'"):
        corpus_service.pair_sentences(twice, tgt[:1], "sent_id")


def test_inputs_with_byte_order_mark(corpus_service, write_corpus):
    paths = write_corpus(["fig1", "structural"])
    for key in ("src", "align"):
        with open(paths[key], encoding="utf-8") as f:
            text = f.read()
        with open(paths[key], "w", encoding="utf-8-sig") as f:
            f.write(text)
    pairs = corpus_service.load_corpus(_config(paths))
    assert len(pairs) == 2
    assert pairs[0].src.sentence.sent_id == "s0"
    assert pairs[0].align.links == frozenset({(2, 3), (4, 1)})
