import random

import pytest

from conftest import conllu_text, random_tree_rows
from core.domain.errors import ConlluParseError, TreeError
from core.services.conllu_service import ConlluService, ParseOptions, strip_subtype

ROUND_TRIP = (
    "# sent_id = d1\n"
    "# text = Vámonos al mar\n"
    "1-2\tVámonos\t_\t_\t_\t_\t_\t_\t_\t_\n"
    "1\tVamos\tir\tVERB\t_\t_\t0\troot\t_\t_\n"
    "2\tnos\tnosotros\tPRON\t_\t_\t1\tobj\t_\t_\n"
    "2.1\tya\tya\tADV\t_\t_\t_\t_\t1:advmod\t_\n"
    "3-4\tal\t_\t_\t_\t_\t_\t_\t_\t_\n"
    "3\ta\ta\tADP\t_\t_\t5\tcase\t_\t_\n"
    "4\tel\tel\tDET\t_\t_\t5\tdet\t_\t_\n"
    "5\tmar\tmar\tNOUN\t_\tGender=Masc\t1\tobl:arg\t_\tSpaceAfter=No\n"
    "\n"
    "# sent_id = d2\n"
    "1\tSí\tsí\tINTJ\t_\t_\t0\troot\t_\t_\n"
    "\n"
)


def _line(id_, head, deprel="dep", upos="NOUN"):
    return "\t".join([str(id_), "w", "w", upos, "_", "_", str(head), deprel, "_", "_"])


def test_strip_subtype():
    assert strip_subtype("acl:relcl") == "acl"
    assert strip_subtype("nsubj") == "nsubj"


def test_parse_keeps_metadata_and_fields():
    service = ConlluService()
    first, second = service.parse_conllu(ROUND_TRIP)
    assert first.sent_id == "d1"
    assert first.text == "Vámonos al mar"
    assert len(first) == 5
    assert first.token(5).deprel == "obl:arg"
    assert first.token(5).feats == "Gender=Masc"
    assert first.multiword_ranges == ((1, 2), (3, 4))
    assert len(first.empty_nodes) == 1
    assert second.sent_id == "d2"


def test_parse_strips_subtypes_when_asked():
    service = ConlluService(ParseOptions(strip_subtypes=True))
    first, _ = service.parse_conllu(ROUND_TRIP)
    assert first.token(5).deprel == "obl"


def test_serialize_round_trip():
    service = ConlluService()
    assert service.serialize_conllu(service.parse_conllu(ROUND_TRIP)) == ROUND_TRIP


def test_serialize_round_trip_random_trees():
    rng = random.Random(11)
    service = ConlluService()
    text = "".join(conllu_text(random_tree_rows(rng, rng.randint(1, 12)), sent_id=f"r{k}") for k in range(50))
    assert service.serialize_conllu(service.parse_conllu(text)) == text


def test_comment_only_block_is_skipped():
    text = "# newdoc id = x\n\n" + conllu_text([("a", "NOUN", 0, "root")])
    assert len(ConlluService().parse_conllu(text)) == 1


def test_self_loop_reports_line():
    text = "\n".join(["# sent_id = 1", _line(1, 0, "root"), _line(2, 2), ""]) + "\n"
    with pytest.raises(ConlluParseError, match="self-loop at line 3"):
        ConlluService().parse_conllu(text)


@pytest.mark.parametrize("bad, message", [
    ("1\tw\tw\tNOUN\t_\t_\t0\troot\t_", "expected 10 columns"),
    (_line(1, "x"), "non-numeric head"),
    (_line(2, 0), "id gap"),
    (_line(1, 7), "out of range"),
    (_line(1, -1), "non-negative"),
])
def test_malformed_lines(bad, message):
    with pytest.raises(ConlluParseError, match=message) as info:
        ConlluService().parse_conllu(bad + "\n\n")
    assert info.value.line == 1


def test_duplicate_id():
    text = "\n".join([_line(1, 0, "root"), _line(1, 0, "root")]) + "\n\n"
    with pytest.raises(ConlluParseError, match="duplicate id 1 at line 2"):
        ConlluService().parse_conllu(text)


def test_cycle_is_tree_error():
    text = "\n".join(["# sent_id = c", _line(1, 2), _line(2, 1), _line(3, 0, "root")]) + "\n\n"
    with pytest.raises(TreeError, match="cycle"):
        ConlluService().parse_conllu(text)


def test_tree_indices():
    service = ConlluService()
    (sentence,) = service.parse_conllu(conllu_text([
        ("The", "DET", 2, "det"), ("article", "NOUN", 0, "root"),
        ("by", "ADP", 4, "case"), ("Thompson", "PROPN", 2, "nmod"),
    ]))
    tree = service.build_tree(sentence)
    assert tree.depth == {1: 1, 2: 0, 3: 2, 4: 1}
    assert tree.children[2] == (1, 4)
    assert tree.roots == (2,)


def test_multiple_roots_allowed():
    service = ConlluService()
    (sentence,) = service.parse_conllu("\n".join([_line(1, 0, "root"), _line(2, 0, "root"), _line(3, 2)]) + "\n\n")
    tree = service.build_tree(sentence)
    assert tree.roots == (1, 2)
    assert tree.fragment_root(3) == 2
    assert tree.depth[3] == 1
