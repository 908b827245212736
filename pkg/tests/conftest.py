import os
import random
import sys
from typing import Dict, List, Sequence, Tuple

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from core.services.alignment_service import AlignmentService
from core.services.conllu_service import ConlluService
from core.services.divergence_service import DivergenceService
from core.services.dorr_service import DorrService
from core.domain.models import DepTree, SentencePair

# (form, upos, head, deprel)
Row = Tuple[str, str, int, str]

GOLDEN: Dict[str, Tuple[List[Row], List[Row], str]] = {
    # The article by Thompson / Tomseuni gigohan nonmuneun
    "fig1": (
        [("The", "DET", 2, "det"), ("article", "NOUN", 0, "root"),
         ("by", "ADP", 4, "case"), ("Thompson", "PROPN", 2, "nmod")],
        [("Tomseuni", "PROPN", 2, "nsubj"), ("gigohan", "VERB", 3, "acl:relcl"),
         ("nonmuneun", "NOUN", 0, "root")],
        "2-3 4-1",
    ),
    "thematic": (
        [("I", "PRON", 2, "nsubj"), ("like", "VERB", 0, "root"), ("Mary", "PROPN", 2, "obj")],
        [("María", "PROPN", 3, "nsubj"), ("me", "PRON", 3, "iobj"), ("gusta", "VERB", 0, "root"),
         ("a", "ADP", 5, "case"), ("mí", "PRON", 3, "obl")],
        "1-5 2-3 3-1",
    ),
    "promotional": (
        [("John", "PROPN", 3, "nsubj"), ("usually", "ADV", 3, "advmod"), ("goes", "VERB", 0, "root"),
         ("home", "ADV", 3, "advmod")],
        [("Juan", "PROPN", 2, "nsubj"), ("suele", "VERB", 0, "root"), ("ir", "VERB", 2, "xcomp"),
         ("a", "ADP", 5, "case"), ("casa", "NOUN", 3, "obl")],
        "1-1 2-2 3-3",
    ),
    "demotional": (
        [("I", "PRON", 2, "nsubj"), ("like", "VERB", 0, "root"), ("eating", "VERB", 2, "xcomp")],
        [("Ich", "PRON", 2, "nsubj"), ("esse", "VERB", 0, "root"), ("gern", "ADV", 2, "advmod")],
        "1-1 2-3 3-2",
    ),
    "structural": (
        [("John", "PROPN", 2, "nsubj"), ("entered", "VERB", 0, "root"), ("the", "DET", 4, "det"),
         ("house", "NOUN", 2, "obj")],
        [("Juan", "PROPN", 2, "nsubj"), ("entró", "VERB", 0, "root"), ("en", "ADP", 5, "case"),
         ("la", "DET", 5, "det"), ("casa", "NOUN", 2, "obl")],
        "1-1 2-2 4-5",
    ),
    "conflational": (
        [("I", "PRON", 2, "nsubj"), ("stabbed", "VERB", 0, "root"), ("John", "PROPN", 2, "obj")],
        [("Yo", "PRON", 3, "nsubj"), ("le", "PRON", 3, "iobj"), ("di", "VERB", 0, "root"),
         ("puñaladas", "NOUN", 3, "obj"), ("a", "ADP", 6, "case"), ("Juan", "PROPN", 3, "obl")],
        "1-1 2-3 2-4 3-6",
    ),
    "categorial": (
        [("I", "PRON", 3, "nsubj"), ("am", "AUX", 3, "cop"), ("hungry", "ADJ", 0, "root")],
        [("Ich", "PRON", 2, "nsubj"), ("habe", "VERB", 0, "root"), ("Hunger", "NOUN", 2, "obj")],
        "1-1 3-3",
    ),
}

DORR_NAMES = ("thematic", "promotional", "demotional", "structural", "conflational", "categorial")

RANDOM_LABELS = ("nsubj", "obj", "obl", "amod", "nmod", "advmod", "acl:relcl", "xcomp", "det", "case", "conj")


def conllu_text(rows: Sequence[Row], sent_id: str = None) -> str:
    lines = []
    if sent_id is not None:
        lines.append(f"# sent_id = {sent_id}")
        lines.append("# text = " + " ".join(r[0] for r in rows))
    for i, (form, upos, head, deprel) in enumerate(rows, start=1):
        lines.append("\t".join([str(i), form, form.lower(), upos, "_", "_", str(head), deprel, "_", "_"]))
    return "\n".join(lines) + "\n\n"


def make_tree(rows: Sequence[Row]) -> DepTree:
    service = ConlluService()
    (sentence,) = service.parse_conllu(conllu_text(rows))
    return service.build_tree(sentence)


def make_pair(src_rows: Sequence[Row], tgt_rows: Sequence[Row], pharaoh: str, index: int = 0) -> SentencePair:
    (align,) = AlignmentService().parse_alignment(pharaoh + "\n")
    return SentencePair(index=index, src=make_tree(src_rows), tgt=make_tree(tgt_rows), align=align)


def golden_pair(name: str, index: int = 0) -> SentencePair:
    src, tgt, pharaoh = GOLDEN[name]
    return make_pair(src, tgt, pharaoh, index)


def random_tree_rows(rng: random.Random, n: int, labels: Sequence[str] = RANDOM_LABELS) -> List[Row]:
    """随机单根树；节点编号随机打乱，保证父节点不一定在左侧"""
    ids = list(range(1, n + 1))
    rng.shuffle(ids)
    heads = {ids[0]: 0}
    for k in range(1, n):
        heads[ids[k]] = ids[rng.randrange(k)]
    upos = ("NOUN", "VERB", "ADJ", "ADV", "PRON", "PROPN")
    return [
        (f"w{i}", rng.choice(upos), heads[i], "root" if heads[i] == 0 else rng.choice(labels))
        for i in range(1, n + 1)
    ]


def random_links(rng: random.Random, n_src: int, n_tgt: int) -> str:
    """随机对齐，混入多对一、一对多与未对齐词"""
    links = set()
    for s in range(1, n_src + 1):
        roll = rng.random()
        if roll < 0.15:
            continue
        t = rng.randint(1, n_tgt)
        links.add((s, t))
        if roll > 0.85:
            links.add((s, rng.randint(1, n_tgt)))
    return " ".join(f"{s}-{t}" for s, t in sorted(links))


def random_pair(rng: random.Random, index: int = 0) -> SentencePair:
    n_src, n_tgt = rng.randint(2, 10), rng.randint(2, 10)
    return make_pair(
        random_tree_rows(rng, n_src), random_tree_rows(rng, n_tgt), random_links(rng, n_src, n_tgt), index
    )


@pytest.fixture
def alignment_service():
    return AlignmentService()


@pytest.fixture
def divergence_service(alignment_service):
    return DivergenceService(alignment_service)


@pytest.fixture
def dorr_service(alignment_service):
    return DorrService(alignment_service)


@pytest.fixture
def fig1_pair():
    return golden_pair("fig1")


@pytest.fixture
def write_corpus(tmp_path):
    """把若干金标准句对写成三个输入文件，返回路径字典"""

    def write(names: Sequence[str], align_override: str = None) -> Dict[str, str]:
        src = "".join(conllu_text(GOLDEN[n][0], sent_id=f"s{k}") for k, n in enumerate(names))
        tgt = "".join(conllu_text(GOLDEN[n][1], sent_id=f"s{k}") for k, n in enumerate(names))
        align = align_override if align_override is not None else "".join(GOLDEN[n][2] + "\n" for n in names)
        paths = {}
        for key, text in (("src", src), ("tgt", tgt), ("align", align)):
            path = tmp_path / f"corpus.{key}"
            path.write_text(text, encoding="utf-8")
            paths[key] = str(path)
        return paths

    return write
