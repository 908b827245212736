# -*- coding: utf-8 -*-
# @Time    : 2025/08/10
# @Author  : Derleser
# @File    : models.py
# @Software: CLMD
# @Description: 定义核心领域模型（树库、对齐、CSR、混淆矩阵、Dorr 报告、运行配置）

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple, Union

# 默认的内容词关系标签（对齐精度评估时使用的 13 个标签）
DEFAULT_CONTENT_DEPRELS = frozenset({
    "root", "nsubj", "amod", "nmod", "advmod", "nummod", "acl",
    "advcl", "xcomp", "compound", "flat", "obj", "obl",
})

# 边标签混淆矩阵的默认行（17 个单边关系）
DEFAULT_EDGE_ROWS = (
    "acl", "advcl", "advmod", "amod", "appos", "ccomp", "compound", "conj",
    "fixed", "flat", "nmod", "nsubj", "nummod", "obj", "obl", "parataxis", "xcomp",
)

DEFAULT_UPOS_CONTENT = frozenset({"ADJ", "ADV", "INTJ", "NOUN", "NUM", "PRON", "PROPN", "SYM", "VERB"})
DEFAULT_UPOS_FUNCTION = frozenset({"ADP", "AUX", "CCONJ", "DET", "PUNCT", "SCONJ"})

NONE_LABEL = "None"


def truncate_path(rendered: str, max_edges: Optional[int] = None) -> str:
    """可读输出中截断过长的路径（边以 + 连接），机器输出不调用"""
    if max_edges is None:
        return rendered
    parts = rendered.split("+")
    if len(parts) <= max_edges:
        return rendered
    return "+".join(parts[:max_edges]) + "+…"


@dataclass(frozen=True)
class Token:
    """CoNLL-U 中的一个句法词"""
    id: int
    form: str
    lemma: str
    upos: str
    xpos: str
    feats: str
    head: int
    deprel: str
    deps: str = "_"
    misc: str = "_"

    def to_fields(self) -> Tuple[str, ...]:
        return (str(self.id), self.form, self.lemma, self.upos, self.xpos,
                self.feats, str(self.head), self.deprel, self.deps, self.misc)


@dataclass(frozen=True)
class Sentence:
    """
    一个句子块。
    多词符号行与空节点行原样保留，只用于回写，不参与建树。
    """
    tokens: Tuple[Token, ...]
    sent_id: Optional[str] = None
    text: Optional[str] = None
    comments: Tuple[Tuple[str, Optional[str]], ...] = ()
    multiword_ranges: Tuple[Tuple[int, int], ...] = ()
    multiword_lines: Tuple[Tuple[str, ...], ...] = ()
    empty_nodes: Tuple[Tuple[str, ...], ...] = ()

    def __len__(self) -> int:
        return len(self.tokens)

    def token(self, token_id: int) -> Token:
        return self.tokens[token_id - 1]


@dataclass(frozen=True)
class DepTree:
    """带 parent/children/depth 索引的依存树，构建后只读"""
    sentence: Sentence
    parent: Mapping[int, int]
    children: Mapping[int, Tuple[int, ...]]
    depth: Mapping[int, int]

    def token(self, token_id: int) -> Token:
        return self.sentence.token(token_id)

    def __contains__(self, token_id: int) -> bool:
        return token_id in self.parent

    @property
    def size(self) -> int:
        return len(self.sentence.tokens)

    @property
    def roots(self) -> Tuple[int, ...]:
        return tuple(i for i, h in self.parent.items() if h == 0)

    def fragment_root(self, token_id: int) -> int:
        """沿 parent 上行，返回该词所在片段的 head-0 词"""
        node = token_id
        while self.parent[node] != 0:
            node = self.parent[node]
        return node


@dataclass(frozen=True)
class SentencePair:
    """一个平行句对：源树、目标树与内容词对齐"""
    index: int
    src: DepTree
    tgt: DepTree
    align: "AlignmentGraph"


class ComponentKind(Enum):
    ONE_TO_ONE = "OneToOne"
    MANY_TO_ONE = "ManyToOne"
    ONE_TO_MANY = "OneToMany"
    MANY_TO_MANY = "ManyToMany"

    @classmethod
    def classify(cls, n_src: int, n_tgt: int) -> "ComponentKind":
        if n_src == 1 and n_tgt == 1:
            return cls.ONE_TO_ONE
        if n_src > 1 and n_tgt == 1:
            return cls.MANY_TO_ONE
        if n_src == 1 and n_tgt > 1:
            return cls.ONE_TO_MANY
        return cls.MANY_TO_MANY


@dataclass(frozen=True)
class AlignmentGraph:
    """一个句对的词对齐，链接为 1-based (src_id, tgt_id)"""
    links: FrozenSet[Tuple[int, int]] = frozenset()

    def __len__(self) -> int:
        return len(self.links)

    @property
    def src_ids(self) -> FrozenSet[int]:
        return frozenset(s for s, _ in self.links)

    @property
    def tgt_ids(self) -> FrozenSet[int]:
        return frozenset(t for _, t in self.links)

    def targets_of(self, src_id: int) -> FrozenSet[int]:
        return frozenset(t for s, t in self.links if s == src_id)

    def to_pharaoh(self, index_base: int = 1) -> str:
        shift = 1 - index_base
        return " ".join(f"{s - shift}-{t - shift}" for s, t in sorted(self.links))


@dataclass(frozen=True)
class AlignmentComponent:
    src_ids: FrozenSet[int]
    tgt_ids: FrozenSet[int]
    kind: ComponentKind


@dataclass(frozen=True)
class ReducedAlignment:
    """一对一对应 A′：pairs 为 src_id -> tgt_id 的单射"""
    pairs: Mapping[int, int]
    dropped_components: Tuple[AlignmentComponent, ...] = ()

    @property
    def inverse(self) -> Dict[int, int]:
        return {t: s for s, t in self.pairs.items()}


class ContentMode(Enum):
    DEPREL_LIST = "deprel"
    UPOS_LIST = "upos"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class ContentPolicy:
    """内容词判定策略"""
    mode: ContentMode = ContentMode.DEPREL_LIST
    deprel_whitelist: FrozenSet[str] = DEFAULT_CONTENT_DEPRELS
    upos_content: FrozenSet[str] = DEFAULT_UPOS_CONTENT
    upos_function: FrozenSet[str] = DEFAULT_UPOS_FUNCTION
    spatial_adp_as_content: bool = False
    spatial_lemmas: FrozenSet[str] = frozenset()

    def __post_init__(self):
        if self.mode in (ContentMode.DEPREL_LIST, ContentMode.HYBRID) and not self.deprel_whitelist:
            raise ValueError("deprel whitelist must not be empty")
        if self.mode is ContentMode.UPOS_LIST and not self.upos_content:
            raise ValueError("upos content list must not be empty")


class Direction(Enum):
    UP = "up"
    DOWN = "down"

    @property
    def arrow(self) -> str:
        return "↑" if self is Direction.UP else "↓"


@dataclass(frozen=True)
class PathType:
    """依存路径类型：边标签序列，可选方向"""
    labels: Tuple[str, ...]
    directions: Optional[Tuple[Direction, ...]] = None

    def __post_init__(self):
        if not self.labels:
            raise ValueError("a path needs at least one edge")
        if self.directions is not None and len(self.directions) != len(self.labels):
            raise ValueError("directions must match labels in length")

    def __len__(self) -> int:
        return len(self.labels)

    def render(self, max_edges: Optional[int] = None) -> str:
        if self.directions is None:
            parts = list(self.labels)
        else:
            parts = [f"{label}{d.arrow}" for label, d in zip(self.labels, self.directions)]
        return truncate_path("+".join(parts), max_edges)

    def __str__(self) -> str:
        return self.render()


class CsrOutcome(Enum):
    """目标端无路径时的特殊结果"""
    COLLAPSED = "Collapsed"
    UNALIGNED = "Unaligned"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Csr:
    """对应句法关系 (R_s, R_t)"""
    src_path: PathType
    tgt_path: Union[PathType, CsrOutcome]
    src_endpoints: Tuple[int, int]
    tgt_endpoints: Optional[Tuple[int, int]] = None
    no_path: bool = False

    @property
    def is_single_edge(self) -> bool:
        return len(self.src_path) == 1

    @property
    def tgt_render(self) -> str:
        return str(self.tgt_path)


@dataclass
class ConfusionMatrix:
    """
    源标签 -> 目标结果的计数。
    每个观测恰好落入 counts / collapsed / unaligned / other 之一。
    """
    row_labels: Tuple[str, ...]
    col_labels: Tuple[str, ...]
    counts: Dict[str, Counter] = field(default_factory=dict)
    collapsed: Counter = field(default_factory=Counter)
    unaligned: Counter = field(default_factory=Counter)
    other: Dict[str, Counter] = field(default_factory=dict)

    def add_cell(self, row: str, col: str, n: int = 1):
        self.counts.setdefault(row, Counter())[col] += n

    def add_other(self, row: str, path: str, n: int = 1):
        self.other.setdefault(row, Counter())[path] += n

    def cell(self, row: str, col: str) -> int:
        return self.counts.get(row, Counter())[col]

    def row_total(self, row: str) -> int:
        """行总数：counts + collapsed + other（不含 unaligned）"""
        return (sum(self.counts.get(row, Counter()).values())
                + self.collapsed[row]
                + sum(self.other.get(row, Counter()).values()))

    def observations(self, row: str) -> int:
        return self.row_total(row) + self.unaligned[row]

    def mcop(self, row: str) -> Optional[Tuple[str, int]]:
        """最常见的其他目标路径；并列时取字典序最小者"""
        tail = self.other.get(row)
        if not tail:
            return None
        path, n = min(tail.items(), key=lambda kv: (-kv[1], kv[0]))
        return path, n

    def merge(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        rows = self.row_labels + tuple(r for r in other.row_labels if r not in self.row_labels)
        cols = self.col_labels + tuple(c for c in other.col_labels if c not in self.col_labels)
        merged = ConfusionMatrix(row_labels=rows, col_labels=cols)
        for m in (self, other):
            for row, cells in m.counts.items():
                for col, n in cells.items():
                    merged.add_cell(row, col, n)
            for row, tail in m.other.items():
                for path, n in tail.items():
                    merged.add_other(row, path, n)
            merged.collapsed.update(m.collapsed)
            merged.unaligned.update(m.unaligned)
        return merged


class DorrType(Enum):
    THEMATIC_FULL = "Thematic-Full"
    THEMATIC = "Thematic nsubj→obj/obl"
    PROMOTIONAL = "Promotional"
    DEMOTIONAL = "Demotional"
    STRUCTURAL = "Structural"
    CONFLATIONAL = "Conflational"
    CATEGORIAL_NSUBJ_OBJ = "Categorial nsubj+obj"
    CATEGORIAL_NSUBJ_IOBJ_OBL = "Categorial nsubj+(i)obj/obl"


@dataclass(frozen=True)
class DorrHit:
    sent_index: int
    type: DorrType
    endpoints: Tuple[int, ...]


@dataclass
class DorrReport:
    """Dorr 分歧类型的绝对计数"""
    thematic_full: int = 0
    thematic_nsubj_to_obj_obl: int = 0
    promotional: int = 0
    demotional: int = 0
    structural: int = 0
    conflational: int = 0
    categorial_nsubj_obj: int = 0
    categorial_nsubj_iobj_obl: int = 0
    sentences: int = 0
    thematic_full_csr_pairs: int = 0
    per_sentence_hits: List[DorrHit] = field(default_factory=list)

    def merge(self, other: "DorrReport") -> "DorrReport":
        return DorrReport(
            thematic_full=self.thematic_full + other.thematic_full,
            thematic_nsubj_to_obj_obl=self.thematic_nsubj_to_obj_obl + other.thematic_nsubj_to_obj_obl,
            promotional=self.promotional + other.promotional,
            demotional=self.demotional + other.demotional,
            structural=self.structural + other.structural,
            conflational=self.conflational + other.conflational,
            categorial_nsubj_obj=self.categorial_nsubj_obj + other.categorial_nsubj_obj,
            categorial_nsubj_iobj_obl=self.categorial_nsubj_iobj_obl + other.categorial_nsubj_iobj_obl,
            sentences=self.sentences + other.sentences,
            thematic_full_csr_pairs=self.thematic_full_csr_pairs + other.thematic_full_csr_pairs,
            per_sentence_hits=self.per_sentence_hits + other.per_sentence_hits,
        )

    def rows(self) -> List[Tuple[str, int]]:
        """按表格顺序输出 (行名, 计数)"""
        return [
            (DorrType.THEMATIC_FULL.value, self.thematic_full),
            (DorrType.THEMATIC.value, self.thematic_nsubj_to_obj_obl),
            (DorrType.PROMOTIONAL.value, self.promotional),
            (DorrType.DEMOTIONAL.value, self.demotional),
            (DorrType.STRUCTURAL.value, self.structural),
            (DorrType.CONFLATIONAL.value, self.conflational),
            (DorrType.CATEGORIAL_NSUBJ_OBJ.value, self.categorial_nsubj_obj),
            (DorrType.CATEGORIAL_NSUBJ_IOBJ_OBL.value, self.categorial_nsubj_iobj_obl),
            ("#Sentences", self.sentences),
        ]


@dataclass(frozen=True)
class LabeledScores:
    """外部提供的按关系标签的分数，例如解析器 F 值"""
    scores: Mapping[str, float]


class CsrScope(Enum):
    ONE_TO_ONE_ONLY = "one-to-one"
    REDUCED = "reduced"


@dataclass(frozen=True)
class RunConfig:
    """一次运行的全部配置（默认值 < 配置文件 < 命令行参数）"""
    src_path: Optional[str] = None
    tgt_path: Optional[str] = None
    align_path: Optional[str] = None
    pred_path: Optional[str] = None
    scores_path: Optional[str] = None
    db_path: Optional[str] = None
    pair_by: str = "position"
    index_base: int = 1
    content_policy: ContentPolicy = ContentPolicy()
    strip_subtypes: bool = True
    with_direction: bool = False
    scope: CsrScope = CsrScope.ONE_TO_ONE_ONLY
    row_labels: Tuple[str, ...] = DEFAULT_EDGE_ROWS
    col_labels: Tuple[str, ...] = DEFAULT_EDGE_ROWS
    output_format: str = "tsv"
    output_dir: str = "clmd_out"
    threads: int = 1
    include_unaligned_entropy: bool = False
    render_max_edges: int = 8


@dataclass(frozen=True)
class StoredCsr:
    """结果库中的一条 CSR 记录，路径以渲染后的字符串保存"""
    run_id: int
    pair_index: int
    sent_id: Optional[str]
    src_endpoints: Tuple[int, int]
    tgt_endpoints: Optional[Tuple[int, int]]
    src_path: str
    tgt_path: str
    no_path: bool
