# -*- coding: utf-8 -*-
# @Time    : 2025/08/11
# @Author  : Derleser
# @File    : alignment_service.py
# @Software: CLMD
# @Description: 内容词对齐：Pharaoh 读取、连通分量分类、最高节点归约、对齐 P/R

import logging
from collections import Counter
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx

from ..domain.errors import AlignmentParseError, CorpusMismatchError
from ..domain.models import (
    AlignmentComponent,
    AlignmentGraph,
    ComponentKind,
    DepTree,
    ReducedAlignment,
)
from .conllu_service import strip_subtype

logger = logging.getLogger(__name__)


class AlignmentService:
    def __init__(self, index_base: int = 1):
        if index_base not in (0, 1):
            raise ValueError(f"index_base must be 0 or 1, got {index_base}")
        self.index_base = index_base

    def parse_alignment(self, text: str, index_base: Optional[int] = None) -> List[AlignmentGraph]:
        """
        读取 Pharaoh 格式对齐，每行一个句对。
        空行表示空对齐；'#' 开头的行被忽略，不占句对序号。
        """
        base = self.index_base if index_base is None else index_base
        graphs = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if line.startswith("#"):
                continue
            links = set()
            for item in line.split():
                src, sep, tgt = item.partition("-")
                if not sep:
                    raise AlignmentParseError(f"malformed link '{item}'", lineno)
                try:
                    i, j = int(src), int(tgt)
                except ValueError:
                    raise AlignmentParseError(f"non-numeric index in '{item}'", lineno) from None
                if i < base or j < base:
                    raise AlignmentParseError(f"index below base {base} in '{item}'", lineno)
                links.add((i + 1 - base, j + 1 - base))
            graphs.append(AlignmentGraph(frozenset(links)))
        return graphs

    def components(self, a: AlignmentGraph) -> List[AlignmentComponent]:
        """将二部链接图划分为连通分量并分类"""
        graph = nx.Graph()
        graph.add_edges_from((("s", s), ("t", t)) for s, t in a.links)

        result = []
        for nodes in nx.connected_components(graph):
            src_ids = frozenset(i for side, i in nodes if side == "s")
            tgt_ids = frozenset(i for side, i in nodes if side == "t")
            result.append(AlignmentComponent(
                src_ids=src_ids,
                tgt_ids=tgt_ids,
                kind=ComponentKind.classify(len(src_ids), len(tgt_ids)),
            ))
        result.sort(key=lambda c: (min(c.src_ids), min(c.tgt_ids)))
        return result

    def reduce(self, a: AlignmentGraph, src: DepTree, tgt: DepTree) -> ReducedAlignment:
        """
        归约为一对一对应 A′。
        多对一时保留源端深度严格最小的节点，一对多时对称处理；
        深度并列或多对多的分量记入 dropped_components。
        """
        pairs: Dict[int, int] = {}
        dropped = []
        for comp in self.components(a):
            if comp.kind is ComponentKind.ONE_TO_ONE:
                pairs[next(iter(comp.src_ids))] = next(iter(comp.tgt_ids))
            elif comp.kind is ComponentKind.MANY_TO_ONE:
                head = self._highest(comp.src_ids, src)
                if head is None:
                    logger.debug(f"源端深度并列，丢弃分量 {sorted(comp.src_ids)}")
                    dropped.append(comp)
                else:
                    pairs[head] = next(iter(comp.tgt_ids))
            elif comp.kind is ComponentKind.ONE_TO_MANY:
                head = self._highest(comp.tgt_ids, tgt)
                if head is None:
                    logger.debug(f"目标端深度并列，丢弃分量 {sorted(comp.tgt_ids)}")
                    dropped.append(comp)
                else:
                    pairs[next(iter(comp.src_ids))] = head
            else:
                logger.debug(f"多对多分量被丢弃: {sorted(comp.src_ids)} x {sorted(comp.tgt_ids)}")
                dropped.append(comp)
        return ReducedAlignment(pairs=pairs, dropped_components=tuple(dropped))

    def one_to_one_pairs(self, a: AlignmentGraph) -> Dict[int, int]:
        """只取一对一分量的对应"""
        return {
            next(iter(c.src_ids)): next(iter(c.tgt_ids))
            for c in self.components(a)
            if c.kind is ComponentKind.ONE_TO_ONE
        }

    def alignment_pr(
        self,
        gold: Sequence[AlignmentGraph],
        pred: Sequence[AlignmentGraph],
        restrict: Optional[FrozenSet[str]] = None,
        src_trees: Optional[Sequence[DepTree]] = None,
    ) -> dict:
        """
        对齐的精确率与召回率。
        给定 restrict 与源树时，只统计源词关系标签（去子类型后）在集合内的链接。
        精确率在预测为空时为 None。
        """
        if len(gold) != len(pred):
            raise CorpusMismatchError(f"gold has {len(gold)} pairs, pred has {len(pred)}")
        if src_trees is not None and len(src_trees) != len(gold):
            raise CorpusMismatchError(f"{len(src_trees)} source trees for {len(gold)} alignment pairs")

        hit = n_pred = n_gold = 0
        gold_by_label: Counter = Counter()
        hit_by_label: Counter = Counter()
        for k, (g, p) in enumerate(zip(gold, pred)):
            tree = src_trees[k] if src_trees is not None else None
            g_links = self._restricted(g.links, tree, restrict)
            p_links = self._restricted(p.links, tree, restrict)
            common = g_links & p_links
            hit += len(common)
            n_pred += len(p_links)
            n_gold += len(g_links)
            if tree is not None:
                for s, t in g_links:
                    label = self._label(tree, s)
                    gold_by_label[label] += 1
                    if (s, t) in common:
                        hit_by_label[label] += 1

        return {
            "precision": hit / n_pred if n_pred else None,
            "recall": hit / n_gold if n_gold else None,
            "per_label_recall": {label: hit_by_label[label] / n for label, n in sorted(gold_by_label.items())},
            "n_gold": n_gold,
            "n_pred": n_pred,
            "n_correct": hit,
        }

    def summarize(self, graphs: Sequence[AlignmentGraph], reduced: Sequence[ReducedAlignment]) -> dict:
        """分量类型统计，以及一对一分量覆盖的已对齐源词比例"""
        kinds: Counter = Counter()
        src_tokens: Counter = Counter()
        for graph in graphs:
            for comp in self.components(graph):
                kinds[comp.kind.value] += 1
                src_tokens[comp.kind.value] += len(comp.src_ids)
        aligned_src = sum(src_tokens.values())
        ties = sum(
            1 for r in reduced for c in r.dropped_components if c.kind is not ComponentKind.MANY_TO_MANY
        )
        return {
            "components": {k.value: kinds[k.value] for k in ComponentKind},
            "aligned_src_tokens": aligned_src,
            "one_to_one_src_share": src_tokens[ComponentKind.ONE_TO_ONE.value] / aligned_src if aligned_src else None,
            "depth_tie_drops": ties,
            "many_to_many_drops": kinds[ComponentKind.MANY_TO_MANY.value],
        }

    @staticmethod
    def _highest(ids: FrozenSet[int], tree: DepTree) -> Optional[int]:
        ranked = sorted(ids, key=lambda i: tree.depth[i])
        if len(ranked) > 1 and tree.depth[ranked[0]] == tree.depth[ranked[1]]:
            return None
        return ranked[0]

    @staticmethod
    def _label(tree: DepTree, token_id: int) -> str:
        if token_id not in tree:
            return "_"
        return strip_subtype(tree.token(token_id).deprel)

    def _restricted(self, links: FrozenSet[Tuple[int, int]], tree: Optional[DepTree],
                    restrict: Optional[FrozenSet[str]]) -> FrozenSet[Tuple[int, int]]:
        if restrict is None or tree is None:
            return links
        return frozenset((s, t) for s, t in links if self._label(tree, s) in restrict)
