# -*- coding: utf-8 -*-
# @Time    : 2025/08/12
# @Author  : Derleser
# @File    : divergence_service.py
# @Software: CLMD
# @Description: 内容词判定、依存路径、CSR 抽取，以及 POS/边标签混淆矩阵、翻译熵与保持指数

import logging
from collections import Counter
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from scipy.stats import entropy as shannon_entropy

from ..domain.errors import NoPathError, StatsError
from ..domain.models import (
    NONE_LABEL,
    ConfusionMatrix,
    ContentMode,
    ContentPolicy,
    Csr,
    CsrOutcome,
    CsrScope,
    DEFAULT_EDGE_ROWS,
    DepTree,
    Direction,
    PathType,
    SentencePair,
    Token,
)
from .alignment_service import AlignmentService
from .conllu_service import strip_subtype

logger = logging.getLogger(__name__)

COLLAPSED = CsrOutcome.COLLAPSED.value


class DivergenceService:
    def __init__(self, alignment_service: AlignmentService, policy: Optional[ContentPolicy] = None,
                 scope: CsrScope = CsrScope.ONE_TO_ONE_ONLY, with_direction: bool = False):
        self.alignment_service = alignment_service
        self.policy = policy or ContentPolicy()
        self.scope = scope
        self.with_direction = with_direction

    # ---------- 内容词 ----------

    def is_content(self, token: Token, tree: DepTree, policy: Optional[ContentPolicy] = None) -> bool:
        """按策略判断一个词是否为内容词"""
        policy = policy or self.policy
        if token.id not in tree:
            raise ValueError(f"token {token.id} is not part of the tree")
        if policy.mode is ContentMode.UPOS_LIST:
            return token.upos in policy.upos_content
        if policy.mode is ContentMode.HYBRID:
            if token.upos == "ADP":
                return policy.spatial_adp_as_content and token.lemma in policy.spatial_lemmas
            if token.upos in policy.upos_function:
                return False
        return strip_subtype(token.deprel) in policy.deprel_whitelist

    def content_ids(self, tree: DepTree, policy: Optional[ContentPolicy] = None) -> List[int]:
        return [t.id for t in tree.sentence.tokens if self.is_content(t, tree, policy)]

    # ---------- 依存路径 ----------

    def dependency_path(self, tree: DepTree, u: int, v: int, with_direction: Optional[bool] = None) -> PathType:
        """
        u 到 v 的树上路径：先上行到最近公共祖先，再下行到 v。
        每条边取子节点的关系标签；不经过人工根节点 0。
        """
        if with_direction is None:
            with_direction = self.with_direction
        if u == v:
            raise ValueError("path endpoints must differ")

        up_chain = self._ancestors(tree, u)
        down_chain = self._ancestors(tree, v)
        if up_chain[-1] != down_chain[-1]:
            raise NoPathError(u, v)

        on_down = {node: i for i, node in enumerate(down_chain)}
        labels: List[str] = []
        directions: List[Direction] = []
        lca_index = 0
        for node in up_chain:
            if node in on_down:
                lca_index = on_down[node]
                break
            labels.append(tree.token(node).deprel)
            directions.append(Direction.UP)
        for node in reversed(down_chain[:lca_index]):
            labels.append(tree.token(node).deprel)
            directions.append(Direction.DOWN)

        return PathType(tuple(labels), tuple(directions) if with_direction else None)

    @staticmethod
    def _ancestors(tree: DepTree, node: int) -> List[int]:
        chain = [node]
        while tree.parent[chain[-1]] != 0:
            chain.append(tree.parent[chain[-1]])
        return chain

    # ---------- CSR ----------

    def correspondents(self, pair: SentencePair, scope: Optional[CsrScope] = None) -> Dict[int, int]:
        scope = scope or self.scope
        if scope is CsrScope.ONE_TO_ONE_ONLY:
            return self.alignment_service.one_to_one_pairs(pair.align)
        return dict(self.alignment_service.reduce(pair.align, pair.src, pair.tgt).pairs)

    def extract_csr(self, pair: SentencePair, policy: Optional[ContentPolicy] = None,
                    scope: Optional[CsrScope] = None, with_direction: Optional[bool] = None) -> List[Csr]:
        """
        对每一对已对齐的源端内容词抽取 CSR。
        路径从左侧（id 较小）的源词出发；折叠由完整对齐 A 判定，先于缺失对应判定。
        """
        policy = policy or self.policy
        corr = self.correspondents(pair, scope)
        aligned = sorted(
            s for s in pair.align.src_ids
            if s in pair.src and self.is_content(pair.src.token(s), pair.src, policy)
        )

        csrs = []
        for a, b in combinations(aligned, 2):
            try:
                src_path = self.dependency_path(pair.src, a, b, with_direction)
            except NoPathError:
                logger.debug(f"句对 {pair.index}: 源词 {a} 与 {b} 不在同一片段，跳过")
                continue

            shared = pair.align.targets_of(a) & pair.align.targets_of(b)
            if shared:
                t = min(shared)
                csrs.append(Csr(src_path, CsrOutcome.COLLAPSED, (a, b), (t, t)))
            elif a in corr and b in corr:
                a2, b2 = corr[a], corr[b]
                try:
                    tgt_path = self.dependency_path(pair.tgt, a2, b2, with_direction)
                    csrs.append(Csr(src_path, tgt_path, (a, b), (a2, b2)))
                except NoPathError:
                    logger.debug(f"句对 {pair.index}: 目标词 {a2} 与 {b2} 之间无路径")
                    csrs.append(Csr(src_path, CsrOutcome.UNALIGNED, (a, b), (a2, b2), no_path=True))
            else:
                csrs.append(Csr(src_path, CsrOutcome.UNALIGNED, (a, b)))
        return csrs

    # ---------- 混淆矩阵 ----------

    def pos_confusion(self, corpus: Sequence[SentencePair], policy: Optional[ContentPolicy] = None) -> ConfusionMatrix:
        """
        基于 A′ 的 POS 映射计数。
        无对应的源端内容词记入 None 列，无对应的目标端内容词记入 None 行。
        """
        policy = policy or self.policy
        matrix = ConfusionMatrix(row_labels=(), col_labels=())
        for pair in corpus:
            self._add_pos_counts(matrix, pair, policy)
        return self._with_sorted_labels(matrix)

    def _add_pos_counts(self, matrix: ConfusionMatrix, pair: SentencePair, policy: ContentPolicy):
        pairs = self.alignment_service.reduce(pair.align, pair.src, pair.tgt).pairs
        inverse = {t: s for s, t in pairs.items()}
        for sid in self.content_ids(pair.src, policy):
            col = pair.tgt.token(pairs[sid]).upos if sid in pairs and pairs[sid] in pair.tgt else NONE_LABEL
            matrix.add_cell(pair.src.token(sid).upos, col)
        for tid in self.content_ids(pair.tgt, policy):
            if tid not in inverse:
                matrix.add_cell(NONE_LABEL, pair.tgt.token(tid).upos)

    def edge_confusion(self, corpus: Sequence[SentencePair], policy: Optional[ContentPolicy] = None,
                       column_labels: Optional[Sequence[str]] = None, row_labels: Optional[Sequence[str]] = None,
                       strip_subtypes: bool = True, with_direction: Optional[bool] = None,
                       scope: Optional[CsrScope] = None) -> ConfusionMatrix:
        """单边源端 CSR 的目标端结果矩阵"""
        rows = tuple(row_labels or DEFAULT_EDGE_ROWS)
        cols = tuple(column_labels or rows)
        if with_direction is None:
            with_direction = self.with_direction
        matrix = ConfusionMatrix(row_labels=rows, col_labels=cols)
        for pair in corpus:
            csrs = self.extract_csr(pair, policy, scope, with_direction)
            self.add_edge_counts(matrix, csrs, strip_subtypes)
        return matrix

    def add_edge_counts(self, matrix: ConfusionMatrix, csrs: Sequence[Csr], strip_subtypes: bool = True):
        rows = set(matrix.row_labels)
        cols = set(matrix.col_labels)
        for csr in csrs:
            if not csr.is_single_edge:
                continue
            src_path = self._normalize(csr.src_path, strip_subtypes)
            row = src_path.labels[0]
            if row not in rows:
                continue
            if csr.tgt_path is CsrOutcome.UNALIGNED:
                matrix.unaligned[row] += 1
            elif csr.tgt_path is CsrOutcome.COLLAPSED:
                matrix.collapsed[row] += 1
            else:
                tgt_path = self._normalize(csr.tgt_path, strip_subtypes)
                same_direction = tgt_path.directions is None or tgt_path.directions == src_path.directions
                if len(tgt_path) == 1 and tgt_path.labels[0] in cols and same_direction:
                    matrix.add_cell(row, tgt_path.labels[0])
                else:
                    matrix.add_other(row, tgt_path.render())

    @staticmethod
    def _normalize(path: PathType, strip_subtypes: bool) -> PathType:
        if not strip_subtypes:
            return path
        return PathType(tuple(strip_subtype(label) for label in path.labels), path.directions)

    @staticmethod
    def _with_sorted_labels(matrix: ConfusionMatrix) -> ConfusionMatrix:
        rows = set(matrix.counts)
        cols = {c for cells in matrix.counts.values() for c in cells}
        matrix.row_labels = tuple(sorted(rows))
        matrix.col_labels = tuple(sorted(cols))
        return matrix

    # ---------- 派生统计 ----------

    def percentages(self, m: ConfusionMatrix) -> Dict[str, dict]:
        """
        行归一化百分比，分母为 counts + Collapsed + Other（不含 Unaligned）。
        Other 以尾部总和给出，另附含 Collapsed 的口径。
        """
        result = {}
        for row in m.row_labels:
            total = m.row_total(row)
            if total == 0:
                logger.info(f"行 {row} 没有观测，已省略")
                continue
            cells = {col: 100.0 * m.cell(row, col) / total for col in m.col_labels}
            other_sum = sum(m.other.get(row, Counter()).values())
            top = m.mcop(row)
            result[row] = {
                "cells": cells,
                "Collapsed": 100.0 * m.collapsed[row] / total,
                "Other": 100.0 * other_sum / total,
                "OtherInclCollapsed": 100.0 * (other_sum + m.collapsed[row]) / total,
                "MCOP%": 100.0 * top[1] / total if top else 0.0,
                "MCOP": top[0] if top else "",
            }
        return result

    def outcome_counts(self, m: ConfusionMatrix, row: str, include_unaligned: bool = False) -> Counter:
        outcomes = Counter(m.counts.get(row, Counter()))
        outcomes.update(m.other.get(row, Counter()))
        if m.collapsed[row]:
            outcomes[COLLAPSED] += m.collapsed[row]
        if include_unaligned and m.unaligned[row]:
            outcomes[CsrOutcome.UNALIGNED.value] += m.unaligned[row]
        return +outcomes

    def translation_entropy(self, m: ConfusionMatrix, row: str, include_unaligned: bool = False) -> float:
        """一行目标端结果分布的香农熵（以 2 为底）"""
        if row not in m.row_labels:
            raise StatsError(f"unknown row '{row}'")
        outcomes = self.outcome_counts(m, row, include_unaligned)
        if not outcomes:
            raise StatsError(f"row '{row}' has no observations")
        return float(shannon_entropy(sorted(outcomes.values()), base=2))

    def preservation(self, m: ConfusionMatrix) -> Dict[str, float]:
        """保持指数：恒等映射在行总数中的比例"""
        result = {}
        for row in m.row_labels:
            total = m.row_total(row)
            if total:
                result[row] = m.cell(row, row) / total
        return result

    def diagonal_share(self, m: ConfusionMatrix) -> Optional[float]:
        """整个矩阵中落在主对角线上的观测比例"""
        total = sum(m.row_total(row) for row in m.row_labels)
        if not total:
            return None
        return sum(m.cell(row, row) for row in m.row_labels) / total
