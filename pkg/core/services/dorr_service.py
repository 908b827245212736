# -*- coding: utf-8 -*-
# @Time    : 2025/08/13
# @Author  : Derleser
# @File    : dorr_service.py
# @Software: CLMD
# @Description: 以 CSR 模式检测 Dorr 翻译分歧（词汇分歧除外）

import logging
from typing import List, Sequence

from ..domain.models import (
    ComponentKind,
    Csr,
    DorrHit,
    DorrReport,
    DorrType,
    PathType,
    SentencePair,
)
from .alignment_service import AlignmentService
from .conllu_service import strip_subtype

logger = logging.getLogger(__name__)

# (分歧类型, 源端路径, 目标端路径集合, 中心词是否互换)
# 互换中心词的分歧在方向敏感模式下要求单边方向相反，其余要求方向相同
CSR_PATTERNS = (
    (DorrType.THEMATIC, "nsubj", frozenset({"obj", "obl"}), False),
    (DorrType.PROMOTIONAL, "advmod", frozenset({"xcomp"}), True),
    (DorrType.DEMOTIONAL, "xcomp", frozenset({"advmod"}), True),
    (DorrType.STRUCTURAL, "obj", frozenset({"obl"}), False),
    (DorrType.CATEGORIAL_NSUBJ_OBJ, "nsubj", frozenset({"nsubj+obj"}), False),
    (DorrType.CATEGORIAL_NSUBJ_IOBJ_OBL, "nsubj", frozenset({"nsubj+obj", "nsubj+iobj", "nsubj+obl"}), False),
)
INVERSE_THEMATIC = (frozenset({"obj", "obl"}), "nsubj", False)


class DorrService:
    def __init__(self, alignment_service: AlignmentService, with_direction: bool = False):
        self.alignment_service = alignment_service
        self.with_direction = with_direction

    def detect_dorr(self, csrs: Sequence[Csr], pair: SentencePair) -> DorrReport:
        """
        对一个句对的 CSR 做模式过滤，外加一个基于对齐分量的融合分歧判定。
        返回该句对的报告片段，可与其他片段合并。
        """
        report = DorrReport(sentences=1)
        forward = inverse = 0
        for csr in csrs:
            if not isinstance(csr.tgt_path, PathType):
                continue
            src = self._key(csr.src_path)
            tgt = self._key(csr.tgt_path)
            for dorr_type, src_pattern, tgt_patterns, head_swap in CSR_PATTERNS:
                if src == src_pattern and tgt in tgt_patterns and self._orientation_matches(csr, head_swap):
                    self._count(report, dorr_type, pair.index, csr.src_endpoints)
                    if dorr_type is DorrType.THEMATIC:
                        forward += 1
            if (src in INVERSE_THEMATIC[0] and tgt == INVERSE_THEMATIC[1]
                    and self._orientation_matches(csr, INVERSE_THEMATIC[2])):
                inverse += 1

        if forward and inverse:
            report.thematic_full += 1
            report.thematic_full_csr_pairs += min(forward, inverse)
            report.per_sentence_hits.append(DorrHit(pair.index, DorrType.THEMATIC_FULL, ()))

        for root, targets in self._conflations(pair):
            report.conflational += 1
            report.per_sentence_hits.append(DorrHit(pair.index, DorrType.CONFLATIONAL, (root,) + targets))
        return report

    def detect_corpus(self, per_pair: Sequence[tuple]) -> DorrReport:
        """per_pair 为 (pair, csrs) 序列；合并结果与句对顺序无关"""
        report = DorrReport()
        for pair, csrs in per_pair:
            report = report.merge(self.detect_dorr(csrs, pair))
        report.per_sentence_hits.sort(key=lambda h: (h.sent_index, h.type.value, h.endpoints))
        return report

    def _conflations(self, pair: SentencePair) -> List[tuple]:
        """源端根谓词与目标端根谓词及其 obj 构成一对多对齐"""
        found = []
        for comp in self.alignment_service.components(pair.align):
            if comp.kind is not ComponentKind.ONE_TO_MANY:
                continue
            (src_id,) = comp.src_ids
            if src_id not in pair.src or pair.src.parent[src_id] != 0:
                continue
            for tgt_root in comp.tgt_ids:
                if tgt_root not in pair.tgt or pair.tgt.parent[tgt_root] != 0:
                    continue
                has_obj = any(
                    strip_subtype(pair.tgt.token(o).deprel) == "obj" and pair.tgt.parent[o] == tgt_root
                    for o in comp.tgt_ids
                )
                if has_obj:
                    found.append((src_id, tuple(sorted(comp.tgt_ids))))
                    break
        return found

    @staticmethod
    def _key(path: PathType) -> str:
        return "+".join(strip_subtype(label) for label in path.labels)

    def _orientation_matches(self, csr: Csr, head_swap: bool) -> bool:
        """方向敏感模式下检查单边到单边 CSR 的方向；多边路径不检查"""
        if not self.with_direction or csr.src_path.directions is None or csr.tgt_path.directions is None:
            return True
        if len(csr.src_path) != 1 or len(csr.tgt_path) != 1:
            return True
        same = csr.src_path.directions == csr.tgt_path.directions
        return not same if head_swap else same

    @staticmethod
    def _count(report: DorrReport, dorr_type: DorrType, sent_index: int, endpoints: tuple):
        field_name = {
            DorrType.THEMATIC: "thematic_nsubj_to_obj_obl",
            DorrType.PROMOTIONAL: "promotional",
            DorrType.DEMOTIONAL: "demotional",
            DorrType.STRUCTURAL: "structural",
            DorrType.CATEGORIAL_NSUBJ_OBJ: "categorial_nsubj_obj",
            DorrType.CATEGORIAL_NSUBJ_IOBJ_OBL: "categorial_nsubj_iobj_obl",
        }[dorr_type]
        setattr(report, field_name, getattr(report, field_name) + 1)
        report.per_sentence_hits.append(DorrHit(sent_index, dorr_type, tuple(endpoints)))
