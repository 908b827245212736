# -*- coding: utf-8 -*-
# @Time    : 2025/08/15
# @Author  : Derleser
# @File    : corpus_service.py
# @Software: CLMD
# @Description: 读取源/目标树库与对齐文件，配对成句对，并按线程数分片抽取 CSR

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple

from ..domain.errors import ClmdError, CorpusMismatchError, InputError
from ..domain.models import AlignmentGraph, ComponentKind, Csr, RunConfig, Sentence, SentencePair
from .alignment_service import AlignmentService
from .conllu_service import ConlluService, ParseOptions
from .divergence_service import DivergenceService

logger = logging.getLogger(__name__)


class CorpusService:
    def __init__(self, conllu_service: ConlluService, alignment_service: AlignmentService,
                 divergence_service: DivergenceService):
        self.conllu_service = conllu_service
        self.alignment_service = alignment_service
        self.divergence_service = divergence_service

    @staticmethod
    def read_text(path: Optional[str]) -> str:
        if not path:
            raise InputError("<missing>", "no path given")
        try:
            with open(path, encoding="utf-8-sig") as f:
                return f.read()
        except (OSError, UnicodeDecodeError) as e:
            raise InputError(path, str(e)) from e

    def load_corpus(self, config: RunConfig, strip_subtypes: Optional[bool] = None) -> List[SentencePair]:
        """
        读取三个输入文件并配对。
        任何句数不一致或对齐下标越界都直接抛出 CorpusMismatchError。
        """
        strip = config.strip_subtypes if strip_subtypes is None else strip_subtypes
        options = ParseOptions(strip_subtypes=strip)
        src = self.conllu_service.parse_conllu(self.read_text(config.src_path), options)
        tgt = self.conllu_service.parse_conllu(self.read_text(config.tgt_path), options)
        align_text = self.read_text(config.align_path)
        graphs = self.alignment_service.parse_alignment(align_text, config.index_base)

        src, tgt = self.pair_sentences(src, tgt, config.pair_by)
        if len(graphs) != len(src):
            raise CorpusMismatchError(f"{len(src)} sentence pairs but {len(graphs)} alignment lines")
        range_issues = self.check_ranges(src, tgt, graphs, self.alignment_lines(align_text))
        if range_issues:
            raise CorpusMismatchError(range_issues[0])

        pairs = [
            SentencePair(
                index=k,
                src=self.conllu_service.build_tree(s),
                tgt=self.conllu_service.build_tree(t),
                align=g,
            )
            for k, (s, t, g) in enumerate(zip(src, tgt, graphs))
        ]
        logger.info(f"语料加载完成：{len(pairs)} 个句对")
        return pairs

    def diagnose(self, config: RunConfig) -> dict:
        """校验三个输入并收集问题；fatal 为 True 时不能继续分析"""
        issues: List[str] = []
        warnings: List[str] = []
        try:
            src = self.conllu_service.parse_conllu(self.read_text(config.src_path))
            tgt = self.conllu_service.parse_conllu(self.read_text(config.tgt_path))
            align_text = self.read_text(config.align_path)
            graphs = self.alignment_service.parse_alignment(align_text, config.index_base)
            src, tgt = self.pair_sentences(src, tgt, config.pair_by)
        except ClmdError as e:
            return {"pairs": 0, "issues": [str(e)], "warnings": [], "fatal": True}

        if len(graphs) != len(src):
            issues.append(f"sentence count mismatch: {len(src)} sentence pairs, {len(graphs)} alignment lines")
        issues.extend(self.check_ranges(src, tgt, graphs, self.alignment_lines(align_text)))

        if not issues:
            for k, (s, t, g) in enumerate(zip(src, tgt, graphs)):
                reduced = self.alignment_service.reduce(
                    g, self.conllu_service.build_tree(s), self.conllu_service.build_tree(t)
                )
                for comp in reduced.dropped_components:
                    reason = "many-to-many component" if comp.kind is ComponentKind.MANY_TO_MANY else "depth tie"
                    warnings.append(
                        f"pair {k}: {reason} src={sorted(comp.src_ids)} tgt={sorted(comp.tgt_ids)} dropped"
                    )
        return {"pairs": len(src), "issues": issues, "warnings": warnings, "fatal": bool(issues)}

    @staticmethod
    def pair_sentences(src: List[Sentence], tgt: List[Sentence], pair_by: str) -> Tuple[List[Sentence], List[Sentence]]:
        if pair_by == "position":
            if len(src) != len(tgt):
                raise CorpusMismatchError(f"source has {len(src)} sentences, target has {len(tgt)}")
            return src, tgt
        by_id = {}
        for sentence in tgt:
            if sentence.sent_id is None:
                raise CorpusMismatchError("target sentence without sent_id in sent_id pairing mode")
            if sentence.sent_id in by_id:
                raise CorpusMismatchError(f"duplicate target sent_id '{sentence.sent_id}'")
            by_id[sentence.sent_id] = sentence
        paired = []
        seen = set()
        for sentence in src:
            if sentence.sent_id is not None and sentence.sent_id in seen:
                raise CorpusMismatchError(f"duplicate source sent_id '{sentence.sent_id}'")
            seen.add(sentence.sent_id)
            if sentence.sent_id not in by_id:
                raise CorpusMismatchError(f"source sent_id '{sentence.sent_id}' has no target counterpart")
            paired.append(by_id[sentence.sent_id])
        return src, paired

    @staticmethod
    def alignment_lines(text: str) -> List[int]:
        """非注释行的行号，对应每个句对"""
        return [n for n, line in enumerate(text.splitlines(), start=1) if not line.strip().startswith("#")]

    @staticmethod
    def check_ranges(src: Sequence[Sentence], tgt: Sequence[Sentence], graphs: Sequence[AlignmentGraph],
                     lines: Sequence[int]) -> List[str]:
        issues = []
        for k, (s, t, g) in enumerate(zip(src, tgt, graphs)):
            for i, j in sorted(g.links):
                if i > len(s) or j > len(t):
                    issues.append(
                        f"pair {k} (line {lines[k]}): link {i}-{j} out of range "
                        f"(source has {len(s)} tokens, target has {len(t)})"
                    )
        return issues

    def extract_all(self, pairs: Sequence[SentencePair], threads: int = 1,
                    extract: Optional[Callable[[SentencePair], List[Csr]]] = None) -> List[List[Csr]]:
        """逐句对抽取 CSR；多线程时结果仍按句对顺序返回"""
        extract = extract or self.divergence_service.extract_csr
        if threads <= 1 or len(pairs) < 2:
            return [extract(p) for p in pairs]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(extract, pairs))
