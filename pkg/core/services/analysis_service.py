# -*- coding: utf-8 -*-
# @Time    : 2025/08/18
# @Author  : Derleser
# @File    : analysis_service.py
# @Software: CLMD
# @Description: 面向命令行的业务入口，每个方法返回 {"success": bool, "message": str}

import json
import logging
import os
import sqlite3
from typing import Dict, List, Optional, Tuple

from ..database.migration import run_migrations
from ..domain.errors import ClmdError
from ..domain.models import ConfusionMatrix, Csr, DorrReport, RunConfig, SentencePair
from ..repositories.sqlite_csr_repo import SqliteCsrRepository
from .alignment_service import AlignmentService
from .corpus_service import CorpusService
from .divergence_service import DivergenceService
from .dorr_service import DorrService
from .report_service import ReportService
from .stats_service import StatsService

logger = logging.getLogger(__name__)


class AnalysisService:
    def __init__(self, corpus_service: CorpusService, alignment_service: AlignmentService,
                 divergence_service: DivergenceService, dorr_service: DorrService,
                 stats_service: StatsService, report_service: ReportService):
        self.corpus_service = corpus_service
        self.alignment_service = alignment_service
        self.divergence_service = divergence_service
        self.dorr_service = dorr_service
        self.stats_service = stats_service
        self.report_service = report_service

    def validate(self, config: RunConfig) -> Dict:
        report = self.corpus_service.diagnose(config)
        for warning in report["warnings"]:
            logger.debug(warning)
        lines = [f"{report['pairs']} pairs, {len(report['issues'])} issues"]
        lines += report["issues"]
        if report["warnings"]:
            lines.append(f"{len(report['warnings'])} alignment components dropped by reduction")
        return {"success": not report["fatal"], "message": "\n".join(lines)}

    def analyze(self, config: RunConfig) -> Dict:
        """写出完整报告包；先做校验，存在致命问题时不分析"""
        checked = self.validate(config)
        if not checked["success"]:
            return checked
        try:
            pairs, per_pair = self._extract(config)
            files = self._bundle(config, pairs, per_pair)
            written = self.report_service.write_bundle(config, files)
        except (ClmdError, OSError) as e:
            return {"success": False, "message": f"分析失败: {e}"}
        return {"success": True, "message": "\n".join(written)}

    def pos_matrix(self, config: RunConfig, percent: bool = False) -> Dict:
        try:
            pairs = self.corpus_service.load_corpus(config)
            m = self.divergence_service.pos_confusion(pairs, config.content_policy)
        except ClmdError as e:
            return {"success": False, "message": str(e)}
        fmt = config.output_format
        if percent:
            return {"success": True, "message": self.report_service.matrix_percent(m, fmt, diagonal=True)}
        return {"success": True, "message": self.report_service.matrix_counts(m, fmt)}

    def path_matrix(self, config: RunConfig, percent: bool = False) -> Dict:
        try:
            m = self._edge_matrix(config)
        except ClmdError as e:
            return {"success": False, "message": str(e)}
        fmt, width = config.output_format, config.render_max_edges
        if percent:
            return {"success": True, "message": self.report_service.matrix_percent(m, fmt, width)}
        return {"success": True, "message": self.report_service.matrix_counts(m, fmt, width)}

    def entropy(self, config: RunConfig) -> Dict:
        try:
            m = self._edge_matrix(config)
            text = self.report_service.entropy_report(m, config.output_format, config.include_unaligned_entropy)
        except ClmdError as e:
            return {"success": False, "message": str(e)}
        return {"success": True, "message": text}

    def preservation(self, config: RunConfig) -> Dict:
        try:
            m = self._edge_matrix(config)
        except ClmdError as e:
            return {"success": False, "message": str(e)}
        return {"success": True, "message": self.report_service.preservation_report(m, config.output_format)}

    def dorr(self, config: RunConfig) -> Dict:
        """Dorr 分歧计数；逐句命中写入输出目录的 dorr_hits.json"""
        try:
            pairs, per_pair = self._extract(config)
            report = self.dorr_service.detect_corpus(list(zip(pairs, per_pair)))
            self.report_service.write_bundle(config, {"dorr_hits.json": self.report_service.dorr_hits(report)})
        except (ClmdError, OSError) as e:
            return {"success": False, "message": f"Dorr 检测失败: {e}"}
        return {"success": True, "message": self.report_service.dorr_table(report, config.output_format)}

    def align_eval(self, config: RunConfig, restrict: Optional[frozenset] = None) -> Dict:
        """对齐评估；提供源树库时附带按源关系标签的召回率"""
        try:
            gold = self.alignment_service.parse_alignment(
                self.corpus_service.read_text(config.align_path), config.index_base
            )
            pred = self.alignment_service.parse_alignment(
                self.corpus_service.read_text(config.pred_path), config.index_base
            )
            trees = None
            if config.src_path:
                sentences = self.corpus_service.conllu_service.parse_conllu(
                    self.corpus_service.read_text(config.src_path)
                )
                trees = [self.corpus_service.conllu_service.build_tree(s) for s in sentences]
            result = self.alignment_service.alignment_pr(gold, pred, restrict, trees)
        except ClmdError as e:
            return {"success": False, "message": str(e)}
        if result["precision"] is None:
            logger.warning("预测对齐为空，精确率无定义")
        return {"success": True, "message": self.report_service.pr_report(result, config.output_format)}

    def csrs(self, config: RunConfig) -> Dict:
        """导出原始 CSR；给定 --db 时同时写入结果库"""
        try:
            pairs, per_pair = self._extract(config)
            if config.db_path:
                self._store(config, pairs, per_pair)
        except (ClmdError, OSError, sqlite3.Error) as e:
            return {"success": False, "message": f"导出 CSR 失败: {e}"}
        return {"success": True, "message": self.report_service.csr_dump(pairs, per_pair, config.output_format)}

    def correlate(self, config: RunConfig) -> Dict:
        try:
            m = self._edge_matrix(config)
            scores = self.stats_service.parse_scores(self.corpus_service.read_text(config.scores_path))
            result = self.stats_service.correlate_preservation(self.divergence_service.preservation(m), scores)
        except ClmdError as e:
            return {"success": False, "message": str(e)}
        return {"success": True, "message": json.dumps(result, ensure_ascii=False)}

    # ---------- 内部 ----------

    def _extract(self, config: RunConfig) -> Tuple[List[SentencePair], List[List[Csr]]]:
        pairs = self.corpus_service.load_corpus(config)

        def extract(pair: SentencePair) -> List[Csr]:
            return self.divergence_service.extract_csr(
                pair, config.content_policy, config.scope, config.with_direction
            )

        return pairs, self.corpus_service.extract_all(pairs, config.threads, extract)

    def _edge_matrix(self, config: RunConfig, per_pair: Optional[List[List[Csr]]] = None) -> ConfusionMatrix:
        if per_pair is None:
            _, per_pair = self._extract(config)
        matrix = ConfusionMatrix(row_labels=config.row_labels, col_labels=config.col_labels)
        for csrs in per_pair:
            self.divergence_service.add_edge_counts(matrix, csrs, config.strip_subtypes)
        return matrix

    def _bundle(self, config: RunConfig, pairs: List[SentencePair], per_pair: List[List[Csr]]) -> Dict[str, str]:
        fmt = config.output_format
        ext = "json" if fmt == "json" else "tsv"
        rs = self.report_service
        pos = self.divergence_service.pos_confusion(pairs, config.content_policy)
        edges = self._edge_matrix(config, per_pair)
        dorr: DorrReport = self.dorr_service.detect_corpus(list(zip(pairs, per_pair)))
        reduced = [self.alignment_service.reduce(p.align, p.src, p.tgt) for p in pairs]
        summary = self.alignment_service.summarize([p.align for p in pairs], reduced)
        return {
            f"pos_counts.{ext}": rs.matrix_counts(pos, fmt),
            f"pos_percent.{ext}": rs.matrix_percent(pos, fmt, diagonal=True),
            f"edge_counts.{ext}": rs.matrix_counts(edges, fmt),
            f"edge_percent.{ext}": rs.matrix_percent(edges, fmt),
            f"entropy.{ext}": rs.entropy_report(edges, fmt, config.include_unaligned_entropy),
            f"preservation.{ext}": rs.preservation_report(edges, fmt),
            f"dorr.{ext}": rs.dorr_table(dorr, fmt),
            "dorr_hits.json": rs.dorr_hits(dorr),
            f"alignment_summary.{ext}": rs.alignment_summary(summary, fmt),
        }

    def _store(self, config: RunConfig, pairs: List[SentencePair], per_pair: List[List[Csr]]):
        directory = os.path.dirname(os.path.abspath(config.db_path))
        os.makedirs(directory, exist_ok=True)
        run_migrations(config.db_path)
        repo = SqliteCsrRepository(config.db_path)
        run_id = repo.create_run(config)
        n = repo.add_csrs(run_id, pairs, per_pair)
        report = self.dorr_service.detect_corpus(list(zip(pairs, per_pair)))
        hits = repo.add_dorr_hits(run_id, report)
        logger.info(f"运行 {run_id}: 已保存 {n} 条 CSR 与 {hits} 条分歧记录到 {config.db_path}")
