# -*- coding: utf-8 -*-
# @Time    : 2025/08/16
# @Author  : Derleser
# @File    : report_service.py
# @Software: CLMD
# @Description: 将矩阵、熵、保持指数、Dorr 报告与对齐统计渲染为 TSV/JSON

import json
import logging
import os
from typing import Dict, List, Optional, Sequence

from ..domain.models import ConfusionMatrix, Csr, DorrReport, RunConfig, SentencePair, truncate_path
from .divergence_service import DivergenceService

logger = logging.getLogger(__name__)


def _fmt(value: Optional[float], digits: int = 2) -> str:
    return "NA" if value is None else f"{value:.{digits}f}"


def _tsv(rows: List[List[str]]) -> str:
    return "".join("\t".join(row) + "\n" for row in rows)


def _json(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=False) + "\n"


class ReportService:
    def __init__(self, divergence_service: DivergenceService):
        self.divergence_service = divergence_service

    # ---------- 混淆矩阵 ----------

    def matrix_counts(self, m: ConfusionMatrix, fmt: str = "tsv", max_edges: Optional[int] = None) -> str:
        """原始计数，附 Collapsed / Other / MCOP 与未对齐数"""
        if fmt == "json":
            return _json(self.matrix_to_dict(m))
        header = ["label", *m.col_labels, "Collapsed", "Other", "MCOP%", "MCOP", "MCOP_n", "Unaligned"]
        rows = [header]
        for row in m.row_labels:
            top = m.mcop(row)
            total = m.row_total(row)
            other_sum = sum(m.other.get(row, {}).values())
            rows.append([
                row,
                *(str(m.cell(row, col)) for col in m.col_labels),
                str(m.collapsed[row]),
                str(other_sum),
                _fmt(100.0 * top[1] / total if top else 0.0),
                truncate_path(top[0], max_edges) if top else "",
                str(top[1]) if top else "0",
                str(m.unaligned[row]),
            ])
        return _tsv(rows)

    def matrix_percent(self, m: ConfusionMatrix, fmt: str = "tsv", max_edges: Optional[int] = None,
                       diagonal: bool = False) -> str:
        """行百分比；diagonal 为真时末尾追加主对角线占比"""
        pct = self.divergence_service.percentages(m)
        share = self.divergence_service.diagonal_share(m) if diagonal else None
        if fmt == "json":
            return _json({**pct, "#diagonal_share": share} if diagonal else pct)
        header = ["label", *m.col_labels, "Collapsed", "Other", "Other+Collapsed", "MCOP%", "MCOP"]
        rows = [header]
        for row in m.row_labels:
            if row not in pct:
                continue
            r = pct[row]
            rows.append([
                row,
                *(_fmt(r["cells"][col]) for col in m.col_labels),
                _fmt(r["Collapsed"]),
                _fmt(r["Other"]),
                _fmt(r["OtherInclCollapsed"]),
                _fmt(r["MCOP%"]),
                truncate_path(r["MCOP"], max_edges),
            ])
        if diagonal:
            rows.append(["#diagonal_share", _fmt(share, 6)])
        return _tsv(rows)

    @staticmethod
    def matrix_to_dict(m: ConfusionMatrix) -> dict:
        return {
            "rows": list(m.row_labels),
            "cols": list(m.col_labels),
            "counts": {r: {c: m.cell(r, c) for c in m.col_labels} for r in m.row_labels},
            "collapsed": {r: m.collapsed[r] for r in m.row_labels},
            "unaligned": {r: m.unaligned[r] for r in m.row_labels},
            "other": {
                r: dict(sorted(m.other.get(r, {}).items(), key=lambda kv: (-kv[1], kv[0])))
                for r in m.row_labels
            },
        }

    # ---------- 熵与保持指数 ----------

    def entropy_report(self, m: ConfusionMatrix, fmt: str = "tsv", include_unaligned: bool = False) -> str:
        values: Dict[str, dict] = {}
        for row in m.row_labels:
            n = m.observations(row) if include_unaligned else m.row_total(row)
            if n == 0:
                continue
            values[row] = {"entropy": self.divergence_service.translation_entropy(m, row, include_unaligned), "n": n}
        if fmt == "json":
            return _json(values)
        return _tsv([["label", "entropy", "n"]] + [
            [row, f"{v['entropy']:.6f}", str(v["n"])] for row, v in values.items()
        ])

    def preservation_report(self, m: ConfusionMatrix, fmt: str = "tsv") -> str:
        pres = self.divergence_service.preservation(m)
        share = self.divergence_service.diagonal_share(m)
        if fmt == "json":
            return _json({"preservation": pres, "diagonal_share": share})
        rows = [["label", "preservation"]] + [[row, f"{p:.6f}"] for row, p in pres.items()]
        rows.append(["#diagonal_share", _fmt(share, 6)])
        return _tsv(rows)

    # ---------- Dorr ----------

    def dorr_table(self, report: DorrReport, fmt: str = "tsv") -> str:
        if fmt == "json":
            return _json({**dict(report.rows()), "thematic_full_csr_pairs": report.thematic_full_csr_pairs})
        return _tsv([["divergence", "count"]] + [[name, str(n)] for name, n in report.rows()])

    @staticmethod
    def dorr_hits(report: DorrReport) -> str:
        return _json([
            {"sent_index": h.sent_index, "type": h.type.value, "endpoints": list(h.endpoints)}
            for h in report.per_sentence_hits
        ])

    # ---------- 对齐 ----------

    @staticmethod
    def alignment_summary(summary: dict, fmt: str = "tsv") -> str:
        if fmt == "json":
            return _json(summary)
        rows = [["statistic", "value"]]
        for kind, n in summary["components"].items():
            rows.append([f"components.{kind}", str(n)])
        rows.append(["aligned_src_tokens", str(summary["aligned_src_tokens"])])
        rows.append(["one_to_one_src_share", _fmt(summary["one_to_one_src_share"], 6)])
        rows.append(["depth_tie_drops", str(summary["depth_tie_drops"])])
        rows.append(["many_to_many_drops", str(summary["many_to_many_drops"])])
        return _tsv(rows)

    @staticmethod
    def pr_report(result: dict, fmt: str = "tsv") -> str:
        if fmt == "json":
            return _json(result)
        rows = [
            ["precision", _fmt(result["precision"], 6)],
            ["recall", _fmt(result["recall"], 6)],
            ["n_gold", str(result["n_gold"])],
            ["n_pred", str(result["n_pred"])],
            ["n_correct", str(result["n_correct"])],
        ]
        rows += [[f"recall.{label}", _fmt(r, 6)] for label, r in result["per_label_recall"].items()]
        return _tsv(rows)

    # ---------- CSR ----------

    @staticmethod
    def csr_dump(pairs: Sequence[SentencePair], per_pair: Sequence[Sequence[Csr]], fmt: str = "tsv") -> str:
        records = []
        for pair, csrs in zip(pairs, per_pair):
            for csr in csrs:
                records.append({
                    "pair": pair.index,
                    "sent_id": pair.src.sentence.sent_id,
                    "src_endpoints": list(csr.src_endpoints),
                    "tgt_endpoints": list(csr.tgt_endpoints) if csr.tgt_endpoints else None,
                    "src_path": csr.src_path.render(),
                    "tgt_path": csr.tgt_render,
                    "no_path": csr.no_path,
                })
        if fmt == "json":
            return _json(records)
        rows = [["pair", "sent_id", "src_endpoints", "tgt_endpoints", "src_path", "tgt_path"]]
        for r in records:
            rows.append([
                str(r["pair"]),
                r["sent_id"] or "_",
                ",".join(map(str, r["src_endpoints"])),
                ",".join(map(str, r["tgt_endpoints"])) if r["tgt_endpoints"] else "_",
                r["src_path"],
                r["tgt_path"],
            ])
        return _tsv(rows)

    # ---------- 落盘 ----------

    def write_bundle(self, config: RunConfig, files: Dict[str, str]) -> List[str]:
        """按固定文件名写出，统一 UTF-8 与 LF 换行"""
        os.makedirs(config.output_dir, exist_ok=True)
        written = []
        for name in sorted(files):
            path = os.path.join(config.output_dir, name)
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(files[name])
            written.append(path)
        logger.info(f"已写出 {len(written)} 个报告文件到 {config.output_dir}")
        return written
