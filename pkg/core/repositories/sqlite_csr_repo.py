# -*- coding: utf-8 -*-
# @Time    : 2025/08/17
# @Author  : Derleser
# @File    : sqlite_csr_repo.py
# @Software: CLMD
# @Description: CSR 与 Dorr 命中结果的仓储实现

import sqlite3
from typing import Dict, List, Optional, Sequence

from ..domain.models import Csr, DorrReport, RunConfig, SentencePair, StoredCsr


class SqliteCsrRepository:
    def __init__(self, db_path: str):
        self.db_path = db_path

    def _create_connection(self):
        return sqlite3.connect(self.db_path)

    def create_run(self, config: RunConfig) -> int:
        with self._create_connection() as conn:
            cursor = conn.cursor()
            cursor.execute(
                """
                INSERT INTO runs (src_path, tgt_path, align_path, scope, with_direction)
                VALUES (?, ?, ?, ?, ?)
                """,
                (config.src_path, config.tgt_path, config.align_path, config.scope.value, config.with_direction)
            )
            conn.commit()
            return cursor.lastrowid

    def add_csrs(self, run_id: int, pairs: Sequence[SentencePair], per_pair: Sequence[Sequence[Csr]]) -> int:
        """批量写入；返回写入条数"""
        rows = []
        for pair, csrs in zip(pairs, per_pair):
            for csr in csrs:
                tgt = csr.tgt_endpoints or (None, None)
                rows.append((
                    run_id, pair.index, pair.src.sentence.sent_id,
                    csr.src_endpoints[0], csr.src_endpoints[1], tgt[0], tgt[1],
                    csr.src_path.render(), csr.tgt_render, csr.no_path,
                ))
        with self._create_connection() as conn:
            conn.executemany(
                """
                INSERT INTO csrs (run_id, pair_index, sent_id, src_head, src_dep, tgt_head, tgt_dep,
                                  src_path, tgt_path, no_path)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
                """,
                rows
            )
            conn.commit()
        return len(rows)

    def add_dorr_hits(self, run_id: int, report: DorrReport) -> int:
        rows = [
            (run_id, hit.sent_index, hit.type.value, ",".join(map(str, hit.endpoints)))
            for hit in report.per_sentence_hits
        ]
        with self._create_connection() as conn:
            conn.executemany(
                "INSERT INTO dorr_hits (run_id, pair_index, divergence, endpoints) VALUES (?, ?, ?, ?)",
                rows
            )
            conn.commit()
        return len(rows)

    def get_csrs(self, run_id: int, src_path: Optional[str] = None) -> List[StoredCsr]:
        with self._create_connection() as conn:
            conn.row_factory = sqlite3.Row
            cursor = conn.cursor()
            if src_path is None:
                cursor.execute("SELECT * FROM csrs WHERE run_id = ? ORDER BY csr_id", (run_id,))
            else:
                cursor.execute(
                    "SELECT * FROM csrs WHERE run_id = ? AND src_path = ? ORDER BY csr_id", (run_id, src_path)
                )
            return [self._row_to_csr(row) for row in cursor.fetchall()]

    def count_by_type(self, run_id: int) -> Dict[str, Dict[str, int]]:
        """源路径类型 -> {目标路径类型: 次数}"""
        with self._create_connection() as conn:
            cursor = conn.cursor()
            cursor.execute(
                """
                SELECT src_path, tgt_path, COUNT(*) FROM csrs
                WHERE run_id = ?
                GROUP BY src_path, tgt_path
                ORDER BY src_path, tgt_path
                """,
                (run_id,)
            )
            counts: Dict[str, Dict[str, int]] = {}
            for src_path, tgt_path, n in cursor.fetchall():
                counts.setdefault(src_path, {})[tgt_path] = n
            return counts

    def get_dorr_hits(self, run_id: int) -> List[dict]:
        with self._create_connection() as conn:
            conn.row_factory = sqlite3.Row
            cursor = conn.cursor()
            cursor.execute(
                "SELECT pair_index, divergence, endpoints FROM dorr_hits WHERE run_id = ? ORDER BY hit_id",
                (run_id,)
            )
            return [
                {
                    "pair_index": row["pair_index"],
                    "divergence": row["divergence"],
                    "endpoints": [int(e) for e in row["endpoints"].split(",") if e],
                }
                for row in cursor.fetchall()
            ]

    @staticmethod
    def _row_to_csr(row: sqlite3.Row) -> StoredCsr:
        tgt = None if row["tgt_head"] is None else (row["tgt_head"], row["tgt_dep"])
        return StoredCsr(
            run_id=row["run_id"],
            pair_index=row["pair_index"],
            sent_id=row["sent_id"],
            src_endpoints=(row["src_head"], row["src_dep"]),
            tgt_endpoints=tgt,
            src_path=row["src_path"],
            tgt_path=row["tgt_path"],
            no_path=bool(row["no_path"]),
        )
