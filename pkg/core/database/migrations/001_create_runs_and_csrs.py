# -*- coding: utf-8 -*-
# @Time    : 2025/08/17
# @Author  : Derleser
# @File    : 001_create_runs_and_csrs.py
# @Software: CLMD
# @Description: 创建运行记录表与 CSR 表


def up(cursor):
    cursor.execute("""
    CREATE TABLE IF NOT EXISTS runs (
        run_id INTEGER PRIMARY KEY AUTOINCREMENT,
        src_path TEXT,
        tgt_path TEXT,
        align_path TEXT,
        scope TEXT NOT NULL,
        with_direction BOOLEAN NOT NULL DEFAULT 0,
        created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
    )
    """)
    cursor.execute("""
    CREATE TABLE IF NOT EXISTS csrs (
        csr_id INTEGER PRIMARY KEY AUTOINCREMENT,
        run_id INTEGER NOT NULL REFERENCES runs(run_id),
        pair_index INTEGER NOT NULL,
        sent_id TEXT,
        src_head INTEGER NOT NULL,
        src_dep INTEGER NOT NULL,
        tgt_head INTEGER,
        tgt_dep INTEGER,
        src_path TEXT NOT NULL,
        tgt_path TEXT NOT NULL,
        no_path BOOLEAN NOT NULL DEFAULT 0
    )
    """)
    cursor.execute("CREATE INDEX IF NOT EXISTS idx_csrs_run ON csrs(run_id, src_path)")


def down(cursor):
    cursor.execute("DROP INDEX IF EXISTS idx_csrs_run")
    cursor.execute("DROP TABLE IF EXISTS csrs")
    cursor.execute("DROP TABLE IF EXISTS runs")
