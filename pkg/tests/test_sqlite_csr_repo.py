import sqlite3

import pytest

from conftest import golden_pair
from core.database.migration import get_current_version, run_migrations
from core.domain.models import RunConfig
from core.repositories.sqlite_csr_repo import SqliteCsrRepository


@pytest.fixture
def repo(tmp_path):
    db_path = str(tmp_path / "csrs.db")
    assert run_migrations(db_path) == 2
    return SqliteCsrRepository(db_path)


def test_migrations_are_idempotent(repo):
    assert run_migrations(repo.db_path) == 2
    with sqlite3.connect(repo.db_path) as conn:
        assert get_current_version(conn.cursor()) == 2
        tables = {row[0] for row in conn.execute("SELECT name FROM sqlite_master WHERE type = 'table'")}
    assert {"runs", "csrs", "dorr_hits"} <= tables


def test_store_and_query_csrs(repo, divergence_service, dorr_service):
    pairs = [golden_pair("fig1", 0), golden_pair("conflational", 1)]
    per_pair = [divergence_service.extract_csr(p) for p in pairs]
    run_id = repo.create_run(RunConfig(src_path="en.conllu"))

    assert repo.add_csrs(run_id, pairs, per_pair) == 4
    stored = repo.get_csrs(run_id)
    assert [c.pair_index for c in stored] == [0, 1, 1, 1]
    assert stored[0].src_path == "nmod"
    assert stored[0].tgt_path == "acl:relcl+nsubj"
    assert stored[0].tgt_endpoints == (3, 1)
    unaligned = [c for c in stored if c.tgt_path == "Unaligned"]
    assert len(unaligned) == 2 and all(c.tgt_endpoints is None for c in unaligned)

    counts = repo.count_by_type(run_id)
    assert counts["nmod"] == {"acl:relcl+nsubj": 1}
    assert counts["nsubj"] == {"Unaligned": 1}
    assert len(repo.get_csrs(run_id, src_path="nsubj+obj")) == 1

    report = dorr_service.detect_corpus(list(zip(pairs, per_pair)))
    assert repo.add_dorr_hits(run_id, report) == 1
    (hit,) = repo.get_dorr_hits(run_id)
    assert hit == {"pair_index": 1, "divergence": "Conflational", "endpoints": [2, 3, 4]}


def test_runs_are_separate(repo, divergence_service, fig1_pair):
    first = repo.create_run(RunConfig())
    second = repo.create_run(RunConfig())
    repo.add_csrs(first, [fig1_pair], [divergence_service.extract_csr(fig1_pair)])
    assert second != first
    assert repo.get_csrs(second) == []
