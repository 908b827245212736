def up(cursor):
    cursor.execute("""
    CREATE TABLE IF NOT EXISTS dorr_hits (
        hit_id INTEGER PRIMARY KEY AUTOINCREMENT,
        run_id INTEGER NOT NULL REFERENCES runs(run_id),
        pair_index INTEGER NOT NULL,
        divergence TEXT NOT NULL,
        endpoints TEXT NOT NULL
    )
    """)


def down(cursor):
    cursor.execute("DROP TABLE IF EXISTS dorr_hits")
