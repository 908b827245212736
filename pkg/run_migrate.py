# -*- coding: utf-8 -*-
import argparse
import logging
import os
import sys

from core.database.migration import MIGRATIONS_DIR, run_migrations


def main(argv=None) -> int:
    """
    创建或升级 CSR 结果库。
    """
    parser = argparse.ArgumentParser(description="创建或升级 CSR 结果库")
    parser.add_argument("db", nargs="?", default=os.path.join("data", "clmd_csrs.db"))
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')

    data_dir = os.path.dirname(os.path.abspath(args.db))
    print(f"Database path: {args.db}")
    print(f"Migrations path: {MIGRATIONS_DIR}")
    if not os.path.exists(data_dir):
        os.makedirs(data_dir)
        print(f"Created data directory: {data_dir}")

    try:
        version = run_migrations(args.db)
        print(f"✅ Database migrations completed successfully (version {version}).")
        return 0
    except Exception as e:
        print(f"❌ An error occurred during migration: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
