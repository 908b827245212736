# -*- coding: utf-8 -*-
# @Time    : 2025/08/15
# @Author  : Derleser
# @File    : config_service.py
# @Software: CLMD
# @Description: 组装运行配置：默认值 < 配置文件 < 命令行参数

import json
import logging
import os
from typing import Any, Dict, Optional

from ..domain.errors import ConfigError
from ..domain.models import ContentMode, ContentPolicy, CsrScope, RunConfig

logger = logging.getLogger(__name__)

SCHEMA_PATH = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "..", "_conf_schema.json"))

TRUE_WORDS = {"true", "yes", "1", "on"}
FALSE_WORDS = {"false", "no", "0", "off"}

# 文件路径类参数不在 schema 中声明，但可以写在配置文件里
PATH_KEYS = {"src", "tgt", "align", "pred", "scores", "db"}


class ConfigService:
    def __init__(self, schema_path: str = SCHEMA_PATH):
        with open(schema_path, encoding="utf-8") as f:
            self.schema: Dict[str, dict] = json.load(f)

    def defaults(self) -> Dict[str, Any]:
        return {key: spec["default"] for key, spec in self.schema.items()}

    def parse_config_file(self, text: str) -> Dict[str, Any]:
        """读取扁平的 key=value 配置文件"""
        values = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not sep:
                raise ConfigError(f"expected key=value at line {lineno}")
            values[key] = self.coerce(key, value.strip())
        return values

    def coerce(self, key: str, value: Any) -> Any:
        """按 schema 中声明的类型转换字符串值"""
        if key not in self.schema and key not in PATH_KEYS:
            raise ConfigError(f"unknown config key '{key}'")
        if key in PATH_KEYS or not isinstance(value, str):
            return value
        kind = self.schema[key]["type"]
        if kind == "int":
            try:
                return int(value)
            except ValueError:
                raise ConfigError(f"'{key}' expects an integer, got '{value}'") from None
        if kind == "bool":
            word = value.lower()
            if word in TRUE_WORDS:
                return True
            if word in FALSE_WORDS:
                return False
            raise ConfigError(f"'{key}' expects a boolean, got '{value}'")
        if kind == "list":
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    def load_run_config(self, flags: Dict[str, Any], config_text: Optional[str] = None,
                        env: Optional[Dict[str, str]] = None,
                        command_defaults: Optional[Dict[str, Any]] = None) -> RunConfig:
        """
        合并三层配置并校验。
        :param flags: 命令行显式给出的值（None 表示未给出）
        :param config_text: --config 文件的内容
        :param env: 环境变量，默认读取 os.environ
        :param command_defaults: 子命令自己的默认值，优先级介于全局默认值与配置文件之间
        """
        env = os.environ if env is None else env
        merged = self.defaults()
        merged.update(command_defaults or {})
        if config_text:
            merged.update(self.parse_config_file(config_text))
        for key, value in flags.items():
            if value is not None:
                merged[key] = self.coerce(key, value)

        threads = self._threads(merged["threads"], env.get("CLMD_THREADS"))
        return self._build(merged, threads)

    @staticmethod
    def _threads(configured: int, raw: Optional[str]) -> int:
        """CLMD_THREADS 为上限；配置为 0 时直接取环境变量"""
        if configured < 0:
            raise ConfigError(f"threads must not be negative, got {configured}")
        if raw is None or raw == "":
            return configured or 1
        try:
            threads = int(raw)
        except ValueError:
            raise ConfigError(f"CLMD_THREADS must be a positive integer, got '{raw}'") from None
        if threads < 1:
            raise ConfigError(f"CLMD_THREADS must be a positive integer, got '{raw}'")
        return threads if not configured else min(configured, threads)

    def _build(self, v: Dict[str, Any], threads: int) -> RunConfig:
        if v["pair_by"] not in ("position", "sent_id"):
            raise ConfigError(f"pair_by must be 'position' or 'sent_id', got '{v['pair_by']}'")
        if v["index_base"] not in (0, 1):
            raise ConfigError(f"index_base must be 0 or 1, got {v['index_base']}")
        if v["format"] not in ("tsv", "json"):
            raise ConfigError(f"format must be 'tsv' or 'json', got '{v['format']}'")
        try:
            mode = ContentMode(v["policy"])
        except ValueError:
            raise ConfigError(f"unknown policy '{v['policy']}'") from None
        try:
            scope = CsrScope(v["scope"])
        except ValueError:
            raise ConfigError(f"unknown scope '{v['scope']}'") from None
        rows = tuple(v["rows"])
        cols = tuple(v["cols"]) or rows
        if not rows:
            raise ConfigError("row label list must not be empty")
        if v["render_max_edges"] < 1:
            raise ConfigError("render_max_edges must be positive")

        spatial = frozenset(v["spatial_lemmas"])
        policy = ContentPolicy(mode=mode, spatial_adp_as_content=bool(spatial), spatial_lemmas=spatial)
        return RunConfig(
            src_path=v.get("src"),
            tgt_path=v.get("tgt"),
            align_path=v.get("align"),
            pred_path=v.get("pred"),
            scores_path=v.get("scores"),
            db_path=v.get("db"),
            pair_by=v["pair_by"],
            index_base=v["index_base"],
            content_policy=policy,
            strip_subtypes=not v["keep_subtypes"],
            with_direction=v["direction"],
            scope=scope,
            row_labels=rows,
            col_labels=cols,
            output_format=v["format"],
            output_dir=v["out"],
            threads=threads,
            include_unaligned_entropy=v["include_unaligned_entropy"],
            render_max_edges=v["render_max_edges"],
        )
