# -*- coding: utf-8 -*-
# @Time    : 2025/08/18
# @Author  : Derleser
# @File    : main.py
# @Software: CLMD
# @Description: 跨语言形态句法分歧（CLMD）分析工具的命令行入口

import argparse
import logging
import os
import sys
from typing import Dict, List, Optional

from core.domain.errors import ClmdError, ConfigError, InputError
from core.domain.models import DEFAULT_CONTENT_DEPRELS, RunConfig
from core.services.alignment_service import AlignmentService
from core.services.analysis_service import AnalysisService
from core.services.config_service import ConfigService
from core.services.conllu_service import ConlluService, ParseOptions
from core.services.corpus_service import CorpusService
from core.services.divergence_service import DivergenceService
from core.services.dorr_service import DorrService
from core.services.report_service import ReportService
from core.services.stats_service import StatsService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

# 参数名 -> 配置键
CONFIG_FLAGS = (
    "src", "tgt", "align", "pred", "scores", "db", "pair_by", "index_base", "policy", "spatial_lemmas",
    "keep_subtypes", "direction", "scope", "rows", "cols", "format", "out", "threads",
    "include_unaligned_entropy", "render_max_edges",
)

# 子命令自己的默认值
COMMAND_DEFAULTS = {
    "csrs": {"keep_subtypes": True},
}


class UsageError(Exception):
    pass


class CliParser(argparse.ArgumentParser):
    """用法错误以退出码 1 结束"""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


class ClmdApp:
    def __init__(self, config: RunConfig):
        self.config = config

        # --- 组合根：实例化服务 ---
        self.conllu_service = ConlluService(ParseOptions(strip_subtypes=config.strip_subtypes))
        self.alignment_service = AlignmentService(config.index_base)
        self.divergence_service = DivergenceService(
            self.alignment_service, config.content_policy, config.scope, config.with_direction
        )
        self.dorr_service = DorrService(self.alignment_service, config.with_direction)
        self.stats_service = StatsService()
        self.report_service = ReportService(self.divergence_service)
        self.corpus_service = CorpusService(self.conllu_service, self.alignment_service, self.divergence_service)
        self.analysis_service = AnalysisService(
            self.corpus_service,
            self.alignment_service,
            self.divergence_service,
            self.dorr_service,
            self.stats_service,
            self.report_service,
        )

    def cmd_validate(self, args) -> Dict:
        return self.analysis_service.validate(self.config)

    def cmd_analyze(self, args) -> Dict:
        return self.analysis_service.analyze(self.config)

    def cmd_pos_matrix(self, args) -> Dict:
        return self.analysis_service.pos_matrix(self.config, percent=args.percent)

    def cmd_path_matrix(self, args) -> Dict:
        return self.analysis_service.path_matrix(self.config, percent=args.percent)

    def cmd_entropy(self, args) -> Dict:
        return self.analysis_service.entropy(self.config)

    def cmd_preservation(self, args) -> Dict:
        return self.analysis_service.preservation(self.config)

    def cmd_dorr(self, args) -> Dict:
        return self.analysis_service.dorr(self.config)

    def cmd_align_eval(self, args) -> Dict:
        if not self.config.pred_path:
            raise ConfigError("align-eval needs --pred")
        restrict = frozenset(DEFAULT_CONTENT_DEPRELS) if args.content_only else None
        return self.analysis_service.align_eval(self.config, restrict)

    def cmd_csrs(self, args) -> Dict:
        return self.analysis_service.csrs(self.config)

    def cmd_correlate(self, args) -> Dict:
        if not self.config.scores_path:
            raise ConfigError("correlate needs --scores")
        return self.analysis_service.correlate(self.config)


def build_parser() -> CliParser:
    common = CliParser(add_help=False)
    common.add_argument("--src", help="源语言 CoNLL-U 文件")
    common.add_argument("--tgt", help="目标语言 CoNLL-U 文件")
    common.add_argument("--align", help="Pharaoh 格式的对齐文件（align-eval 中为金标准）")
    common.add_argument("--pred", help="align-eval 的预测对齐文件")
    common.add_argument("--scores", help="correlate 的按标签分数（两列 TSV）")
    common.add_argument("--db", help="CSR 结果库（SQLite）路径")
    common.add_argument("--pair-by", dest="pair_by", choices=["position", "sent_id"])
    common.add_argument("--index-base", dest="index_base", type=int, choices=[0, 1])
    common.add_argument("--policy", choices=["deprel", "upos", "hybrid"])
    common.add_argument("--spatial-lemmas", dest="spatial_lemmas", help="逗号分隔的空间/时间介词词元")
    common.add_argument("--keep-subtypes", dest="keep_subtypes", action="store_const", const=True)
    common.add_argument("--direction", action="store_const", const=True)
    common.add_argument("--scope", choices=["one-to-one", "reduced"])
    common.add_argument("--rows", help="逗号分隔的矩阵行标签")
    common.add_argument("--cols", help="逗号分隔的矩阵列标签")
    common.add_argument("--format", choices=["tsv", "json"])
    common.add_argument("--out", help="报告输出目录")
    common.add_argument("--threads", type=int)
    common.add_argument("--include-unaligned", dest="include_unaligned_entropy", action="store_const", const=True)
    common.add_argument("--render-max-edges", dest="render_max_edges", type=int)
    common.add_argument("--config", help="key=value 格式的配置文件")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true")
    verbosity.add_argument("--quiet", action="store_true")

    parser = CliParser(prog="clmd", description="跨语言形态句法分歧分析")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    sub.add_parser("validate", parents=[common], help="校验三个输入文件")
    sub.add_parser("analyze", parents=[common], help="写出完整报告包")
    for name, help_text in (("pos-matrix", "POS 混淆矩阵"), ("path-matrix", "边标签混淆矩阵")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--percent", action="store_true", help="输出行百分比")
    sub.add_parser("entropy", parents=[common], help="翻译熵")
    sub.add_parser("preservation", parents=[common], help="保持指数")
    sub.add_parser("dorr", parents=[common], help="Dorr 分歧计数")
    p = sub.add_parser("align-eval", parents=[common], help="对齐精确率与召回率")
    p.add_argument("--content-only", dest="content_only", action="store_true", help="只统计内容词关系")
    sub.add_parser("csrs", parents=[common], help="导出原始 CSR")
    sub.add_parser("correlate", parents=[common], help="保持指数与外部分数的 Spearman 相关")
    return parser


def load_config(args: argparse.Namespace, env: Optional[Dict[str, str]] = None) -> RunConfig:
    config_text = None
    if args.config:
        try:
            config_text = CorpusService.read_text(args.config)
        except InputError as e:
            raise ConfigError(str(e)) from e
    flags = {key: getattr(args, key) for key in CONFIG_FLAGS}
    return ConfigService().load_run_config(
        flags, config_text, env=env, command_defaults=COMMAND_DEFAULTS.get(args.command)
    )


def main(argv: Optional[List[str]] = None, env: Optional[Dict[str, str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s', force=True)

    try:
        config = load_config(args, env if env is not None else dict(os.environ))
        app = ClmdApp(config)
        handler = getattr(app, "cmd_" + args.command.replace("-", "_"))
        result = handler(args)
    except ConfigError as e:
        logger.error(f"配置错误: {e}")
        return EXIT_USAGE
    except ClmdError as e:
        logger.error(f"数据错误: {e}")
        return EXIT_DATA

    stream = sys.stdout if result["success"] else sys.stderr
    message = result["message"]
    stream.write(message if message.endswith("\n") else message + "\n")
    return EXIT_OK if result["success"] else EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
