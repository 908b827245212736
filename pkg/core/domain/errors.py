# -*- coding: utf-8 -*-
# @Time    : 2025/08/10
# @Author  : Derleser
# @File    : errors.py
# @Software: CLMD
# @Description: 业务异常定义

from typing import Optional


class ClmdError(Exception):
    """所有业务异常的基类"""


class ConlluParseError(ClmdError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"{message} at line {line}" if line is not None else message)


class TreeError(ClmdError):
    def __init__(self, message: str, sent_id: Optional[str] = None):
        self.sent_id = sent_id
        super().__init__(f"{message} (sent_id={sent_id})" if sent_id is not None else message)


class AlignmentParseError(ClmdError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"{message} at line {line}" if line is not None else message)


class NoPathError(ClmdError):
    def __init__(self, u: int, v: int):
        self.u = u
        self.v = v
        super().__init__(f"no path between {u} and {v}: different root fragments")


class CorpusMismatchError(ClmdError):
    pass


class StatsError(ClmdError):
    pass


class ConfigError(ClmdError):
    pass


class InputError(ClmdError):
    """输入文件不可读"""
    def __init__(self, path: str, reason: str):
        self.path = path
        super().__init__(f"cannot read {path}: {reason}")
