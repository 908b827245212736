# -*- coding: utf-8 -*-
# @Time    : 2025/08/10
# @Author  : Derleser
# @File    : conllu_service.py
# @Software: CLMD
# @Description: CoNLL-U 树库的解析、校验、回写与依存树构建

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import conllu
from conllu.exceptions import ParseException

from ..domain.errors import ConlluParseError, TreeError
from ..domain.models import DepTree, Sentence, Token

logger = logging.getLogger(__name__)

FIELDS = ["id", "form", "lemma", "upos", "xpos", "feats", "head", "deprel", "deps", "misc"]

# 所有列按原样保留，数值校验由本服务负责（以便报告行号）
FIELD_PARSERS = {name: (lambda line, i: line[i]) for name in FIELDS}


def strip_subtype(label: str) -> str:
    """去掉 UD 关系子类型：acl:relcl -> acl"""
    return label.split(":", 1)[0]


@dataclass(frozen=True)
class ParseOptions:
    strip_subtypes: bool = False
    check_trees: bool = True


class ConlluService:
    def __init__(self, options: Optional[ParseOptions] = None):
        self.options = options or ParseOptions()

    def parse_conllu(self, text: str, options: Optional[ParseOptions] = None) -> List[Sentence]:
        """
        解析 CoNLL-U 文本。
        :param text: 整个文件的内容
        :return: 每个句子块一个 Sentence
        """
        options = options or self.options
        sentences = []
        for start_line, lines in self._split_blocks(text):
            sentence = self._parse_block(start_line, lines, options)
            if sentence is None:
                continue
            if options.check_trees:
                self.build_tree(sentence)
            sentences.append(sentence)
        logger.debug(f"解析得到 {len(sentences)} 个句子")
        return sentences

    def serialize_conllu(self, sentences: List[Sentence]) -> str:
        """将句子写回 CoNLL-U 文本，多词符号与空节点行放回原位"""
        blocks = []
        for sentence in sentences:
            token_dicts = []
            multiword = {rng[0]: line for rng, line in zip(sentence.multiword_ranges, sentence.multiword_lines)}
            empty_after: Dict[int, List[Tuple[str, ...]]] = {}
            for fields in sentence.empty_nodes:
                empty_after.setdefault(int(fields[0].split(".")[0]), []).append(fields)

            for fields in empty_after.get(0, []):
                token_dicts.append(self._as_conllu_token(fields))
            for token in sentence.tokens:
                if token.id in multiword:
                    token_dicts.append(self._as_conllu_token(multiword[token.id]))
                token_dicts.append(self._as_conllu_token(token.to_fields()))
                for fields in empty_after.get(token.id, []):
                    token_dicts.append(self._as_conllu_token(fields))

            metadata = conllu.models.Metadata(sentence.comments)
            blocks.append(conllu.models.TokenList(token_dicts, metadata=metadata).serialize())
        return "".join(blocks)

    def build_tree(self, sentence: Sentence) -> DepTree:
        """
        从句子构建依存树索引。
        head-0 的词深度为 0，允许多个根。
        """
        n = len(sentence.tokens)
        parent = {t.id: t.head for t in sentence.tokens}
        children: Dict[int, List[int]] = {t.id: [] for t in sentence.tokens}
        for token in sentence.tokens:
            if token.head == token.id:
                raise TreeError(f"self-loop on token {token.id}", sentence.sent_id)
            if token.head != 0:
                if token.head not in children:
                    raise TreeError(f"token {token.id} has unknown head {token.head}", sentence.sent_id)
                children[token.head].append(token.id)

        depth: Dict[int, int] = {}
        for token in sentence.tokens:
            chain = []
            node = token.id
            while node not in depth and parent[node] != 0:
                chain.append(node)
                node = parent[node]
                if len(chain) > n:
                    raise TreeError(f"cycle through token {token.id}", sentence.sent_id)
            base = depth.get(node, 0)
            depth.setdefault(node, base)
            for offset, member in enumerate(reversed(chain), start=1):
                depth[member] = base + offset

        if not any(h == 0 for h in parent.values()) and n > 0:
            raise TreeError("no token is attached to the root", sentence.sent_id)

        return DepTree(
            sentence=sentence,
            parent=parent,
            children={k: tuple(sorted(v)) for k, v in children.items()},
            depth=depth,
        )

    def _split_blocks(self, text: str):
        """按空行切分句子块，同时记录每块的起始行号"""
        block: List[Tuple[int, str]] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.rstrip("\r")
            if line.strip():
                block.append((lineno, line))
            elif block:
                yield block[0][0], block
                block = []
        if block:
            yield block[0][0], block

    def _parse_block(self, start_line: int, lines: List[Tuple[int, str]], options: ParseOptions) -> Optional[Sentence]:
        token_lines = []
        for lineno, line in lines:
            if line.startswith("#"):
                continue
            columns = line.split("\t")
            if len(columns) != 10:
                raise ConlluParseError(f"expected 10 columns, found {len(columns)}", lineno)
            token_lines.append((lineno, tuple(columns)))
        if not token_lines:
            return None

        try:
            parsed = conllu.parse(
                "\n".join(line for _, line in lines) + "\n\n",
                fields=FIELDS,
                field_parsers=FIELD_PARSERS,
            )
        except ParseException as e:
            raise ConlluParseError(str(e), start_line) from e
        metadata = parsed[0].metadata if parsed else {}

        tokens: List[Token] = []
        multiword_ranges, multiword_lines, empty_nodes = [], [], []
        for lineno, columns in token_lines:
            raw_id = columns[0]
            if "-" in raw_id:
                start, end = self._parse_range(raw_id, lineno)
                multiword_ranges.append((start, end))
                multiword_lines.append(columns)
                continue
            if "." in raw_id:
                empty_nodes.append(columns)
                continue

            token_id = self._parse_int(raw_id, "id", lineno)
            head = self._parse_int(columns[6], "head", lineno)
            if token_id < 1:
                raise ConlluParseError(f"id must be positive, found {token_id}", lineno)
            if head < 0:
                raise ConlluParseError(f"head must be non-negative, found {head}", lineno)
            if head == token_id:
                raise ConlluParseError("self-loop", lineno)
            expected = len(tokens) + 1
            if token_id < expected:
                raise ConlluParseError(f"duplicate id {token_id}", lineno)
            if token_id > expected:
                raise ConlluParseError(f"id gap: expected {expected}, found {token_id}", lineno)
            if not columns[3] or not columns[7]:
                raise ConlluParseError("upos and deprel must not be empty", lineno)

            deprel = strip_subtype(columns[7]) if options.strip_subtypes else columns[7]
            tokens.append(Token(
                id=token_id, form=columns[1], lemma=columns[2], upos=columns[3], xpos=columns[4],
                feats=columns[5], head=head, deprel=deprel, deps=columns[8], misc=columns[9],
            ))

        for lineno, columns in token_lines:
            if "-" in columns[0] or "." in columns[0]:
                continue
            if int(columns[6]) > len(tokens):
                raise ConlluParseError(f"head {columns[6]} out of range", lineno)

        return Sentence(
            tokens=tuple(tokens),
            sent_id=metadata.get("sent_id"),
            text=metadata.get("text"),
            comments=tuple(metadata.items()),
            multiword_ranges=tuple(multiword_ranges),
            multiword_lines=tuple(multiword_lines),
            empty_nodes=tuple(empty_nodes),
        )

    @staticmethod
    def _parse_int(value: str, column: str, lineno: int) -> int:
        try:
            return int(value)
        except ValueError:
            raise ConlluParseError(f"non-numeric {column} '{value}'", lineno) from None

    def _parse_range(self, raw_id: str, lineno: int) -> Tuple[int, int]:
        start, _, end = raw_id.partition("-")
        return self._parse_int(start, "id", lineno), self._parse_int(end, "id", lineno)

    @staticmethod
    def _as_conllu_token(fields: Tuple[str, ...]) -> conllu.models.Token:
        return conllu.models.Token(zip(FIELDS, fields))
