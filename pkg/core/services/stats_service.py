# -*- coding: utf-8 -*-
# @Time    : 2025/08/14
# @Author  : Derleser
# @File    : stats_service.py
# @Software: CLMD
# @Description: 保持指数与外部按标签分数之间的 Spearman 相关

import logging
import math
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from ..domain.errors import StatsError
from ..domain.models import LabeledScores

logger = logging.getLogger(__name__)


class StatsService:
    def spearman(self, x: Sequence[float], y: Sequence[float]) -> float:
        """
        Spearman ρ：平均秩处理并列，再对秩向量求 Pearson 相关。
        任一秩向量方差为 0 时无定义，抛出 StatsError。
        """
        if len(x) != len(y):
            raise StatsError(f"length mismatch: {len(x)} vs {len(y)}")
        if len(x) < 2:
            raise StatsError("need at least two observations")
        rx = rankdata(np.asarray(x, dtype=np.float64), method="average")
        ry = rankdata(np.asarray(y, dtype=np.float64), method="average")
        if np.ptp(rx) == 0 or np.ptp(ry) == 0:
            raise StatsError("zero rank variance: correlation is undefined")
        a = rx - rx.mean()
        b = ry - ry.mean()
        rho = float(np.sum(a * b) / np.sqrt(np.sum(a * a) * np.sum(b * b)))
        return max(-1.0, min(1.0, rho))

    def correlate_preservation(self, pres: Mapping[str, float], scores: LabeledScores) -> dict:
        """按共同标签连接后计算 ρ；任一侧缺失的标签被省略"""
        labels = sorted(set(pres) & set(scores.scores))
        if len(labels) < 2:
            raise StatsError(f"need at least two shared labels, found {len(labels)}")
        dropped = sorted(set(pres) ^ set(scores.scores))
        if dropped:
            logger.info(f"以下标签只在一侧出现，已省略: {', '.join(dropped)}")
        rho = self.spearman([pres[l] for l in labels], [scores.scores[l] for l in labels])
        return {"rho": rho, "n": len(labels), "labels": labels}

    def parse_scores(self, text: str) -> LabeledScores:
        """读取两列 TSV（标签, 分数）"""
        scores = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise StatsError(f"expected 2 columns at line {lineno}")
            try:
                value = float(parts[1])
            except ValueError:
                if lineno == 1:
                    continue  # header
                raise StatsError(f"non-numeric score at line {lineno}") from None
            if not math.isfinite(value):
                raise StatsError(f"score must be finite at line {lineno}")
            scores[parts[0]] = value
        return LabeledScores(scores)
