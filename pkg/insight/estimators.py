# -*- coding: utf-8 -*-
"""
busy period(재생 주기) 기반 추정량과 상한 비교 판정
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import pandas as pd
from scipy import stats

import config
from data.preprocess import records_to_frame, split_batches

logger = logging.getLogger(__name__)

# median-of-batch-means 신뢰구간 보정 (√(π/2))
MEDIAN_CI_FACTOR = math.sqrt(math.pi / 2.0)


class InsufficientSamplesError(ValueError):
    """조건부 표본이 하한보다 적음"""


@dataclass(frozen=True)
class Estimate:
    mean: float
    ci_half: float
    n: int
    field: str
    confidence: float = config.DEFAULT_CONFIDENCE
    heavy_tail: bool = False
    method: str = "regen"
    p_condition: float = math.nan

    @property
    def label(self) -> str:
        return config.HEAVY_TAIL_LABEL if self.heavy_tail else ""


@dataclass(frozen=True)
class Verdict:
    quantity: str
    estimate: float
    ci: float
    bound: float
    passed: bool | None
    margin: float
    note: str = ""

    @property
    def verdict(self) -> str:
        if self.passed is None:
            return "N/A"
        return "PASS" if self.passed else "FAIL"

    @property
    def failed(self) -> bool:
        return self.passed is False


def not_checked(quantity: str, bound: float, reason: str) -> Verdict:
    """실행하지 못한 비교를 N/A 행으로 남긴다"""
    logger.warning("⚠️ %s 판정 생략: %s", quantity, reason)
    return Verdict(quantity, math.nan, math.nan, bound, None, math.nan, reason)


def z_value(confidence: float) -> float:
    """양측 신뢰수준의 정규 분위수"""
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence 는 (0, 1) 범위여야 합니다: {confidence}")
    return float(stats.norm.ppf(0.5 + confidence / 2.0))


def _frame(records) -> pd.DataFrame:
    if isinstance(records, pd.DataFrame):
        return records
    return records_to_frame(records)


def _column(records, field: str) -> np.ndarray:
    df = _frame(records)
    if field not in df.columns:
        raise KeyError(f"알 수 없는 필드 '{field}' (사용 가능: {', '.join(df.columns)})")
    return df[field].to_numpy(dtype=float)


def _mean_ci(values: np.ndarray, confidence: float) -> tuple[float, float]:
    n = len(values)
    mean = float(np.mean(values))
    if n < 2:
        return mean, math.inf
    return mean, z_value(confidence) * float(np.std(values, ddof=1)) / math.sqrt(n)


# ---------------- 추정량 ----------------

def regen_mean(records, field: str, confidence: float = config.DEFAULT_CONFIDENCE,
               heavy_tail: bool = False) -> Estimate:
    values = _column(records, field)
    if len(values) == 0:
        raise ValueError("빈 레코드")
    if len(values) < 2:
        raise InsufficientSamplesError(f"'{field}' 추정에는 2개 이상의 busy period 가 필요합니다")
    mean, ci = _mean_ci(values, confidence)
    return Estimate(mean, ci, len(values), field, confidence, heavy_tail)


def conditional_mean(
    records,
    field: str,
    predicate: Callable[[pd.DataFrame], pd.Series] | None = None,
    confidence: float = config.DEFAULT_CONFIDENCE,
    min_events: int = config.MIN_CONDITIONING_EVENTS,
    heavy_tail: bool = False,
) -> Estimate:
    """조건(기본: A^c, 즉 s 이상 job 이 하나라도 있음) 위의 평균, 경험적 조건 확률도 함께"""
    df = _frame(records)
    if df.empty:
        raise ValueError("빈 레코드")
    mask = (~df["event_A"].astype(bool)) if predicate is None else predicate(df).astype(bool)
    hits = int(mask.sum())
    if hits < max(2, min_events):
        raise InsufficientSamplesError(f"조건부 표본 {hits}개 < 하한 {max(2, min_events)} ('{field}')")
    mean, ci = _mean_ci(df.loc[mask, field].to_numpy(dtype=float), confidence)
    return Estimate(mean, ci, hits, field, confidence, heavy_tail,
                    method="conditional", p_condition=hits / len(df))


def event_probability(records, confidence: float = config.DEFAULT_CONFIDENCE) -> Estimate:
    """A^c 의 경험적 확률 (Bernoulli 평균)"""
    df = _frame(records)
    indicator = (~df["event_A"].astype(bool)).to_numpy(dtype=float)
    mean, ci = _mean_ci(indicator, confidence)
    return Estimate(mean, ci, len(indicator), "P(A^c)", confidence, method="regen")


def product_tail(records, confidence: float = config.DEFAULT_CONFIDENCE,
                 heavy_tail: bool = False) -> Estimate:
    """E[W·N_B·1{A^c}] = E[W N_B | A^c]·P(A^c)"""
    return regen_mean(records, "WN_B_Ac", confidence, heavy_tail)


def ratio_mean(records, num: str, den: str,
               confidence: float = config.DEFAULT_CONFIDENCE) -> Estimate:
    """재생 비율 추정량 Σnum/Σden, delta method 신뢰구간"""
    x = _column(records, num)
    y = _column(records, den)
    n = len(x)
    if n < 2:
        raise InsufficientSamplesError("비율 추정에는 2개 이상의 busy period 가 필요합니다")
    r = float(np.sum(x) / np.sum(y))
    resid = x - r * y
    ci = z_value(confidence) * float(np.std(resid, ddof=1)) / (float(np.mean(y)) * math.sqrt(n))
    return Estimate(r, ci, n, f"{num}/{den}", confidence, method="ratio")


def paired_difference(a, b, field: str,
                      confidence: float = config.DEFAULT_CONFIDENCE) -> Estimate:
    """공통 난수로 돌린 두 배치의 period 별 차이 a − b"""
    fa = _frame(a)
    fb = _frame(b)
    if len(fa) != len(fb) or not np.array_equal(fa["index"].to_numpy(), fb["index"].to_numpy()):
        raise ValueError("paired_difference: 두 배치의 period index 가 일치해야 합니다")
    diff = fa[field].to_numpy(dtype=float) - fb[field].to_numpy(dtype=float)
    if len(diff) < 2:
        raise InsufficientSamplesError("짝 비교에는 2개 이상의 busy period 가 필요합니다")
    mean, ci = _mean_ci(diff, confidence)
    return Estimate(mean, ci, len(diff), f"{field} (paired)", confidence, method="paired")


def batch_means(records, field: str, n_batches: int = config.N_BATCHES,
                statistic: str = "mean", confidence: float = config.DEFAULT_CONFIDENCE,
                heavy_tail: bool = False) -> Estimate:
    """연속 배치 평균들의 평균 또는 중앙값"""
    values = _column(records, field)
    if n_batches < 2 or len(values) < 2 * n_batches:
        raise InsufficientSamplesError(f"배치 {n_batches}개에 busy period {len(values)}개는 부족합니다")
    means = np.array([part[field].mean() for part in split_batches(_frame(records), n_batches)])
    spread = z_value(confidence) * float(np.std(means, ddof=1)) / math.sqrt(n_batches)
    if statistic == "mean":
        centre, ci = float(np.mean(means)), spread
    elif statistic == "median":
        centre, ci = float(np.median(means)), MEDIAN_CI_FACTOR * spread
    else:
        raise ValueError(f"statistic 은 'mean' 또는 'median': {statistic}")
    return Estimate(centre, ci, len(values), field, confidence, heavy_tail, method=f"batch-{statistic}")


# ---------------- 판정 ----------------

def compare(est: Estimate, bound: float, quantity: str | None = None) -> Verdict:
    """한쪽 검정: mean − ci_half <= bound 이면 PASS"""
    if not math.isfinite(bound):
        raise ValueError(f"비교 상한이 유한하지 않습니다: {bound}")
    lower = est.mean - est.ci_half
    verdict = Verdict(
        quantity=quantity or est.field,
        estimate=est.mean,
        ci=est.ci_half,
        bound=bound,
        passed=lower <= bound,
        margin=bound - lower,
    )
    if not verdict.passed:
        logger.warning("⚠️ %s: 추정 %.6g ± %.3g > 상한 %.6g", verdict.quantity, est.mean, est.ci_half, bound)
    return verdict


def within_tolerance(est: Estimate, target: float, rel_tol: float = config.VALIDATION_REL_TOL,
                     quantity: str | None = None) -> Verdict:
    """양측 검증: |mean − target| <= rel_tol·|target| 이면 PASS"""
    allowed = rel_tol * abs(target)
    error = abs(est.mean - target)
    verdict = Verdict(
        quantity=quantity or est.field,
        estimate=est.mean,
        ci=est.ci_half,
        bound=target,
        passed=error <= allowed,
        margin=allowed - error,
    )
    if not verdict.passed:
        logger.warning("⚠️ %s: 추정 %.6g 가 기준 %.6g 에서 %.3g%% 벗어남",
                       verdict.quantity, est.mean, target, 100.0 * error / abs(target))
    return verdict
