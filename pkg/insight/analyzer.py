# -*- coding: utf-8 -*-
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import pandas as pd

import config
from data.distributions import ServiceDistribution, tail_stats, thm1_condition
from insight.bounds import BoundParams, VacuousBoundError, lemma1_bounds, thm1_chain, thm2_gap
from insight.estimators import (
    InsufficientSamplesError,
    Verdict,
    batch_means,
    compare,
    conditional_mean,
    event_probability,
    not_checked,
    paired_difference,
    product_tail,
    regen_mean,
)

logger = logging.getLogger(__name__)

NA = math.nan

BOUNDS_COLUMNS = [
    "s", "p_tail", "m1_tail", "m2_tail", "K1", "K2", "g_formula", "g_paper_constants",
    "EM", "EL", "ER_ub", "lemma1_W_ub", "lemma1_N_ub", "PAc_ub",
    "PAc_tight", "EWNB_ub", "pre_jensen_ub", "EML_ub", "EM2", "EMQ_ub", "thm1_condition",
]
GAP_COLUMNS = ["s", "V_policy", "V_reference", "gap", "gap_ci", "g_formula", "g_paper_constants", "verdict"]
RESIDUAL_COLUMNS = ["s", "R_hat", "R_ci", "ER_ub", "thm1_condition", "verdict", "label"]


def bounds_row(p: BoundParams, d: ServiceDistribution, s: float) -> dict:
    """s 하나에 대한 모든 상한. 적용 불가능한 열은 N/A"""
    t = tail_stats(d, s)
    row = dict.fromkeys(BOUNDS_COLUMNS, NA)
    row.update(s=s, p_tail=t.p_tail, m1_tail=t.m1_tail, m2_tail=t.m2_tail,
               thm1_condition=thm1_condition(d, s))

    if math.isfinite(p.EX2):
        g = thm2_gap(p, d, s)
        row.update(K1=g.K1, K2=g.K2, g_formula=g.g, g_paper_constants=g.g_fixed,
                   lemma1_W_ub=g.lemma1_W_ub, lemma1_N_ub=g.lemma1_N_ub,
                   PAc_ub=g.PAc_ub, PAc_tight=g.PAc_tight,
                   EWNB_ub=g.EWNB_ub, pre_jensen_ub=g.pre_jensen_ub)
    elif t.p_tail > 0:
        # A^c 조건부 상한은 유한 분산이 필요 없음
        l1 = lemma1_bounds(p, t)
        row.update(lemma1_W_ub=l1.W_ub, lemma1_N_ub=l1.N_ub, PAc_ub=l1.PAc_ub, PAc_tight=l1.PAc_tight)

    try:
        c = thm1_chain(p, d, s)
        row.update(EM=c.EM, EL=c.EL, ER_ub=c.ER_ub, EML_ub=c.EML_ub, EM2=c.EM2, EMQ_ub=c.EMQ_ub)
    except VacuousBoundError as e:
        logger.warning("⚠️ s=%g: E(R) 상한 없음 (%s)", s, e)
    return row


def bounds_table(p: BoundParams, d: ServiceDistribution, s_list) -> pd.DataFrame:
    return pd.DataFrame([bounds_row(p, d, float(s)) for s in s_list], columns=BOUNDS_COLUMNS)


@dataclass
class SweepPoint:
    gap_row: dict
    residual_row: dict
    verdicts: list[Verdict] = field(default_factory=list)


def _check(verdicts: list[Verdict], quantity: str, estimate_fn, bound: float) -> None:
    """판정 추가. 상한이나 추정이 없으면 사유와 함께 N/A 행"""
    if not math.isfinite(bound):
        verdicts.append(not_checked(quantity, bound, "상한이 정의되지 않음"))
        return
    try:
        est = estimate_fn()
    except InsufficientSamplesError as e:
        verdicts.append(not_checked(quantity, bound, str(e)))
        return
    verdicts.append(compare(est, bound, quantity))


def sweep_point(
    s: float,
    policy_kind: str,
    records: pd.DataFrame,
    reference: pd.DataFrame,
    p: BoundParams,
    d: ServiceDistribution,
    confidence: float = config.DEFAULT_CONFIDENCE,
) -> SweepPoint:
    """정책/기준 정책 배치(같은 seed) 로 gap, 잔여 비용, 상한 판정 계산"""
    heavy = not math.isfinite(p.EX2)
    bounds = bounds_row(p, d, s)

    v_policy = regen_mean(records, "sum_sojourn", confidence, heavy)
    v_ref = regen_mean(reference, "sum_sojourn", confidence, heavy)
    gap = paired_difference(records, reference, "sum_sojourn", confidence)
    g = bounds["g_formula"]
    if math.isfinite(g):
        gap_verdict = compare(gap, g, f"gap(s={s:g})")
    else:
        gap_verdict = not_checked(f"gap(s={s:g})", g, "상한이 정의되지 않음 (E(X²) = ∞)")
    gap_row = {
        "s": s, "V_policy": v_policy.mean, "V_reference": v_ref.mean,
        "gap": gap.mean, "gap_ci": gap.ci_half,
        "g_formula": g, "g_paper_constants": bounds["g_paper_constants"],
        "verdict": gap_verdict.verdict,
    }

    try:
        r_hat = batch_means(records, "R", statistic="median", confidence=confidence, heavy_tail=heavy)
    except InsufficientSamplesError:
        r_hat = regen_mean(records, "R", confidence, heavy)
    er_ub = bounds["ER_ub"]
    r_verdict = None
    if policy_kind == "po-lcfs":
        if math.isfinite(er_ub):
            r_verdict = compare(r_hat, er_ub, f"R(s={s:g})")
        else:
            r_verdict = not_checked(f"R(s={s:g})", er_ub, "E(R) 상한이 정의되지 않음")
    residual_row = {
        "s": s, "R_hat": r_hat.mean, "R_ci": r_hat.ci_half, "ER_ub": er_ub,
        "thm1_condition": bounds["thm1_condition"],
        "verdict": r_verdict.verdict if r_verdict else "N/A",
        "label": r_hat.label,
    }

    verdicts: list[Verdict] = []
    _check(verdicts, f"P(A^c)(s={s:g})", lambda: event_probability(records, confidence), bounds["PAc_ub"])
    _check(verdicts, f"E[W|A^c](s={s:g})",
           lambda: conditional_mean(records, "W", confidence=confidence, heavy_tail=heavy), bounds["lemma1_W_ub"])
    _check(verdicts, f"E[N_B|A^c](s={s:g})",
           lambda: conditional_mean(records, "N_B", confidence=confidence, heavy_tail=heavy), bounds["lemma1_N_ub"])
    _check(verdicts, f"E[WN_B 1(A^c)](s={s:g})",
           lambda: product_tail(records, confidence, heavy), bounds["pre_jensen_ub"])
    if r_verdict is not None:
        verdicts.append(r_verdict)
    verdicts.append(gap_verdict)
    return SweepPoint(gap_row, residual_row, verdicts)
