# -*- coding: utf-8 -*-
"""
분포 모멘트만으로 계산하는 closed-form 상한들
- lemma1_bounds: P(A^c), E[W|A^c], E[N_B|A^c]
- thm2_constants / thm2_gap: K1, K2, g(s) = K1·E[X1{X>s}] + K2·E[X²1{X>s}]
- thm1_chain: PO-LCFS 잔여 비용 E(R) 상한까지의 1단계 분해 값들
- pk_mean_sojourn, busy_period_means, ewnb_exact: 검증용 oracle
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import config
from data.distributions import ServiceDistribution, TailStats, tail_stats


class BoundError(ValueError):
    """상한을 계산할 수 없는 입력"""


class InstabilityError(BoundError):
    """λ·E(X) >= 1 또는 λ·E(X^s) >= 1"""


class VacuousBoundError(BoundError):
    """s 가 너무 작아 분모 1 − λ·E(M)·E(X̄) <= 0"""


@dataclass(frozen=True)
class BoundParams:
    lam: float
    EX: float
    EX2: float

    @property
    def rho(self) -> float:
        return self.lam * self.EX

    @property
    def D(self) -> float:
        return 1.0 - self.lam * self.EX


def bound_params(lam: float, d: ServiceDistribution) -> BoundParams:
    if not lam >= 0:
        raise BoundError(f"λ 는 0 이상이어야 합니다: {lam}")
    p = BoundParams(lam, d.mean(), d.second_moment())
    if not math.isfinite(p.EX) or p.rho >= 1.0:
        raise InstabilityError(f"불안정한 큐: λE(X) = {p.rho:.6g} >= 1 ({d.spec()}, λ={lam})")
    return p


@dataclass(frozen=True)
class Lemma1Bound:
    W_ub: float
    N_ub: float
    PAc_ub: float
    PAc_tight: float


@dataclass(frozen=True)
class Thm2Bound:
    s: float
    K1: float
    K2: float
    g: float
    g_fixed: float
    lemma1_W_ub: float
    lemma1_N_ub: float
    PAc_ub: float
    PAc_tight: float
    EWNB_ub: float
    pre_jensen_ub: float


@dataclass(frozen=True)
class Thm1Bound:
    s: float
    EM: float
    EL: float
    EML_ub: float
    EM2: float
    EMQ_ub: float
    ER_ub: float
    # 수렴을 좌우하는 항들
    conv_resid: float   # E(M)·E[X−s|X>s]
    conv_m1: float      # E(M)·E(X^s)
    conv_m2: float      # E(M)·E((X^s)²)
    order_term: float   # P(X>s)·E[X|X>s]


def lemma1_bounds(p: BoundParams, t: TailStats) -> Lemma1Bound:
    if t.p_tail <= 0.0:
        raise BoundError(f"P(X>s) = 0 인 s={t.s} 에서는 A^c 조건부 상한이 정의되지 않습니다")
    D = p.D
    below = p.EX - t.m1_tail
    return Lemma1Bound(
        W_ub=t.cond_m1 / D ** 2,
        N_ub=1.0 / D + p.lam * t.cond_m1 / D ** 2,
        PAc_ub=t.p_tail / D,
        PAc_tight=t.p_tail / (1.0 - p.lam * below),
    )


def thm2_constants(p: BoundParams) -> tuple[float, float]:
    if not math.isfinite(p.EX2):
        raise BoundError("E(X²) = inf: K1, K2 는 유한 분산에서만 정의됩니다")
    lam, D = p.lam, p.D
    K1 = (2.0 + D + (lam * p.EX + lam ** 2 * p.EX2) / D) / D ** 4
    K2 = (2.0 * lam / D + lam) / D ** 4
    return K1, K2


def _pre_jensen(p: BoundParams, t: TailStats) -> float:
    lam, D = p.lam, p.D
    c1, c2 = t.cond_m1, t.cond_m2
    inner = c1 * ((D ** 2 + D + lam * c1) / D ** 3
                  + (lam * p.EX + lam ** 2 * p.EX2) / D ** 3
                  + lam * c1 / D ** 3)
    return t.p_tail / D ** 2 * (inner + lam * c2 / D ** 2 + c1 / D ** 2)


def thm2_gap(p: BoundParams, d: ServiceDistribution, s: float) -> Thm2Bound:
    K1, K2 = thm2_constants(p)
    t = tail_stats(d, s)
    if t.p_tail > 0.0:
        l1 = lemma1_bounds(p, t)
        pre = _pre_jensen(p, t)
    else:
        l1 = Lemma1Bound(math.nan, math.nan, 0.0, 0.0)
        pre = 0.0
    return Thm2Bound(
        s=s, K1=K1, K2=K2,
        g=K1 * t.m1_tail + K2 * t.m2_tail,
        g_fixed=config.FIXED_K1 * t.m1_tail + config.FIXED_K2 * t.m2_tail,
        lemma1_W_ub=l1.W_ub, lemma1_N_ub=l1.N_ub,
        PAc_ub=l1.PAc_ub, PAc_tight=l1.PAc_tight,
        EWNB_ub=(p.EX + p.lam * p.EX2) / p.D ** 3,
        pre_jensen_ub=pre,
    )


def thm1_chain(p: BoundParams, d: ServiceDistribution, s: float) -> Thm1Bound:
    t = tail_stats(d, s)
    lam = p.lam
    a = 1.0 - lam * t.m1_trunc
    if a <= 0.0:
        raise InstabilityError(f"λ·E(X^s) = {lam * t.m1_trunc:.6g} >= 1 (s={s})")

    EM = t.p_tail / a
    EL = t.m1_trunc / a
    EML = (s * t.p_tail + lam * t.m2_trunc * EM) * (1.0 + lam * EL) / a
    EM2 = (t.p_tail
           + 2.0 * s * t.p_tail * lam * EM
           + lam ** 2 * t.m2_trunc * EM ** 2
           + lam * t.m1_trunc * EM ** 2) / a
    EMQ = EM2 * t.resid_m1
    denom = 1.0 - lam * EM * t.resid_m1
    if denom <= 0.0:
        raise VacuousBoundError(f"s={s} 가 너무 작음: 1 − λE(M)E(X̄) = {denom:.6g} <= 0")
    ER = (EML + EMQ * (1.0 + p.rho / p.D)) / denom

    return Thm1Bound(
        s=s, EM=EM, EL=EL, EML_ub=EML, EM2=EM2, EMQ_ub=EMQ, ER_ub=ER,
        conv_resid=EM * t.resid_m1,
        conv_m1=EM * t.m1_trunc,
        conv_m2=EM * t.m2_trunc,
        order_term=t.p_tail * t.cond_m1,
    )


def pk_mean_sojourn(p: BoundParams) -> float:
    """Pollaczek–Khinchine FCFS 평균 체류시간"""
    if not math.isfinite(p.EX2):
        raise BoundError("E(X²) = inf: P-K 평균 체류시간이 발산합니다")
    if p.rho >= 1.0:
        raise InstabilityError(f"ρ = {p.rho:.6g} >= 1")
    return p.EX + p.lam * p.EX2 / (2.0 * (1.0 - p.rho))


def busy_period_means(p: BoundParams) -> tuple[float, float]:
    """(E(W), E(N_B)) = (E(X)/D, 1/D)"""
    return p.EX / p.D, 1.0 / p.D


def ewnb_exact(p: BoundParams) -> float:
    """E(W·N_B) = E(X)/D² + λE(X²)/D³"""
    return p.EX / p.D ** 2 + p.lam * p.EX2 / p.D ** 3
