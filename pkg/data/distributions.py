# -*- coding: utf-8 -*-
"""
서비스 시간 분포 모듈
- closed-form 1차/2차 모멘트 및 꼬리 모멘트 (shifted-pareto, exponential, deterministic, uniform)
- Type A 절단 (min(X, s), s 에 atom) / Type B 절단 (X | X <= s)
- 좌연속 일반화 역함수 기반 샘플링
- closed form 이 없는 경우 scipy quad 로 대체
"""
from __future__ import annotations

import math
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import ClassVar

import numpy as np
from scipy import integrate

import config

INF = math.inf


class DistributionSpecError(ValueError):
    """분포 명세 문자열 또는 파라미터 오류"""


# ---------------- 적분 helpers ----------------

def _power_integral(p: float, u0: float, u1: float) -> float:
    """∫_{u0}^{u1} u^p du  (u0 > 0, u1 = inf 허용)"""
    if u1 <= u0:
        return 0.0
    if math.isinf(u1):
        if p >= -1.0:
            return INF
        return -(u0 ** (p + 1.0)) / (p + 1.0)
    if p == -1.0:
        return math.log(u1 / u0)
    return (u1 ** (p + 1.0) - u0 ** (p + 1.0)) / (p + 1.0)


def _quad(fn, lo: float, hi: float, atoms: tuple[float, ...] = ()) -> float:
    """atom 위치를 분할점으로 넘기는 적응형 구적법 (무한 상한은 분할해서 처리)"""
    if hi <= lo:
        return 0.0
    opts = dict(epsrel=config.QUAD_REL_TOL, epsabs=config.QUAD_ABS_TOL, limit=config.QUAD_LIMIT)
    inner = sorted(a for a in atoms if lo < a < hi)
    if math.isinf(hi):
        split = (inner[-1] if inner else lo) + 1.0
        head = _quad(fn, lo, split, tuple(inner))
        tail, _ = integrate.quad(fn, split, INF, **opts)
        return head + tail
    value, _ = integrate.quad(fn, lo, hi, points=inner or None, **opts)
    return value


def quad_partial_moment(d: "ServiceDistribution", k: int, lo: float = -INF, hi: float = INF) -> float:
    """E[X^k; lo < X <= hi] 를 부분적분 형태로 수치 계산 (atom 포함 일반 분포에 유효)"""
    lo = max(lo, 0.0)
    if hi <= lo:
        return 0.0
    boundary = lo ** k * d.survival(lo)
    if not math.isinf(hi):
        boundary -= hi ** k * d.survival(hi)
    integral = _quad(lambda x: k * x ** (k - 1) * d.survival(x), lo, hi, d.atoms())
    return boundary + integral


def quad_integrated_survival(d: "ServiceDistribution", lo: float, hi: float) -> float:
    """∫_lo^hi P(X > t) dt 수치 계산"""
    lo = max(lo, 0.0)
    return _quad(d.survival, lo, hi, d.atoms())


# ---------------- 분포 기본 클래스 ----------------

class ServiceDistribution(ABC):
    """[0, inf) 위의 서비스 시간 분포 (연속부 + atom)"""

    kind: ClassVar[str] = ""

    @abstractmethod
    def survival(self, x: float) -> float:
        """P(X > x)"""

    @abstractmethod
    def quantile(self, u: float) -> float:
        """min{x : F(x) >= u}"""

    @abstractmethod
    def spec(self) -> str:
        """명세 문자열 (parse_distribution 의 역)"""

    def cdf(self, x: float) -> float:
        return 1.0 - self.survival(x)

    def cdf_left(self, x: float) -> float:
        """P(X < x); 연속 분포는 cdf 와 동일"""
        return self.cdf(x)

    def atom(self, x: float) -> float:
        return max(0.0, self.cdf(x) - self.cdf_left(x))

    def atoms(self) -> tuple[float, ...]:
        return ()

    @property
    def support_max(self) -> float:
        return INF

    def mass_between(self, lo: float, hi: float) -> float:
        """P(lo < X <= hi)"""
        if hi <= lo:
            return 0.0
        return max(0.0, self.survival(lo) - self.survival(hi))

    def partial_moment(self, k: int, lo: float = -INF, hi: float = INF) -> float:
        """E[X^k; lo < X <= hi]"""
        return quad_partial_moment(self, k, lo, hi)

    def integrated_survival(self, lo: float, hi: float) -> float:
        return quad_integrated_survival(self, lo, hi)

    def mean(self) -> float:
        return self.partial_moment(1)

    def second_moment(self) -> float:
        return self.partial_moment(2)

    def sample(self, rng: np.random.Generator) -> float:
        return self.quantile(rng.random())

    def __str__(self) -> str:
        return self.spec()


def _fmt(v: float) -> str:
    return f"{v:.12g}"


@dataclass(frozen=True)
class ShiftedPareto(ServiceDistribution):
    """P(X > x) = (x/scale + 1)^(-alpha), x >= 0"""

    alpha: float
    scale: float = 1.0
    kind: ClassVar[str] = "pareto"

    def __post_init__(self):
        if not (self.alpha > 0 and self.scale > 0):
            raise DistributionSpecError(f"pareto 파라미터 오류: alpha={self.alpha}, scale={self.scale}")

    def survival(self, x: float) -> float:
        if x < 0:
            return 1.0
        return (x / self.scale + 1.0) ** (-self.alpha)

    def quantile(self, u: float) -> float:
        if u >= 1.0:
            return INF
        return self.scale * ((1.0 - u) ** (-1.0 / self.alpha) - 1.0)

    def spec(self) -> str:
        text = f"pareto:alpha={_fmt(self.alpha)}"
        if self.scale != 1.0:
            text += f",scale={_fmt(self.scale)}"
        return text

    def partial_moment(self, k: int, lo: float = -INF, hi: float = INF) -> float:
        if k not in (1, 2):
            return super().partial_moment(k, lo, hi)
        lo = max(lo, 0.0)
        if hi <= lo:
            return 0.0
        if math.isinf(hi) and self.alpha <= k:
            return INF
        a, c = self.alpha, self.scale
        y0, y1 = lo / c, hi / c
        boundary = y0 ** k * (y0 + 1.0) ** (-a)
        if not math.isinf(y1):
            boundary -= y1 ** k * (y1 + 1.0) ** (-a)
        if k == 1:
            integral = _power_integral(-a, y0 + 1.0, y1 + 1.0)
        else:
            integral = 2.0 * (_power_integral(1.0 - a, y0 + 1.0, y1 + 1.0)
                              - _power_integral(-a, y0 + 1.0, y1 + 1.0))
        return c ** k * (boundary + integral)

    def integrated_survival(self, lo: float, hi: float) -> float:
        lo = max(lo, 0.0)
        if hi <= lo:
            return 0.0
        return self.scale * _power_integral(-self.alpha, lo / self.scale + 1.0, hi / self.scale + 1.0)

    def mean(self) -> float:
        return self.scale / (self.alpha - 1.0) if self.alpha > 1.0 else INF

    def second_moment(self) -> float:
        if self.alpha <= 2.0:
            return INF
        return 2.0 * self.scale ** 2 / ((self.alpha - 1.0) * (self.alpha - 2.0))


@dataclass(frozen=True)
class Exponential(ServiceDistribution):
    rate: float
    kind: ClassVar[str] = "exp"

    def __post_init__(self):
        if not self.rate > 0:
            raise DistributionSpecError(f"exp 파라미터 오류: rate={self.rate}")

    def survival(self, x: float) -> float:
        if x < 0:
            return 1.0
        return math.exp(-self.rate * x)

    def quantile(self, u: float) -> float:
        if u >= 1.0:
            return INF
        return -math.log1p(-u) / self.rate

    def spec(self) -> str:
        return f"exp:rate={_fmt(self.rate)}"

    def mass_between(self, lo: float, hi: float) -> float:
        lo = max(lo, 0.0)
        if hi <= lo:
            return 0.0
        if math.isinf(hi):
            return self.survival(lo)
        # expm1: 작은 구간에서도 상대 정밀도 유지
        return self.survival(lo) * -math.expm1(-self.rate * (hi - lo))

    def integrated_survival(self, lo: float, hi: float) -> float:
        return self.mass_between(lo, hi) / self.rate

    def partial_moment(self, k: int, lo: float = -INF, hi: float = INF) -> float:
        if k not in (1, 2):
            return super().partial_moment(k, lo, hi)
        lo = max(lo, 0.0)
        if hi <= lo:
            return 0.0
        mu = self.rate
        s_lo = self.survival(lo)
        s_hi = 0.0 if math.isinf(hi) else self.survival(hi)
        hi_term = 0.0 if math.isinf(hi) else hi ** k * s_hi
        if k == 1:
            return lo * s_lo - hi_term + self.mass_between(lo, hi) / mu
        tail = s_lo * (lo / mu + 1.0 / mu ** 2)
        if not math.isinf(hi):
            tail -= s_hi * (hi / mu + 1.0 / mu ** 2)
        return lo ** 2 * s_lo - hi_term + 2.0 * tail

    def mean(self) -> float:
        return 1.0 / self.rate

    def second_moment(self) -> float:
        return 2.0 / self.rate ** 2


@dataclass(frozen=True)
class Deterministic(ServiceDistribution):
    c: float
    kind: ClassVar[str] = "det"

    def __post_init__(self):
        if not self.c >= 0:
            raise DistributionSpecError(f"det 파라미터 오류: c={self.c}")

    def survival(self, x: float) -> float:
        return 1.0 if x < self.c else 0.0

    def cdf_left(self, x: float) -> float:
        return 1.0 if x > self.c else 0.0

    def atoms(self) -> tuple[float, ...]:
        return (self.c,)

    @property
    def support_max(self) -> float:
        return self.c

    def quantile(self, u: float) -> float:
        return self.c

    def spec(self) -> str:
        return f"det:c={_fmt(self.c)}"

    def partial_moment(self, k: int, lo: float = -INF, hi: float = INF) -> float:
        return self.c ** k if lo < self.c <= hi else 0.0

    def integrated_survival(self, lo: float, hi: float) -> float:
        return max(0.0, min(hi, self.c) - max(lo, 0.0))


@dataclass(frozen=True)
class Uniform(ServiceDistribution):
    a: float
    b: float
    kind: ClassVar[str] = "unif"

    def __post_init__(self):
        if not (0.0 <= self.a < self.b):
            raise DistributionSpecError(f"unif 파라미터 오류: a={self.a}, b={self.b}")

    def survival(self, x: float) -> float:
        if x < self.a:
            return 1.0
        if x >= self.b:
            return 0.0
        return (self.b - x) / (self.b - self.a)

    @property
    def support_max(self) -> float:
        return self.b

    def quantile(self, u: float) -> float:
        return self.a + min(max(u, 0.0), 1.0) * (self.b - self.a)

    def spec(self) -> str:
        return f"unif:a={_fmt(self.a)},b={_fmt(self.b)}"

    def partial_moment(self, k: int, lo: float = -INF, hi: float = INF) -> float:
        l = min(max(lo, self.a), self.b)
        h = min(max(hi, self.a), self.b)
        if h <= l:
            return 0.0
        return (h ** (k + 1) - l ** (k + 1)) / ((k + 1) * (self.b - self.a))

    def integrated_survival(self, lo: float, hi: float) -> float:
        lo = max(lo, 0.0)
        if hi <= lo:
            return 0.0
        below = max(0.0, min(hi, self.a) - lo)
        l, h = max(lo, self.a), min(hi, self.b)
        inside = 0.0
        if h > l:
            inside = ((self.b - l) ** 2 - (self.b - h) ** 2) / (2.0 * (self.b - self.a))
        return below + inside


@dataclass(frozen=True)
class TruncatedA(ServiceDistribution):
    """Type A 절단: X^s = min(X, s). s 에 질량 P(X >= s) 의 atom"""

    base: ServiceDistribution
    s: float
    kind: ClassVar[str] = "truncA"

    def __post_init__(self):
        if not self.s > 0:
            raise DistributionSpecError(f"truncA 절단점 오류: s={self.s}")

    @property
    def atom_mass(self) -> float:
        # 정의 그대로 P(X >= s) (base 가 s 에 atom 을 가지면 P(X > s) 와 다름)
        return self.base.survival(self.s) + self.base.atom(self.s)

    def survival(self, x: float) -> float:
        return self.base.survival(x) if x < self.s else 0.0

    def cdf(self, x: float) -> float:
        return self.base.cdf(x) if x < self.s else 1.0

    def cdf_left(self, x: float) -> float:
        return self.base.cdf_left(x) if x <= self.s else 1.0

    def atoms(self) -> tuple[float, ...]:
        return tuple(a for a in self.base.atoms() if a < self.s) + (self.s,)

    @property
    def support_max(self) -> float:
        return min(self.s, self.base.support_max)

    def quantile(self, u: float) -> float:
        if u >= self.base.cdf_left(self.s):
            return self.s
        return min(self.base.quantile(u), self.s)

    def spec(self) -> str:
        return f"truncA({self.base.spec()},s={_fmt(self.s)})"

    def mass_between(self, lo: float, hi: float) -> float:
        if lo >= self.s or hi <= lo:
            return 0.0
        if hi >= self.s:
            return self.base.survival(lo)
        return self.base.mass_between(lo, hi)

    def partial_moment(self, k: int, lo: float = -INF, hi: float = INF) -> float:
        s = self.s
        if lo >= s or hi <= lo:
            return 0.0
        if hi < s:
            return self.base.partial_moment(k, lo, hi)
        below = self.base.partial_moment(k, lo, s) - s ** k * self.base.atom(s)
        return below + s ** k * self.atom_mass

    def integrated_survival(self, lo: float, hi: float) -> float:
        return self.base.integrated_survival(lo, min(hi, self.s))


@dataclass(frozen=True)
class TruncatedB(ServiceDistribution):
    """Type B 절단: X | X <= s, CDF = F(a ∧ s) / F(s)"""

    base: ServiceDistribution
    s: float
    kind: ClassVar[str] = "truncB"

    def __post_init__(self):
        if not self.s > 0:
            raise DistributionSpecError(f"truncB 절단점 오류: s={self.s}")
        if not self.base.cdf(self.s) > 0:
            raise DistributionSpecError(f"truncB 는 F(s) > 0 이 필요합니다: s={self.s}")

    @property
    def norm(self) -> float:
        return self.base.cdf(self.s)

    def survival(self, x: float) -> float:
        if x >= self.s:
            return 0.0
        return max(0.0, (self.base.survival(x) - self.base.survival(self.s)) / self.norm)

    def cdf_left(self, x: float) -> float:
        return self.base.cdf_left(x) / self.norm if x <= self.s else 1.0

    def atoms(self) -> tuple[float, ...]:
        return tuple(a for a in self.base.atoms() if a <= self.s)

    @property
    def support_max(self) -> float:
        return min(self.s, self.base.support_max)

    def quantile(self, u: float) -> float:
        return min(self.base.quantile(u * self.norm), self.s)

    def spec(self) -> str:
        return f"truncB({self.base.spec()},s={_fmt(self.s)})"

    def mass_between(self, lo: float, hi: float) -> float:
        return self.base.mass_between(lo, min(hi, self.s)) / self.norm

    def partial_moment(self, k: int, lo: float = -INF, hi: float = INF) -> float:
        return self.base.partial_moment(k, lo, min(hi, self.s)) / self.norm

    def integrated_survival(self, lo: float, hi: float) -> float:
        lo = max(lo, 0.0)
        u = min(hi, self.s)
        if u <= lo:
            return 0.0
        drop = self.base.survival(self.s) * (u - lo)
        return max(0.0, self.base.integrated_survival(lo, u) - drop) / self.norm


# ---------------- 꼬리 통계 ----------------

@dataclass(frozen=True)
class TailStats:
    """절단점 s 에서의 꼬리/절단 모멘트"""

    s: float
    p_tail: float      # P(X > s)
    m1_tail: float     # E[X 1{X>s}]
    m2_tail: float     # E[X^2 1{X>s}]
    cond_m1: float     # E[X | X>s]
    cond_m2: float     # E[X^2 | X>s]
    resid_m1: float    # E[X - s | X>s]
    m1_below: float    # E[X 1{X<s}]
    m2_below: float    # E[X^2 1{X<s}]
    m1_trunc: float    # E(X^s)
    m2_trunc: float    # E((X^s)^2)
    degenerate: bool = False  # p_tail = 0 → 조건부 값은 0 으로 둠


def survival(d: ServiceDistribution, x: float) -> float:
    if x < 0:
        raise ValueError(f"x 는 0 이상이어야 합니다: {x}")
    return d.survival(x)


def moments(d: ServiceDistribution) -> tuple[float, float]:
    """(E(X), E(X^2)); 발산하면 inf"""
    return d.mean(), d.second_moment()


def tail_stats(d: ServiceDistribution, s: float) -> TailStats:
    if not s > 0:
        raise ValueError(f"절단점 s 는 양수여야 합니다: {s}")
    p_tail = d.survival(s)
    m1_tail = d.partial_moment(1, s, INF)
    m2_tail = d.partial_moment(2, s, INF)
    atom_s = d.atom(s)
    p_ge = p_tail + atom_s
    m1_below = d.partial_moment(1, -INF, s) - s * atom_s
    m2_below = d.partial_moment(2, -INF, s) - s ** 2 * atom_s
    if p_tail > 0:
        cond_m1 = m1_tail / p_tail
        cond_m2 = m2_tail / p_tail
        resid_m1 = max(cond_m1 - s, 0.0)
        degenerate = False
    else:
        cond_m1 = cond_m2 = resid_m1 = 0.0
        degenerate = True
    return TailStats(
        s=s, p_tail=p_tail, m1_tail=m1_tail, m2_tail=m2_tail,
        cond_m1=cond_m1, cond_m2=cond_m2, resid_m1=resid_m1,
        m1_below=m1_below, m2_below=m2_below,
        m1_trunc=m1_below + s * p_ge, m2_trunc=m2_below + s ** 2 * p_ge,
        degenerate=degenerate,
    )


def sample(d: ServiceDistribution, rng: np.random.Generator) -> float:
    return d.sample(rng)


def thm1_condition(d: ServiceDistribution, s: float) -> float:
    """P(X > s) · E[X^2 1{X<s}]. s → inf 에서 0 으로 가야 PO-LCFS 근사가 수렴"""
    if not s > 0:
        raise ValueError(f"절단점 s 는 양수여야 합니다: {s}")
    m2_below = d.partial_moment(2, -INF, s) - s ** 2 * d.atom(s)
    return d.survival(s) * m2_below


# ---------------- 명세 문자열 파싱 ----------------

_FAMILIES = {
    "pareto": (ShiftedPareto, ("alpha",), ("scale",)),
    "exp": (Exponential, ("rate",), ()),
    "det": (Deterministic, ("c",), ()),
    "unif": (Uniform, ("a", "b"), ()),
}

_TRUNC_RE = re.compile(r"^(truncA|truncB)\((.*),\s*s\s*=\s*([^,()]+)\)$")


def _parse_params(text: str) -> dict[str, float]:
    params = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in part:
            raise DistributionSpecError(f"파라미터 형식 오류 '{part}' (key=value 필요)")
        key, value = (t.strip() for t in part.split("=", 1))
        try:
            params[key] = float(value)
        except ValueError as e:
            raise DistributionSpecError(f"숫자가 아닌 파라미터 값 '{key}={value}'") from e
    return params


def parse_distribution(text: str) -> ServiceDistribution:
    """`pareto:alpha=3`, `exp:rate=1`, `det:c=2`, `unif:a=0,b=1`, `truncA(<base>,s=4)`, `truncB(<base>,s=4)`"""
    text = text.strip()
    m = _TRUNC_RE.match(text)
    if m:
        wrapper, inner, s_text = m.groups()
        base = parse_distribution(inner)
        try:
            s = float(s_text)
        except ValueError as e:
            raise DistributionSpecError(f"절단점 값 오류 '{s_text}'") from e
        return TruncatedA(base, s) if wrapper == "truncA" else TruncatedB(base, s)

    name, _, rest = text.partition(":")
    family = _FAMILIES.get(name.strip())
    if family is None:
        raise DistributionSpecError(f"알 수 없는 분포 '{text}' (지원: {', '.join(_FAMILIES)}, truncA, truncB)")
    cls, required, optional = family
    params = _parse_params(rest)
    missing = [k for k in required if k not in params]
    unknown = [k for k in params if k not in required + optional]
    if missing or unknown:
        raise DistributionSpecError(f"'{text}': 누락 {missing}, 알 수 없음 {unknown}")
    return cls(**params)
