# -*- coding: utf-8 -*-
"""
Gittins index 계산
- efficiency: 완료 확률 / 기대 투입 서비스
- gittins_index: log 간격 delta 격자 위의 sup (+ atom 에 정확히 닿는 delta)
- GittinsTable: 획득 서비스 격자 위의 사전 계산 테이블, 선형 보간 조회
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

import config
from data.distributions import ServiceDistribution, TruncatedA, TruncatedB

logger = logging.getLogger(__name__)

INF = math.inf


@dataclass(frozen=True)
class GittinsConfig:
    n_delta: int = config.GITTINS_N_DELTA
    grid_step: float | None = None    # None → a_max / GITTINS_GRID_DIVISIONS
    a_max: float | None = None        # None → 절단 분포는 s, 그 외 분위수
    grid_divisions: int = config.GITTINS_GRID_DIVISIONS
    untruncated_quantile: float = config.GITTINS_UNTRUNCATED_QUANTILE
    horizon_quantile: float = config.GITTINS_HORIZON_QUANTILE
    delta_min_ratio: float = config.GITTINS_DELTA_MIN_RATIO
    atom_eps: float = config.GITTINS_ATOM_EPS


def efficiency(d: ServiceDistribution, a: float, delta: float) -> float:
    """[F(a+δ) − F(a)] / ∫_a^{a+δ} P(X>t) dt"""
    if not delta > 0:
        raise ValueError(f"delta 는 양수여야 합니다: {delta}")
    invested = d.integrated_survival(a, a + delta)
    if invested <= 0.0:
        return INF
    return d.mass_between(a, a + delta) / invested


def _delta_grid(d: ServiceDistribution, a: float, cfg: GittinsConfig) -> np.ndarray | None:
    edge = d.support_max
    if math.isfinite(edge):
        width = edge - a
        if width <= cfg.atom_eps:
            return None
    else:
        horizon = d.quantile(cfg.horizon_quantile)
        width = max(horizon - a, horizon)
    deltas = np.geomspace(width * cfg.delta_min_ratio, width, cfg.n_delta)
    # atom 에 정확히 닿는 delta 는 반드시 포함 (효율이 atom 에서 불연속)
    extra = [x - a for x in d.atoms() if x - a > cfg.atom_eps and x - a <= width]
    if extra:
        deltas = np.union1d(deltas, extra)
    return deltas


def gittins_index(d: ServiceDistribution, a: float, cfg: GittinsConfig | None = None) -> float:
    """sup_δ efficiency(d, a, δ); 남은 질량이 바로 앞 atom 에 몰려 있으면 +inf"""
    cfg = cfg or GittinsConfig()
    if d.survival(a) <= 0.0:
        return INF
    deltas = _delta_grid(d, a, cfg)
    if deltas is None:
        return INF
    return max(efficiency(d, a, float(delta)) for delta in deltas)


@dataclass(frozen=True, eq=False)
class GittinsTable:
    grid: np.ndarray
    index: np.ndarray
    a_max: float
    tag: str = ""

    def lookup(self, a: float) -> float:
        """격자 사이 선형 보간, a_max 이후는 마지막 값으로 고정"""
        grid = self.grid
        if a >= self.a_max:
            return float(self.index[-1])
        if a <= grid[0]:
            return float(self.index[0])
        i = int(np.searchsorted(grid, a, side="right")) - 1
        lo, hi = self.index[i], self.index[i + 1]
        if not math.isfinite(hi):
            return float(lo)
        w = (a - grid[i]) / (grid[i + 1] - grid[i])
        return float(lo + w * (hi - lo))


def _default_a_max(d: ServiceDistribution, cfg: GittinsConfig) -> float:
    if isinstance(d, (TruncatedA, TruncatedB)):
        return d.support_max
    return d.quantile(cfg.untruncated_quantile)


def build_table(d: ServiceDistribution, cfg: GittinsConfig | None = None) -> GittinsTable:
    cfg = cfg or GittinsConfig()
    a_max = cfg.a_max if cfg.a_max is not None else _default_a_max(d, cfg)
    if not (math.isfinite(a_max) and a_max > 0):
        raise ValueError(f"a_max 는 유한한 양수여야 합니다: {a_max}")
    if a_max > d.support_max * (1.0 + 1e-12):
        raise ValueError(f"a_max={a_max} 가 support 오른쪽 끝 {d.support_max} 을 넘습니다")
    step = cfg.grid_step if cfg.grid_step is not None else a_max / cfg.grid_divisions
    if not step > 0:
        raise ValueError(f"grid_step 은 양수여야 합니다: {step}")

    n = max(1, math.ceil(a_max / step - 1e-9))
    grid = np.linspace(0.0, a_max, n + 1)
    logger.debug("🔄 Gittins 테이블 계산: %s, 격자 %d점, a_max=%.6g", d.spec(), n + 1, a_max)
    index = np.array([gittins_index(d, float(a), cfg) for a in grid])
    logger.info("✅ Gittins 테이블 완료: %s (%d점)", d.spec(), n + 1)
    return GittinsTable(grid=grid, index=index, a_max=a_max, tag=d.spec())


def gittins_table_frame(table: GittinsTable) -> pd.DataFrame:
    """CSV 출력용 (columns: a, G(a))"""
    return pd.DataFrame({"a": table.grid, "G(a)": table.index})
