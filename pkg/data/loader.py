# -*- coding: utf-8 -*-
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Mapping

# 프로젝트 설정 파일 import
import config
from data.distributions import DistributionSpecError, ServiceDistribution, parse_distribution
from simulation.policies import PolicySpec, PolicySpecError, parse_policy

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """실험 설정 오류 (exit 1)"""


# JSON 키 → 필드 이름
_KEY_ALIASES = {"lambda": "lam", "n": "n_periods", "s": "s_list", "out": "out_dir"}


@dataclass(frozen=True)
class ExperimentConfig:
    """실험 설정 (JSON 파일 + CLI 덮어쓰기)"""

    lam: float = config.DEFAULT_LAMBDA
    dist: str = config.DEFAULT_DIST
    policy: str = config.DEFAULT_POLICY
    s_list: tuple[float, ...] = config.DEFAULT_S_LIST
    n_periods: int = config.DEFAULT_N_PERIODS
    seed: int = config.DEFAULT_SEED
    confidence: float = config.DEFAULT_CONFIDENCE
    out_dir: str = config.DEFAULT_OUT_DIR
    workers: int = config.DEFAULT_WORKERS
    reference: str = config.DEFAULT_REFERENCE_POLICY

    @property
    def distribution(self) -> ServiceDistribution:
        return parse_distribution(self.dist)

    @property
    def policy_spec(self) -> PolicySpec:
        return parse_policy(self.policy)

    @property
    def reference_spec(self) -> PolicySpec:
        return parse_policy(self.reference)

    def validate(self, require_stable: bool = True) -> "ExperimentConfig":
        """require_stable=False 는 λ 를 쓰지 않는 명령(gittins-table) 용"""
        try:
            d = self.distribution
            self.policy_spec
            if self.reference_spec.needs_threshold:
                raise ConfigError(f"reference 정책은 threshold 정책일 수 없습니다: {self.reference}")
        except (DistributionSpecError, PolicySpecError) as e:
            raise ConfigError(str(e)) from e

        if not (math.isfinite(self.lam) and self.lam > 0):
            raise ConfigError(f"lambda 는 양수여야 합니다: {self.lam}")
        rho = self.lam * d.mean()
        if require_stable and not rho < 1.0:
            raise ConfigError(f"불안정한 설정: λE(X) = {rho:.6g} >= 1 ({self.dist}, λ={self.lam})")
        if not self.s_list:
            raise ConfigError("s_list 가 비어 있습니다")
        if any(not (math.isfinite(s) and s > 0) for s in self.s_list):
            raise ConfigError(f"s_list 값은 유한한 양수여야 합니다: {self.s_list}")
        if any(b <= a for a, b in zip(self.s_list, self.s_list[1:])):
            raise ConfigError(f"s_list 는 순증가여야 합니다: {self.s_list}")
        if self.n_periods < 1:
            raise ConfigError(f"n_periods 는 1 이상이어야 합니다: {self.n_periods}")
        if not 0.0 < self.confidence < 1.0:
            raise ConfigError(f"confidence 는 (0, 1) 범위여야 합니다: {self.confidence}")
        if self.workers < 1:
            raise ConfigError(f"workers 는 1 이상이어야 합니다: {self.workers}")
        return self


def _coerce(name: str, value: Any) -> Any:
    if name == "s_list":
        if isinstance(value, (int, float)):
            return (float(value),)
        if isinstance(value, str):
            return tuple(float(v) for v in value.split(",") if v.strip())
        return tuple(float(v) for v in value)
    if name in ("n_periods", "seed", "workers"):
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(f"{name} 는 정수여야 합니다: {value}")
        return int(value)
    if name in ("lam", "confidence"):
        return float(value)
    return str(value)


def _normalize(raw: Mapping[str, Any]) -> dict[str, Any]:
    known = {f.name for f in fields(ExperimentConfig)}
    out = {}
    for key, value in raw.items():
        if value is None:
            continue
        name = _KEY_ALIASES.get(key, key)
        if name not in known:
            raise ConfigError(f"알 수 없는 설정 키 '{key}'")
        try:
            out[name] = _coerce(name, value)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"설정 값 오류 '{key}={value!r}': {e}") from e
    return out


def load_config(
    path: str | Path | None = None,
    overrides: Mapping[str, Any] | None = None,
    require_stable: bool = True,
) -> ExperimentConfig:
    """JSON 파일을 읽고 overrides(CLI 플래그) 를 덮어쓴 뒤 검증"""
    cfg = ExperimentConfig()
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError as e:
            raise ConfigError(f"설정 파일이 없습니다: {path}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"설정 파일 JSON 오류 ({path}): {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError(f"설정 파일 최상위는 객체여야 합니다: {path}")
        cfg = replace(cfg, **_normalize(raw))
        logger.debug("설정 파일 로드: %s", path)
    if overrides:
        cfg = replace(cfg, **_normalize(overrides))
    return cfg.validate(require_stable)
