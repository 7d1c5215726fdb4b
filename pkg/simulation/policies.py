# -*- coding: utf-8 -*-
"""
스케줄링 정책
- 크기 비공개 정책: fcfs, lcfs(선점), fb, gittins, po-lcfs, trunc-switch
- 크기 공개 정책: srpt
정책은 결정 시점마다 SchedulerState 를 보고 서비스할 job id 를 돌려준다.
"""
from __future__ import annotations

import logging
import math
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import NamedTuple

import config
from data.distributions import ServiceDistribution, TruncatedA, TruncatedB
from simulation.gittins import GittinsConfig, GittinsTable, build_table

logger = logging.getLogger(__name__)


class PolicySpecError(ValueError):
    """정책 명세 문자열 오류"""


class JobView(NamedTuple):
    """정책이 볼 수 있는 job 정보 (크기는 srpt 에만 remaining 으로 공개)"""

    id: int
    arrival_time: float
    attained: float
    demoted: bool = False
    demoted_at: float = math.nan
    remaining: float | None = None


@dataclass(frozen=True)
class SchedulerState:
    now: float
    jobs: tuple[JobView, ...]
    s: float | None = None
    switched: bool = False

    def restrict(self, jobs: tuple[JobView, ...]) -> "SchedulerState":
        return SchedulerState(now=self.now, jobs=jobs, s=self.s, switched=self.switched)


# ---------------- 정책 ----------------

class Policy(ABC):
    name: str = ""
    size_aware: bool = False
    demotes: bool = False
    threshold: float | None = None   # 획득 서비스가 이 값에 닿는 순간이 결정 시점

    def reset(self) -> None:
        """busy period 시작"""

    def on_threshold(self, job_id: int, now: float) -> bool:
        """어떤 job 의 획득 서비스가 threshold 에 도달. 상태가 바뀌면 True"""
        return False

    @property
    def switched(self) -> bool:
        return False

    @abstractmethod
    def select(self, state: SchedulerState) -> int | None:
        ...

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name})"


class FCFS(Policy):
    name = "fcfs"

    def select(self, state):
        return min(state.jobs, key=lambda j: (j.arrival_time, j.id)).id


class LCFS(Policy):
    """선점형 LCFS"""

    name = "lcfs"

    def select(self, state):
        return min(state.jobs, key=lambda j: (-j.arrival_time, j.id)).id


class FB(Policy):
    """최소 획득 서비스 우선 (LAS)"""

    name = "fb"

    def select(self, state):
        return min(state.jobs, key=lambda j: (j.attained, j.arrival_time, j.id)).id


class SRPT(Policy):
    name = "srpt"
    size_aware = True

    def select(self, state):
        return min(state.jobs, key=lambda j: (j.remaining, j.arrival_time, j.id)).id


class Gittins(Policy):
    name = "gittins"

    def __init__(self, table: GittinsTable):
        self.table = table

    def select(self, state):
        lookup = self.table.lookup
        return min(state.jobs, key=lambda j: (-lookup(j.attained), j.arrival_time, j.id)).id

    def __repr__(self):
        return f"Gittins({self.table.tag})"


def _is_low(job: JobView, s: float | None) -> bool:
    return job.demoted or (s is not None and job.attained >= s)


def po_lcfs_step(state: SchedulerState, inner: Policy) -> int:
    """획득 서비스가 s 미만인 job 이 있으면 inner 정책, 없으면 가장 최근에 강등된 job"""
    high = tuple(j for j in state.jobs if not _is_low(j, state.s))
    if high:
        return inner.select(state.restrict(high))
    # 이번 결정 시점에 s 에 닿은 job 은 지금 강등된 것으로 본다
    return max(state.jobs, key=lambda j: (j.demoted_at if j.demoted else state.now, j.arrival_time)).id


def trunc_switch_step(state: SchedulerState, pre: Policy, fallback: Policy) -> int:
    """발견 전에는 Type B 절단 분포의 Gittins, 발견 후에는 fallback"""
    found = state.switched or (state.s is not None and any(j.attained >= state.s for j in state.jobs))
    return fallback.select(state) if found else pre.select(state)


class POLCFS(Policy):
    name = "po-lcfs"
    demotes = True

    def __init__(self, inner: Policy, s: float):
        self.inner = inner
        self.threshold = s

    def select(self, state):
        return po_lcfs_step(state, self.inner)

    def __repr__(self):
        return f"POLCFS(inner={self.inner!r}, s={self.threshold:g})"


class TruncSwitch(Policy):
    name = "trunc-switch"

    def __init__(self, pre: Policy, fallback: Policy, s: float):
        self.pre = pre
        self.fallback = fallback
        self.threshold = s
        self.size_aware = fallback.size_aware
        self._switched = False

    @property
    def switched(self) -> bool:
        return self._switched

    def reset(self):
        self._switched = False
        self.fallback.reset()

    def on_threshold(self, job_id, now):
        if self._switched:
            return False
        self._switched = True
        return True

    def select(self, state):
        return trunc_switch_step(state, self.pre, self.fallback)

    def __repr__(self):
        return f"TruncSwitch(fallback={self.fallback!r}, s={self.threshold:g})"


# ---------------- 명세 문자열 ----------------

_BASIC = {"fcfs": FCFS, "lcfs": LCFS, "fb": FB, "srpt": SRPT}
_ALIASES = {"lcfs-preempt": "lcfs"}
_KINDS = ("fcfs", "lcfs", "fb", "srpt", "gittins", "po-lcfs", "trunc-switch")
_SPEC_RE = re.compile(r"^([a-z-]+)(?::(inner|fallback)=([a-z-]+))?$")


@dataclass(frozen=True)
class PolicySpec:
    kind: str
    inner: "PolicySpec | None" = None
    fallback: "PolicySpec | None" = None

    @property
    def needs_threshold(self) -> bool:
        return self.kind in ("po-lcfs", "trunc-switch")

    def __str__(self) -> str:
        if self.kind == "po-lcfs" and self.inner is not None:
            return f"po-lcfs:inner={self.inner}"
        if self.kind == "trunc-switch" and self.fallback is not None:
            return f"trunc-switch:fallback={self.fallback}"
        return self.kind


def parse_policy(text: str) -> PolicySpec:
    """`fcfs`, `lcfs`(`lcfs-preempt`), `fb`, `srpt`, `gittins`, `po-lcfs[:inner=fb]`, `trunc-switch[:fallback=fcfs]`"""
    m = _SPEC_RE.match(text.strip().lower())
    if not m:
        raise PolicySpecError(f"정책 명세 형식 오류 '{text}'")
    kind, option, value = m.groups()
    kind = _ALIASES.get(kind, kind)
    if kind not in _KINDS:
        raise PolicySpecError(f"알 수 없는 정책 '{kind}' (지원: {', '.join(_KINDS)})")

    if option is None:
        if kind == "po-lcfs":
            return PolicySpec(kind, inner=parse_policy(config.DEFAULT_INNER_POLICY))
        if kind == "trunc-switch":
            return PolicySpec(kind, fallback=parse_policy(config.DEFAULT_FALLBACK_POLICY))
        return PolicySpec(kind)

    sub = parse_policy(value)
    if sub.needs_threshold:
        raise PolicySpecError(f"'{text}': 하위 정책은 threshold 정책일 수 없습니다")
    if kind == "po-lcfs" and option == "inner":
        if sub.kind == "srpt":
            raise PolicySpecError("po-lcfs 의 inner 정책은 크기 비공개 정책이어야 합니다")
        return PolicySpec(kind, inner=sub)
    if kind == "trunc-switch" and option == "fallback":
        return PolicySpec(kind, fallback=sub)
    raise PolicySpecError(f"'{kind}' 는 '{option}' 옵션을 받지 않습니다")


def build_policy(
    spec: PolicySpec | str,
    d: ServiceDistribution,
    s: float | None = None,
    cfg: GittinsConfig | None = None,
) -> Policy:
    """명세 → 정책 객체. gittins 테이블은 po-lcfs 는 Type A, trunc-switch 는 Type B 절단 분포로 계산"""
    if isinstance(spec, str):
        spec = parse_policy(spec)
    if spec.kind in _BASIC:
        return _BASIC[spec.kind]()
    if spec.kind == "gittins":
        return Gittins(build_table(d, cfg))

    if s is None or not s > 0:
        raise PolicySpecError(f"'{spec}' 정책에는 양수 절단점 s 가 필요합니다")
    if spec.kind == "po-lcfs":
        inner_spec = spec.inner or parse_policy(config.DEFAULT_INNER_POLICY)
        inner = build_policy(inner_spec, TruncatedA(d, s), None, cfg)
        logger.debug("po-lcfs 구성: inner=%r, s=%g", inner, s)
        return POLCFS(inner, s)

    fallback_spec = spec.fallback or parse_policy(config.DEFAULT_FALLBACK_POLICY)
    pre = Gittins(build_table(TruncatedB(d, s), cfg))
    fallback = build_policy(fallback_spec, d, None, cfg)
    logger.debug("trunc-switch 구성: fallback=%r, s=%g", fallback, s)
    return TruncSwitch(pre, fallback, s)
