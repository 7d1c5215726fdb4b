# -*- coding: utf-8 -*-
"""
M/G/1 busy period 시뮬레이터 (선점-재개, 전환 비용 없음)
- 결정 시점: 도착, 완료, 획득 서비스가 s 에 닿는 순간 (threshold 정책)
- busy period k 의 도착/크기 스트림은 default_rng([seed, k]) 에서만 나온다
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

import config
from data.distributions import ServiceDistribution
from simulation.policies import JobView, Policy, SchedulerState

logger = logging.getLogger(__name__)

INF = math.inf


class SimulationError(RuntimeError):
    period: int | None = None


class DivergenceError(SimulationError):
    """busy period 하나가 이벤트 상한을 넘김"""


class NonWorkConservingError(SimulationError):
    """job 이 남아 있는데 정책이 서버를 쉬게 함"""


@dataclass
class Job:
    id: int
    arrival_time: float
    size: float
    attained: float = 0.0
    demoted: bool = False
    demoted_at: float = math.nan
    t_reached_s: float | None = None
    completion_time: float | None = None


@dataclass(frozen=True)
class BusyPeriodRecord:
    index: int
    W: float
    end_time: float     # 보정 전 시뮬레이션 종료 시각
    N_B: int
    sum_sojourn: float
    sum_truncated: float
    R: float
    M: int
    L: float
    event_A: bool
    switched: bool
    n_long: int


@dataclass(frozen=True)
class TraceEvent:
    event_time: float
    kind: str   # arrival | completion | demotion | switch
    job_id: int
    attained: float


def draw_workload(lam: float, d: ServiceDistribution, rng: np.random.Generator,
                  event_cap: int = config.EVENT_CAP) -> tuple[list[float], list[float]]:
    """busy period 의 (도착시각, 크기) 열. 정책과 무관하게 작업량만으로 종료 시점이 정해진다"""
    arrivals = [0.0]
    sizes = [d.sample(rng)]
    total = sizes[0]
    t = 0.0
    while True:
        t += rng.exponential(1.0 / lam)
        if t >= total:
            break
        arrivals.append(t)
        sizes.append(d.sample(rng))
        total += sizes[-1]
        if len(sizes) > event_cap:
            raise DivergenceError(f"도착 수가 상한 {event_cap} 을 넘었습니다 (λE(X) >= 1 ?)")
    return arrivals, sizes


def _views(jobs: list[Job], size_aware: bool) -> tuple[JobView, ...]:
    return tuple(
        JobView(j.id, j.arrival_time, j.attained, j.demoted, j.demoted_at,
                j.size - j.attained if size_aware else None)
        for j in jobs
    )


def run_busy_period(
    lam: float,
    d: ServiceDistribution,
    policy: Policy,
    rng: np.random.Generator,
    *,
    s: float | None = None,
    index: int = 0,
    event_cap: int = config.EVENT_CAP,
    trace: list[TraceEvent] | None = None,
) -> BusyPeriodRecord:
    """빈 시스템에 첫 도착이 들어온 순간(t=0)부터 시스템이 다시 빌 때까지"""
    arrivals, sizes = draw_workload(lam, d, rng, event_cap)
    n = len(sizes)
    threshold = policy.threshold
    s_acc = s if s is not None else threshold

    jobs = [Job(i, arrivals[i], sizes[i]) for i in range(n)]
    present: list[Job] = [jobs[0]]
    next_idx = 1
    now = 0.0
    events = 0
    idled = False
    high_empty_at: float | None = None
    m_count = 0

    policy.reset()
    if trace is not None:
        trace.append(TraceEvent(0.0, "arrival", 0, 0.0))

    def admit(t: float) -> None:
        nonlocal next_idx
        job = jobs[next_idx]
        present.append(job)
        next_idx += 1
        if trace is not None:
            trace.append(TraceEvent(t, "arrival", job.id, 0.0))

    while present or next_idx < n:
        events += 1
        if events > event_cap:
            raise DivergenceError(f"busy period 이벤트가 상한 {event_cap} 을 넘었습니다")
        next_arrival = arrivals[next_idx] if next_idx < n else INF

        if not present:
            idled = True
            now = next_arrival
            admit(now)
            continue

        state = SchedulerState(now, _views(present, policy.size_aware), threshold, policy.switched)
        chosen = policy.select(state)
        if chosen is None:
            if math.isinf(next_arrival):
                raise NonWorkConservingError(f"t={now:.6g} 에서 job {len(present)}개가 있는데 서버가 쉼")
            idled = True
            now = next_arrival
            admit(now)
            continue

        job = jobs[chosen]
        remaining = job.size - job.attained
        to_threshold = INF
        if threshold is not None and job.attained < threshold:
            to_threshold = threshold - job.attained
        run = min(remaining, to_threshold)

        if next_arrival < now + run:
            served = next_arrival - now
            if s_acc is not None and job.attained < s_acc <= job.attained + served:
                job.t_reached_s = now + (s_acc - job.attained)
            job.attained += served
            now = next_arrival
            admit(now)
            continue

        start = now
        now += run
        if s_acc is not None and job.attained < s_acc <= job.attained + run and job.t_reached_s is None:
            job.t_reached_s = start + (s_acc - job.attained)

        if remaining <= to_threshold:
            job.attained = job.size
            job.completion_time = now
            present.remove(job)
            if trace is not None:
                trace.append(TraceEvent(now, "completion", job.id, job.attained))
        else:
            job.attained = threshold
            job.t_reached_s = now if threshold == s_acc else job.t_reached_s
            if policy.demotes:
                job.demoted = True
                job.demoted_at = now
                if trace is not None:
                    trace.append(TraceEvent(now, "demotion", job.id, job.attained))
            if policy.on_threshold(job.id, now) and trace is not None:
                trace.append(TraceEvent(now, "switch", job.id, job.attained))

        if policy.demotes and high_empty_at is None and present and all(j.demoted for j in present):
            high_empty_at = now
            m_count = len(present)

    end_time = now
    total = math.fsum(sizes)
    if not idled:
        if abs(now - total) > config.END_TIME_REL_TOL * total:
            raise SimulationError(f"작업 보존 위반: 종료 {now!r} != 작업량 합 {total!r}")
        now = total

    if policy.demotes and high_empty_at is None:
        # 강등 없이 끝난 busy period: 고우선순위 집합이 W 에서 처음 빔
        high_empty_at, m_count = now, 0

    completions = [j.completion_time for j in jobs]
    sum_sojourn = math.fsum(c - j.arrival_time for c, j in zip(completions, jobs))
    if s_acc is None:
        sum_truncated, resid, event_a, n_long = sum_sojourn, 0.0, True, 0
    else:
        long_jobs = [j for j in jobs if j.size > s_acc]
        cut = [j.t_reached_s if j.size > s_acc else j.completion_time for j in jobs]
        sum_truncated = math.fsum(t - j.arrival_time for t, j in zip(cut, jobs))
        resid = math.fsum(j.completion_time - j.t_reached_s for j in long_jobs)
        event_a = all(x < s_acc for x in sizes)
        n_long = len(long_jobs)

    return BusyPeriodRecord(
        index=index,
        W=now,
        end_time=end_time,
        N_B=n,
        sum_sojourn=sum_sojourn,
        sum_truncated=sum_truncated,
        R=resid,
        M=m_count if policy.demotes else 0,
        L=high_empty_at if policy.demotes else math.nan,
        event_A=event_a,
        switched=policy.switched,
        n_long=n_long,
    )


# ---------------- 배치 ----------------

def period_rng(seed: int, k: int) -> np.random.Generator:
    return np.random.default_rng([seed, k])


def _run_range(lam, d, policy, seed, start, stop, s, event_cap) -> list[BusyPeriodRecord]:
    records = []
    for k in range(start, stop):
        try:
            records.append(run_busy_period(lam, d, policy, period_rng(seed, k), s=s, index=k, event_cap=event_cap))
        except SimulationError as e:
            err = type(e)(f"busy period {k}: {e}")
            err.period = k
            raise err from e
    return records


def run_batch(
    lam: float,
    d: ServiceDistribution,
    policy: Policy,
    n_periods: int,
    seed: int,
    *,
    s: float | None = None,
    workers: int = 1,
    event_cap: int | None = None,
) -> list[BusyPeriodRecord]:
    """독립 busy period n 개. period k 는 (seed, k) 에서만 결정되므로 workers 수와 무관하게 동일"""
    if n_periods < 1:
        raise ValueError(f"n_periods 는 1 이상이어야 합니다: {n_periods}")
    if event_cap is None:
        event_cap = config.EVENT_CAP
    logger.info("🔄 시뮬레이션: %r, λ=%g, %s, %d periods (workers=%d)", policy, lam, d.spec(), n_periods, workers)

    if workers <= 1 or n_periods < 2 * workers:
        records = _run_range(lam, d, policy, seed, 0, n_periods, s, event_cap)
    else:
        bounds = np.linspace(0, n_periods, workers + 1).astype(int)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_range, lam, d, policy, seed, int(lo), int(hi), s, event_cap)
                for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo
            ]
            records = [r for f in futures for r in f.result()]
        records.sort(key=lambda r: r.index)

    logger.info("✅ 시뮬레이션 완료: %d periods", len(records))
    return records


# ---------------- 작업량 불변성 ----------------

@dataclass
class InvarianceResult:
    passed: bool
    n_policies: int
    n_periods: int
    first_divergence: str | None = None
    checked: list[str] = field(default_factory=list)


def verify_workload_invariance(
    lam: float,
    d: ServiceDistribution,
    seed: int,
    policies: list[Policy],
    n_periods: int = config.INVARIANCE_PERIODS,
) -> InvarianceResult:
    """같은 도착/크기 스트림을 각 정책으로 재생해 (W, N_B) 열이 비트 단위로 같고
    보정 전 종료 시각이 END_TIME_REL_TOL 안에서 일치하는지 확인"""
    names = [repr(p) for p in policies]
    if len(policies) < 2:
        return InvarianceResult(True, len(policies), 0, None, names)

    def fail(k: int, msg: str) -> InvarianceResult:
        msg = f"period {k}: {msg}"
        logger.error("❌ 작업량 불변성 실패: %s", msg)
        return InvarianceResult(False, len(policies), k + 1, msg, names)

    for k in range(n_periods):
        reference = None
        for policy in policies:
            try:
                rec = run_busy_period(lam, d, policy, period_rng(seed, k), index=k)
            except SimulationError as e:
                return fail(k, f"{policy!r}: {e}")
            if reference is None:
                reference = (policy, rec)
                continue
            ref_policy, ref = reference
            if (rec.W, rec.N_B) != (ref.W, ref.N_B):
                return fail(k, f"{ref_policy!r} (W, N_B)={(ref.W, ref.N_B)} vs {policy!r} (W, N_B)={(rec.W, rec.N_B)}")
            if abs(rec.end_time - ref.end_time) > config.END_TIME_REL_TOL * ref.end_time:
                return fail(k, f"{ref_policy!r} 종료 {ref.end_time!r} vs {policy!r} 종료 {rec.end_time!r}")

    logger.info("✅ 작업량 불변성 통과: %d개 정책, %d periods", len(policies), n_periods)
    return InvarianceResult(True, len(policies), n_periods, None, names)
