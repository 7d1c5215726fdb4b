# -*- coding: utf-8 -*-
"""
M/G/1 절단 스케줄링 실험 CLI

  python main_app.py validate      # P-K oracle, 재생 항등식, 작업량 불변성, 분할 항등식
  python main_app.py simulate      # 단일 배치 → records.csv, summary.csv (--trace → trace.csv)
  python main_app.py sweep         # s 별 gap / 잔여 비용 / 상한 판정
  python main_app.py bounds        # closed-form 상한 테이블
  python main_app.py gittins-table # Gittins index 테이블
"""
from __future__ import annotations

import argparse
import logging
import math
import sys

import pandas as pd

import config
from data.distributions import DistributionSpecError, quad_partial_moment, tail_stats
from data.loader import ConfigError, ExperimentConfig, load_config
from data.preprocess import estimates_to_frame, records_to_frame, trace_to_frame, verdicts_to_frame
from insight.analyzer import GAP_COLUMNS, RESIDUAL_COLUMNS, bounds_table, sweep_point
from insight.bounds import BoundError, bound_params, busy_period_means, pk_mean_sojourn
from insight.estimators import (
    Estimate,
    InsufficientSamplesError,
    Verdict,
    event_probability,
    not_checked,
    ratio_mean,
    regen_mean,
    within_tolerance,
)
from simulation.gittins import build_table, gittins_table_frame
from simulation.policies import PolicySpecError, build_policy
from simulation.simulator import (
    SimulationError,
    period_rng,
    run_batch,
    run_busy_period,
    verify_workload_invariance,
)
from util.export import ResultWriter, check_dependencies

logger = logging.getLogger("main_app")


def _exit_code(verdicts: list[Verdict]) -> int:
    failed = [v for v in verdicts if v.failed]
    for v in failed:
        logger.error("❌ FAIL %s: %.6g (ci %.3g) vs %.6g", v.quantity, v.estimate, v.ci, v.bound)
    return config.EXIT_CODES["validation"] if failed else config.EXIT_CODES["ok"]


def _exact(quantity: str, value: float, target: float, rel_tol: float = config.PARTITION_REL_TOL) -> Verdict:
    return within_tolerance(Estimate(value, 0.0, 1, quantity), target, rel_tol, quantity)


# ---------------- validate ----------------

def _partition_checks(cfg: ExperimentConfig) -> list[Verdict]:
    d = cfg.distribution
    EX, EX2 = d.mean(), d.second_moment()
    out = []
    for s in cfg.s_list:
        t = tail_stats(d, s)
        below1 = d.partial_moment(1, -math.inf, s)
        out.append(_exact(f"E[X1(X>s)]+E[X1(X<=s)] (s={s:g})", t.m1_tail + below1, EX))
        out.append(_exact(f"m1_tail closed vs quad (s={s:g})", t.m1_tail, quad_partial_moment(d, 1, s, math.inf),
                          config.QUAD_CHECK_REL_TOL))
        if math.isfinite(EX2):
            below2 = d.partial_moment(2, -math.inf, s)
            out.append(_exact(f"E[X²1(X>s)]+E[X²1(X<=s)] (s={s:g})", t.m2_tail + below2, EX2))
            out.append(_exact(f"m2_tail closed vs quad (s={s:g})", t.m2_tail,
                              quad_partial_moment(d, 2, s, math.inf), config.QUAD_CHECK_REL_TOL))
    return out


def cmd_validate(cfg: ExperimentConfig) -> int:
    d = cfg.distribution
    p = bound_params(cfg.lam, d)
    writer = ResultWriter(cfg.out_dir)
    verdicts: list[Verdict] = []

    logger.info("🔄 검증 시작: %s, λ=%g, %d periods", d.spec(), cfg.lam, cfg.n_periods)
    fcfs = run_batch(cfg.lam, d, build_policy("fcfs", d), cfg.n_periods, cfg.seed, workers=cfg.workers)
    df = records_to_frame(fcfs)

    if math.isfinite(p.EX2):
        per_job = ratio_mean(df, "sum_sojourn", "N_B", cfg.confidence)
        verdicts.append(within_tolerance(per_job, pk_mean_sojourn(p), quantity="FCFS 평균 체류시간 vs P-K"))
    else:
        verdicts.append(not_checked("FCFS 평균 체류시간 vs P-K", math.nan, "E(X²) = ∞ 이면 P-K 평균이 없음"))

    EW, ENB = busy_period_means(p)
    heavy = not math.isfinite(p.EX2)
    verdicts.append(within_tolerance(regen_mean(df, "W", cfg.confidence, heavy), EW, quantity="E(W) = E(X)/D"))
    verdicts.append(within_tolerance(regen_mean(df, "N_B", cfg.confidence, heavy), ENB, quantity="E(N_B) = 1/D"))

    policies = [build_policy(name, d) for name in config.INVARIANCE_POLICIES]
    inv = verify_workload_invariance(cfg.lam, d, cfg.seed, policies, min(cfg.n_periods, config.INVARIANCE_PERIODS))
    verdicts.append(Verdict(
        quantity=f"작업량 불변성 ({', '.join(config.INVARIANCE_POLICIES)})",
        estimate=float(inv.n_periods), ci=0.0, bound=float(inv.n_periods),
        passed=inv.passed, margin=0.0 if inv.passed else -1.0,
        note=inv.first_divergence or "",
    ))
    if inv.first_divergence:
        logger.error("❌ %s", inv.first_divergence)

    verdicts.extend(_partition_checks(cfg))

    writer.add("validation", verdicts_to_frame(verdicts))
    writer.flush()
    code = _exit_code(verdicts)
    if code == 0:
        logger.info("✅ 검증 통과 (%d개 항목)", len(verdicts))
    return code


# ---------------- simulate ----------------

def cmd_simulate(cfg: ExperimentConfig, trace: bool = False) -> int:
    d = cfg.distribution
    spec = cfg.policy_spec
    s = cfg.s_list[0]
    heavy = not math.isfinite(d.second_moment())
    policy = build_policy(spec, d, s if spec.needs_threshold else None)
    writer = ResultWriter(cfg.out_dir)

    records = run_batch(cfg.lam, d, policy, cfg.n_periods, cfg.seed, s=s, workers=cfg.workers)
    df = records_to_frame(records)
    writer.add("records", df)

    estimates: list[Estimate] = []
    if len(df) >= 2:
        for name in ("W", "N_B", "sum_sojourn", "R"):
            estimates.append(regen_mean(df, name, cfg.confidence, heavy and name in config.HEAVY_TAIL_FIELDS))
        estimates.append(ratio_mean(df, "sum_sojourn", "N_B", cfg.confidence))
        estimates.append(event_probability(df, cfg.confidence))
    else:
        logger.warning("⚠️ busy period 1개로는 신뢰구간을 만들 수 없습니다")
    writer.add("summary", estimates_to_frame(estimates))

    if trace:
        events = []
        run_busy_period(cfg.lam, d, policy, period_rng(cfg.seed, 0), s=s, index=0, trace=events)
        writer.add("trace", trace_to_frame(events))

    writer.flush()
    return config.EXIT_CODES["ok"]


# ---------------- sweep ----------------

def cmd_sweep(cfg: ExperimentConfig) -> int:
    d = cfg.distribution
    spec = cfg.policy_spec
    if not spec.needs_threshold:
        raise ConfigError(f"sweep 은 po-lcfs 또는 trunc-switch 정책만 지원합니다: {cfg.policy}")
    p = bound_params(cfg.lam, d)
    reference = build_policy(cfg.reference_spec, d)
    writer = ResultWriter(cfg.out_dir)

    gap_rows, residual_rows, verdicts = [], [], []
    for s in cfg.s_list:
        logger.info("🔄 s=%g", s)
        policy = build_policy(spec, d, s)
        # 같은 seed → 공통 난수 (period 별 짝 비교)
        recs = records_to_frame(run_batch(cfg.lam, d, policy, cfg.n_periods, cfg.seed, s=s, workers=cfg.workers))
        ref = records_to_frame(run_batch(cfg.lam, d, reference, cfg.n_periods, cfg.seed, s=s, workers=cfg.workers))
        point = sweep_point(s, spec.kind, recs, ref, p, d, cfg.confidence)
        gap_rows.append(point.gap_row)
        residual_rows.append(point.residual_row)
        verdicts.extend(point.verdicts)

    writer.add("gap", pd.DataFrame(gap_rows, columns=GAP_COLUMNS))
    writer.add("residual", pd.DataFrame(residual_rows, columns=RESIDUAL_COLUMNS))
    writer.add("verdicts", verdicts_to_frame(verdicts))
    writer.flush()
    return _exit_code(verdicts)


# ---------------- bounds / gittins-table ----------------

def cmd_bounds(cfg: ExperimentConfig) -> int:
    d = cfg.distribution
    p = bound_params(cfg.lam, d)
    if not math.isfinite(p.EX2):
        logger.warning("⚠️ E(X²) = inf: K1, K2 와 g(s) 열은 N/A")
    writer = ResultWriter(cfg.out_dir)
    writer.add("bounds", bounds_table(p, d, cfg.s_list))
    writer.flush()
    return config.EXIT_CODES["ok"]


def cmd_gittins_table(cfg: ExperimentConfig) -> int:
    writer = ResultWriter(cfg.out_dir)
    writer.add("gittins", gittins_table_frame(build_table(cfg.distribution)))
    writer.flush()
    return config.EXIT_CODES["ok"]


# ---------------- 진입점 ----------------

def _parse_s_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"--s 는 쉼표로 구분한 숫자 목록이어야 합니다: {text}") from e


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON 설정 파일")
    common.add_argument("--lambda", dest="lam", type=float, help=f"도착률 (기본 {config.DEFAULT_LAMBDA})")
    common.add_argument("--dist", help=f"서비스 분포 (기본 {config.DEFAULT_DIST})")
    common.add_argument("--policy", help=f"정책 (기본 {config.DEFAULT_POLICY})")
    common.add_argument("--reference", help=f"sweep 기준 정책 (기본 {config.DEFAULT_REFERENCE_POLICY})")
    common.add_argument("--s", dest="s_list", type=_parse_s_list,
                        help=f"절단점 목록, 쉼표 구분 (기본 {','.join(f'{s:g}' for s in config.DEFAULT_S_LIST)})")
    common.add_argument("--n", dest="n_periods", type=int, help=f"busy period 수 (기본 {config.DEFAULT_N_PERIODS})")
    common.add_argument("--seed", type=int, help=f"난수 seed (기본 {config.DEFAULT_SEED})")
    common.add_argument("--out", dest="out_dir", help=f"출력 디렉터리 (기본 {config.DEFAULT_OUT_DIR})")
    common.add_argument("--confidence", type=float, help=f"신뢰수준 (기본 {config.DEFAULT_CONFIDENCE})")
    common.add_argument("--workers", type=int, help=f"병렬 프로세스 수 (기본 {config.DEFAULT_WORKERS})")
    common.add_argument("-v", "--verbose", action="store_true", help="DEBUG 로그")

    parser = argparse.ArgumentParser(prog="main_app", description="M/G/1 절단 스케줄링 실험")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="시뮬레이터 검증")
    sim = sub.add_parser("simulate", parents=[common], help="단일 배치 시뮬레이션")
    sim.add_argument("--trace", action="store_true", help="period 0 의 이벤트 trace.csv 저장")
    sub.add_parser("sweep", parents=[common], help="s 별 상한 검증")
    sub.add_parser("bounds", parents=[common], help="closed-form 상한 테이블")
    sub.add_parser("gittins-table", parents=[common], help="Gittins index 테이블")
    return parser


def setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


_OVERRIDE_KEYS = ("lam", "dist", "policy", "reference", "s_list", "n_periods", "seed", "out_dir",
                  "confidence", "workers")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    if not check_dependencies():
        return config.EXIT_CODES["config"]
    overrides = {k: getattr(args, k) for k in _OVERRIDE_KEYS}

    try:
        # gittins-table 은 λ 를 쓰지 않는다
        cfg = load_config(args.config, overrides, require_stable=args.command != "gittins-table")
        if args.command == "validate":
            return cmd_validate(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg, trace=args.trace)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "bounds":
            return cmd_bounds(cfg)
        return cmd_gittins_table(cfg)
    except (ConfigError, DistributionSpecError, PolicySpecError, BoundError) as e:
        logger.error("❌ 설정 오류: %s", e)
        return config.EXIT_CODES["config"]
    except InsufficientSamplesError as e:
        logger.error("❌ 표본 부족: %s", e)
        return config.EXIT_CODES["validation"]
    except SimulationError as e:
        logger.error("❌ 시뮬레이션 중단: %s", e)
        return config.EXIT_CODES["divergence"]


if __name__ == "__main__":
    sys.exit(main())
