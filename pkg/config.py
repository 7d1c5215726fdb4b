# -*- coding: utf-8 -*-

# ==========================
# 수치 계산 설정
# ==========================
QUAD_REL_TOL = 1e-9        # 적응형 구적법 상대 오차
QUAD_ABS_TOL = 0.0
QUAD_LIMIT = 400           # quad 세분 구간 최대 개수

# ==========================
# Gittins index 설정
# ==========================
GITTINS_N_DELTA = 64                   # delta 탐색 격자 (log 간격)
GITTINS_GRID_DIVISIONS = 512           # 절단 분포: grid_step = s / 512
GITTINS_UNTRUNCATED_QUANTILE = 0.9999  # 비절단 분포: a_max = 0.9999 분위수
GITTINS_HORIZON_QUANTILE = 0.999999    # 무한 support 의 delta 탐색 상한
GITTINS_DELTA_MIN_RATIO = 1e-7         # 최소 delta = 남은 폭 * 비율
GITTINS_ATOM_EPS = 1e-12               # atom 까지 거리가 이 이하이면 +inf 우선순위

# ==========================
# 시뮬레이션 설정
# ==========================
EVENT_CAP = 10**8             # busy period 하나의 이벤트 상한 (발산 감지)
DEFAULT_SEED = 20240601
DEFAULT_N_PERIODS = 100_000
DEFAULT_LAMBDA = 1.0
DEFAULT_DIST = "pareto:alpha=3"
DEFAULT_POLICY = "trunc-switch"
DEFAULT_S_LIST = (1.0, 2.0, 4.0, 8.0)
DEFAULT_FALLBACK_POLICY = "lcfs"   # trunc-switch 전환 후 정책
DEFAULT_INNER_POLICY = "gittins"   # po-lcfs 고우선순위 정책
DEFAULT_REFERENCE_POLICY = "fb"    # sweep 의 V* 대용 정책
DEFAULT_WORKERS = 1
INVARIANCE_POLICIES = ("fcfs", "lcfs", "fb", "gittins")
INVARIANCE_PERIODS = 1_000
END_TIME_REL_TOL = 1e-9        # 종료 시각 vs 작업량 합 (부동소수 누적 오차)

# ==========================
# 통계 추정 설정
# ==========================
DEFAULT_CONFIDENCE = 0.99
MIN_CONDITIONING_EVENTS = 100   # A^c 조건부 추정 최소 표본 수
N_BATCHES = 32
VALIDATION_REL_TOL = 0.02       # P-K / 재생 항등식 검증 허용 오차 (2%)
PARTITION_REL_TOL = 1e-9
QUAD_CHECK_REL_TOL = 1e-7      # closed form vs quad 교차 검증
HEAVY_TAIL_LABEL = "heavy-tail, indicative only"

# 분산이 무한할 수 있는 관측량 (E(X^2) = inf 이면 CLT 신뢰구간 불가)
HEAVY_TAIL_FIELDS = ("W", "N_B", "sum_sojourn", "sum_truncated", "R", "WN_B", "WN_B_Ac")

# ==========================
# 고정 상수 g(s) 곡선 (비교용)
# ==========================
# pareto(3), lambda=1 에서 식으로 계산하면 K1=88, K2=80
FIXED_K1 = 120.0
FIXED_K2 = 144.0

# ==========================
# 출력 설정
# ==========================
CSV_FLOAT_FORMAT = "%.12g"
CSV_NA_REP = "N/A"
DEFAULT_OUT_DIR = "results"

OUTPUT_FILES = {
    "validation": "validation.csv",
    "records": "records.csv",
    "summary": "summary.csv",
    "trace": "trace.csv",
    "gap": "gap.csv",
    "residual": "residual.csv",
    "verdicts": "verdicts.csv",
    "bounds": "bounds.csv",
    "gittins": "gittins_table.csv",
}

EXIT_CODES = {
    "ok": 0,
    "config": 1,
    "validation": 2,
    "divergence": 3,
}
