# -*- coding: utf-8 -*-
from __future__ import annotations

from dataclasses import fields
from typing import Iterable, Sequence

import pandas as pd

RECORD_COLUMNS = [
    "index", "W", "end_time", "N_B", "sum_sojourn", "sum_truncated", "R", "M", "L",
    "event_A", "switched", "n_long",
]
TRACE_COLUMNS = ["event_time", "event_kind", "job_id", "attained"]
VERDICT_COLUMNS = ["quantity", "estimate", "ci", "bound", "verdict", "margin", "note"]


def records_to_frame(records: Iterable) -> pd.DataFrame:
    """BusyPeriodRecord 목록 → DataFrame (파생 열 WN_B, WN_B_Ac 포함)"""
    # 열 단위로 모은다
    records = list(records)
    df = pd.DataFrame(
        {c: [getattr(r, c) for r in records] for c in RECORD_COLUMNS},
        columns=RECORD_COLUMNS,
    )
    df["event_A"] = df["event_A"].astype(bool)
    df["switched"] = df["switched"].astype(bool)
    df["WN_B"] = df["W"] * df["N_B"]
    df["WN_B_Ac"] = df["WN_B"].where(~df["event_A"], 0.0)
    return df


def split_batches(df: pd.DataFrame, n_batches: int) -> list[pd.DataFrame]:
    """period 순서대로 연속된 n 개 배치로 분할"""
    if n_batches < 1:
        raise ValueError(f"n_batches 는 1 이상이어야 합니다: {n_batches}")
    size, extra = divmod(len(df), n_batches)
    out, start = [], 0
    for i in range(n_batches):
        stop = start + size + (1 if i < extra else 0)
        out.append(df.iloc[start:stop])
        start = stop
    return out


def trace_to_frame(trace: Sequence) -> pd.DataFrame:
    rows = [(e.event_time, e.kind, e.job_id, e.attained) for e in trace]
    return pd.DataFrame(rows, columns=TRACE_COLUMNS)


def estimates_to_frame(estimates: Iterable) -> pd.DataFrame:
    """Estimate 목록 → 요약 테이블"""
    rows = []
    for est in estimates:
        row = {f.name: getattr(est, f.name) for f in fields(est)}
        row["label"] = est.label
        rows.append(row)
    return pd.DataFrame(rows)


def verdicts_to_frame(verdicts: Iterable) -> pd.DataFrame:
    rows = [
        {"quantity": v.quantity, "estimate": v.estimate, "ci": v.ci,
         "bound": v.bound, "verdict": v.verdict, "margin": v.margin, "note": v.note}
        for v in verdicts
    ]
    return pd.DataFrame(rows, columns=VERDICT_COLUMNS)
