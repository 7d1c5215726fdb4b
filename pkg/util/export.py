# -*- coding: utf-8 -*-
"""
결과 CSV 저장 모듈
- 모든 숫자는 유효숫자 12자리, 결측/정의되지 않은 값은 N/A
- 실행이 끝날 때 한 번에, 파일마다 임시 파일 + os.replace 로 원자적으로 기록
"""
from __future__ import annotations

import logging
import os
import tempfile
from pathlib import Path

import pandas as pd

import config

logger = logging.getLogger(__name__)


# --------------------------
# CSV 직렬화
# --------------------------
def frame_to_csv_text(df: pd.DataFrame) -> str:
    return df.to_csv(index=False, float_format=config.CSV_FLOAT_FORMAT, na_rep=config.CSV_NA_REP,
                     lineterminator="\n")


def write_csv_atomic(df: pd.DataFrame, path: str | os.PathLike) -> Path:
    """같은 디렉터리의 임시 파일에 쓴 뒤 교체"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(frame_to_csv_text(df))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


# --------------------------
# 실행 단위 결과 모음
# --------------------------
class ResultWriter:
    """실행 중 만든 테이블을 모아 두었다가 flush() 에서 한꺼번에 기록"""

    def __init__(self, out_dir: str | os.PathLike):
        self.out_dir = Path(out_dir)
        self._pending: dict[str, pd.DataFrame] = {}

    def add(self, key: str, df: pd.DataFrame) -> None:
        if key not in config.OUTPUT_FILES:
            raise KeyError(f"알 수 없는 출력 '{key}' (지원: {', '.join(config.OUTPUT_FILES)})")
        self._pending[key] = df

    def flush(self) -> list[Path]:
        written = []
        for key, df in self._pending.items():
            path = write_csv_atomic(df, self.out_dir / config.OUTPUT_FILES[key])
            logger.info("📊 %s 저장 (%d행)", path, len(df))
            written.append(path)
        self._pending.clear()
        return written


def check_dependencies() -> bool:
    """필요한 패키지들이 설치되어 있는지 체크"""
    missing = []
    for name in ("numpy", "scipy", "pandas"):
        try:
            __import__(name)
        except ImportError:
            missing.append(name)

    if missing:
        logger.error("❌ 다음 패키지를 설치하세요: %s", " ".join(missing))
        return False
    return True
