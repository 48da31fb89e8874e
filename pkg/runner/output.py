"""
CSV 输出：17 位有效数字，重复运行逐字节一致
"""
from pathlib import Path
from typing import Iterable, List, Optional, Union

import pandas as pd

from config import get_logger

logger = get_logger(__name__)

FLOAT_FORMAT = "%.17g"


def output_path(prefix: Union[str, Path], suffix: str) -> Path:
    """results/run + _sweep.csv -> results/run_sweep.csv"""
    prefix = Path(prefix)
    path = prefix.parent / f"{prefix.name}{suffix}"
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_csv(rows: Iterable[dict], path: Union[str, Path], columns: Optional[List[str]] = None) -> pd.DataFrame:
    df = pd.DataFrame(list(rows), columns=columns)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info(f"写入 {path} ({len(df)} 行)")
    return df
