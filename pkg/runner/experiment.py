"""
实验配置（单个 JSON 文档）与实例构造
"""
import json
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ValidationError, field_validator, model_validator

from channels import make_channel
from channels.base import Channel
from config import get_logger
from core.errors import ConfigError
from core.field import field_of
from core.rng import task_seed
from core.types import Instance
from ensembles import generate_instance

logger = get_logger(__name__)

METHODS = ("tap", "lamp_top", "lamp_bulk", "mm", "vamp", "gd")
ENSEMBLES = (
    "gaussian_iid", "haar_columns", "subsampled_hadamard",
    "partial_dft", "subsampled_dct", "gaussian_product",
)
REAL_ONLY = ("subsampled_hadamard", "subsampled_dct")
COMPLEX_ONLY = ("partial_dft",)


class EnsembleSpec(BaseModel):
    name: str = "gaussian_iid"
    n: int = 256
    m: Optional[int] = None
    alphas: List[float] = []
    # gaussian_product 的内维度：p 直接给出，或 gamma 乘以 n (ratio_base=n) / m (ratio_base=m)
    p: Optional[int] = None
    gamma: float = 1.0
    ratio_base: Literal["n", "m"] = "m"

    @field_validator('name')
    @classmethod
    def validate_name(cls, v):
        if v not in ENSEMBLES:
            raise ValueError(f"未知感知矩阵集合: {v}，可选 {ENSEMBLES}")
        return v

    @field_validator('n')
    @classmethod
    def validate_n(cls, v):
        if v < 1:
            raise ValueError(f"n 必须为正，当前为{v}")
        return v

    @field_validator('alphas')
    @classmethod
    def validate_alphas(cls, v):
        if any(not a > 0 for a in v):
            raise ValueError(f"alpha 必须为正: {v}")
        return v

    def dims(self, alpha: float) -> Tuple[int, int]:
        """同时给出 m 与 alpha 网格时固定 m、由 alpha 确定 n，否则固定 n"""
        if self.m is not None and self.alphas:
            return max(1, int(round(self.m / alpha))), self.m
        return self.n, max(1, int(round(alpha * self.n)))

    def params_for(self, n: int, m: int) -> Dict[str, int]:
        if self.name != "gaussian_product":
            return {}
        if self.p is not None:
            return {"p": self.p}
        base = n if self.ratio_base == "n" else m
        return {"p": max(1, int(round(self.gamma * base)))}


class ChannelSpec(BaseModel):
    name: str = "noiseless"
    params: Dict[str, float] = {}


class VampSpec(BaseModel):
    init: Literal["random", "trivial_perturbed", "from_estimate"] = "from_estimate"
    init_method: str = "tap"
    damping: Optional[float] = None
    max_iter: Optional[int] = None
    tol: Optional[float] = None


class GdSpec(BaseModel):
    init_method: str = "tap"
    step: Optional[float] = None
    backtracking: Optional[bool] = None
    max_iter: Optional[int] = None
    tol_grad: Optional[float] = None
    step_rule: Optional[Literal["fixed", "barzilai_borwein"]] = None


class ThresholdSpec(BaseModel):
    moments: Literal["analytic", "empirical"] = "analytic"
    bracket: Optional[List[float]] = None
    grid_points: Optional[int] = None


class ImageSpec(BaseModel):
    path: Optional[str] = None
    downscale: int = 1
    # 无输入文件时生成的测试图尺寸 (高, 宽)
    size: List[int] = [48, 32]
    color: bool = True


class ExperimentConfig(BaseModel):
    """一次实验的全部参数，默认值全部显式化"""
    field: Literal[1, 2] = 2
    ensemble: EnsembleSpec = EnsembleSpec()
    channel: ChannelSpec = ChannelSpec()
    rho: float = 1.0
    methods: List[str] = ["tap"]
    trials: int = 1
    seed: int = 0
    output: str = "results/run"
    threads: int = 1
    # 关闭时 runtime_ms 记为 0，sweep CSV 逐字节可复现
    record_runtime: bool = True
    vamp: VampSpec = VampSpec()
    gd: GdSpec = GdSpec()
    threshold: ThresholdSpec = ThresholdSpec()
    image: ImageSpec = ImageSpec()

    @field_validator('methods')
    @classmethod
    def validate_methods(cls, v):
        unknown = [name for name in v if name not in METHODS]
        if unknown:
            raise ValueError(f"未知方法: {unknown}，可选 {METHODS}")
        if not v:
            raise ValueError("methods 不能为空")
        return v

    @field_validator('trials', 'threads')
    @classmethod
    def validate_positive(cls, v):
        if v < 1:
            raise ValueError(f"必须为正整数，当前为{v}")
        return v

    @field_validator('rho')
    @classmethod
    def validate_rho(cls, v):
        if not v > 0:
            raise ValueError(f"rho 必须为正，当前为{v}")
        return v

    @model_validator(mode='after')
    def check_field(self):
        name = self.ensemble.name
        if name in REAL_ONLY and self.field != 1:
            raise ValueError(f"{name} 只支持实数域 (field=1)")
        if name in COMPLEX_ONLY and self.field != 2:
            raise ValueError(f"{name} 只支持复数域 (field=2)")
        for spec in (self.vamp, self.gd):
            if spec.init_method not in ("tap", "lamp_top", "lamp_bulk", "mm"):
                raise ValueError(f"初值方法必须为谱估计器，当前为{spec.init_method}")
        return self

    @property
    def field_tag(self):
        return field_of(self.field)

    def alpha_grid(self) -> List[float]:
        if self.ensemble.alphas:
            return list(self.ensemble.alphas)
        if self.ensemble.m is not None:
            return [self.ensemble.m / self.ensemble.n]
        raise ConfigError("配置缺少 alpha 网格 (ensemble.alphas) 或 ensemble.m")


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigError(f"配置文件不存在: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"配置文件不是合法 JSON: {path}: {e}") from e
    return parse_config(raw)


def parse_config(raw: dict) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"实验配置不合法: {e}") from e


def apply_overrides(config: ExperimentConfig, seed: Optional[int] = None, out: Optional[str] = None,
                    threads: Optional[int] = None, record_runtime: Optional[bool] = None) -> ExperimentConfig:
    """命令行 --seed / --out / --threads / --no-runtime 覆盖配置"""
    updates = {}
    if seed is not None:
        updates["seed"] = seed
    if out is not None:
        updates["output"] = out
    if threads is not None:
        updates["threads"] = threads
    if record_runtime is not None:
        updates["record_runtime"] = record_runtime
    return parse_config({**config.model_dump(), **updates})


def build_channel(config: ExperimentConfig) -> Channel:
    return make_channel(config.channel.name, config.field_tag, **config.channel.params)


def build_instance(config: ExperimentConfig, channel: Channel, alpha_index: int, alpha: float,
                   trial: int, x_star=None, n: Optional[int] = None) -> Instance:
    """(alpha 序号, trial) 对应的实例，种子由 config.seed 派生"""
    if n is None:
        n, m = config.ensemble.dims(alpha)
    else:
        m = max(1, int(round(alpha * n)))
    seed = task_seed(config.seed, alpha_index, trial)
    return generate_instance(
        config.field_tag, n, m, config.ensemble.name, channel, config.rho, seed,
        x_star=x_star, **config.ensemble.params_for(n, m),
    )
