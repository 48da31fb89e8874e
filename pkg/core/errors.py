"""
异常体系
参数类错误继承 ValueError，数值失败继承 RuntimeError，CLI 据此映射退出码
"""
from typing import Any, Optional, Sequence


class PhaseRetrievalError(Exception):
    """所有领域异常的基类"""


class ParameterError(PhaseRetrievalError, ValueError):
    """参数非法"""


class ShapeError(ParameterError):
    """维度不满足构造条件"""


class ChannelDefinitionError(ParameterError):
    """信道密度定义不合法"""


class ConfigError(ParameterError):
    """实验配置错误"""


class FormatError(ParameterError):
    """输入文件格式错误"""


class UndefinedMetricError(ParameterError):
    """指标无定义（例如真实信号为零）"""


class NumericalError(PhaseRetrievalError, RuntimeError):
    """数值计算失败"""


class ConvergenceError(NumericalError):
    def __init__(self, message: str, residual: float = float("nan"), iterations: int = 0):
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")
        self.residual = residual
        self.iterations = iterations


class ShiftSingularityError(NumericalError):
    def __init__(self, shift: float):
        super().__init__(f"shifted operator is singular at shift={shift!r}")
        self.shift = shift


class BracketError(NumericalError):
    def __init__(self, lo: float, hi: float, g_lo: float, g_hi: float):
        super().__init__(
            f"no sign change on [{lo}, {hi}]: g(lo)={g_lo:.6g}, g(hi)={g_hi:.6g}"
        )
        self.lo, self.hi = lo, hi
        self.g_lo, self.g_hi = g_lo, g_hi


class QuadratureError(NumericalError):
    """自适应积分未收敛"""


class PoleError(NumericalError):
    """预处理函数遇到精确极点"""


class DegenerateLiftError(NumericalError):
    """LAMP 特征向量提升为零向量"""


class DivergenceError(NumericalError):
    def __init__(self, message: str, trajectory: Optional[Sequence[Any]] = None):
        super().__init__(message)
        self.trajectory = list(trajectory or [])


class SaddleError(NumericalError):
    def __init__(self, message: str, probe: Any = None):
        super().__init__(message)
        self.probe = probe


class NoRecoveryError(NumericalError):
    """信道不携带二阶信息，阈值方程无解"""
