"""
以谱估计为初值的梯度下降细化
"""
from .gd import STEP_RULES, GdConfig, gd_gradient, gd_loss, gd_run

__all__ = [
    'STEP_RULES',
    'GdConfig',
    'gd_gradient',
    'gd_loss',
    'gd_run',
]
