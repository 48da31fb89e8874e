"""
统一日志配置系统
"""
import logging
import sys
import time
from functools import wraps
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional

from .settings import get_logging_config


def setup_logging(
    level: Optional[str] = None,
    log_file: Optional[str] = None,
    format_str: Optional[str] = None
) -> logging.Logger:
    """
    设置应用日志系统

    Args:
        level: 日志级别 (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: 日志文件路径，给定时强制写文件
        format_str: 日志格式字符串

    Returns:
        配置好的根Logger
    """
    config = get_logging_config()

    if level is None:
        level = config.level
    if format_str is None:
        format_str = config.format
    write_file = config.file or log_file is not None
    if log_file is None:
        log_file = config.file_path

    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, level.upper()))
    root_logger.handlers.clear()

    formatter = logging.Formatter(format_str)

    # Console Handler, 输出到 stderr 以免污染 CSV/报告 的 stdout
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(getattr(logging, level.upper()))
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    # File Handler (带轮转)
    if write_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            filename=log_file,
            maxBytes=config.max_bytes,
            backupCount=config.backup_count,
            encoding='utf-8'
        )
        file_handler.setLevel(getattr(logging, level.upper()))
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)

    return root_logger


def get_logger(name: str) -> logging.Logger:
    """
    获取指定名称的Logger

    Args:
        name: Logger名称，通常使用 __name__
    """
    return logging.getLogger(name)


def log_execution(logger: Optional[logging.Logger] = None):
    """
    装饰器：记录实验命令的耗时，异常时记录错误后重新抛出

    Args:
        logger: 使用的Logger，如果为None则使用函数模块的Logger
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            func_logger = logger or logging.getLogger(func.__module__)
            func_name = func.__name__

            start_time = time.perf_counter()
            func_logger.debug(f"[{func_name}] 开始执行")

            try:
                result = func(*args, **kwargs)
                elapsed = (time.perf_counter() - start_time) * 1000
                func_logger.info(f"[{func_name}] 完成，耗时: {elapsed:.2f}ms")
                return result
            except Exception as e:
                elapsed = (time.perf_counter() - start_time) * 1000
                func_logger.error(f"[{func_name}] 失败，耗时: {elapsed:.2f}ms, {type(e).__name__}: {e}")
                raise

        return wrapper
    return decorator
