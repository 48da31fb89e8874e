"""
image 命令：逐颜色通道独立恢复自然图像

二进制 PGM (P5) / PPM (P6)，maxval <= 255
"""
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from config import get_logger, log_execution
from core.errors import FormatError, NumericalError, ParameterError
from core.types import Estimate
from .experiment import ExperimentConfig, build_channel, build_instance
from .output import output_path, write_csv
from .sweep import run_method

logger = get_logger(__name__)

IMAGE_COLUMNS = ["channel", "method", "overlap", "mse", "pixel_mse", "status"]


def _tokens(data: bytes, count: int) -> Tuple[List[bytes], int]:
    """读取头部的 count 个字段，跳过 # 注释，返回 (字段, 像素数据起点)"""
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise FormatError("PNM 头部不完整")
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    # 头部后恰好一个空白字符
    return tokens, pos + 1


def read_pnm(path: Union[str, Path]) -> np.ndarray:
    """返回 (H, W) 或 (H, W, 3) 的 uint8 数组"""
    data = Path(path).read_bytes()
    tokens, offset = _tokens(data, 4)
    magic = tokens[0]
    if magic not in (b"P5", b"P6"):
        raise FormatError(f"只支持二进制 P5/P6，当前为 {magic!r}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as e:
        raise FormatError(f"PNM 头部字段非整数: {tokens[1:]}") from e
    if width < 1 or height < 1 or not 0 < maxval <= 255:
        raise FormatError(f"非法 PNM 尺寸或 maxval: {width}x{height}, maxval={maxval}")
    channels = 3 if magic == b"P6" else 1
    size = width * height * channels
    if len(data) - offset < size:
        raise FormatError(f"像素数据不足: 需要 {size} 字节，实际 {len(data) - offset}")
    pixels = np.frombuffer(data, dtype=np.uint8, count=size, offset=offset)
    shape = (height, width, 3) if channels == 3 else (height, width)
    return pixels.reshape(shape).copy()


def write_pnm(path: Union[str, Path], image: np.ndarray) -> Path:
    image = np.asarray(image)
    if image.ndim == 2:
        magic = b"P5"
    elif image.ndim == 3 and image.shape[2] == 3:
        magic = b"P6"
    else:
        raise ParameterError(f"图像形状必须为 (H, W) 或 (H, W, 3)，当前为 {image.shape}")
    height, width = image.shape[:2]
    pixels = np.clip(np.rint(image), 0, 255).astype(np.uint8)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(magic + f"\n{width} {height}\n255\n".encode("ascii") + pixels.tobytes())
    return path


def synthetic_image(height: int, width: int, color: bool = True) -> np.ndarray:
    """确定性的测试图：渐变、圆盘与条纹"""
    yy, xx = np.mgrid[0:height, 0:width].astype(float)
    u, v = xx / max(width - 1, 1), yy / max(height - 1, 1)
    disc = ((u - 0.6) ** 2 + (v - 0.4) ** 2 < 0.06).astype(float)
    stripes = 0.5 + 0.5 * np.sin(2 * np.pi * 4 * u)
    red = 255 * (0.6 * u + 0.4 * disc)
    green = 255 * (0.5 * v + 0.5 * stripes * (1 - disc))
    blue = 255 * (0.3 + 0.7 * (1 - u) * v)
    if not color:
        return np.clip(0.299 * red + 0.587 * green + 0.114 * blue, 0, 255)
    return np.clip(np.stack([red, green, blue], axis=2), 0, 255)


def downscale(image: np.ndarray, factor: int) -> np.ndarray:
    """factor x factor 块平均，多余的边缘像素丢弃"""
    if factor < 1:
        raise ParameterError(f"缩小倍数必须为正整数，当前为{factor}")
    if factor == 1:
        return image.astype(float)
    height = image.shape[0] // factor * factor
    width = image.shape[1] // factor * factor
    cropped = image[:height, :width].astype(float)
    shape = (height // factor, factor, width // factor, factor) + cropped.shape[2:]
    return cropped.reshape(shape).mean(axis=(1, 3))


def _aligned_real(estimate: Estimate, x_star: np.ndarray) -> np.ndarray:
    """消去全局相位（实数域为符号）后取实部"""
    cross = np.vdot(estimate.x_hat, x_star)
    phase = cross / abs(cross) if abs(cross) > 0 else 1.0
    return np.real(phase * estimate.x_hat)


def recover_channel(config: ExperimentConfig, pixels: np.ndarray, channel_index: int,
                    alpha: float) -> Tuple[Dict[str, np.ndarray], List[dict]]:
    """中心化并缩放到方差 rho 后作为 x*，恢复后用保存的偏移与尺度还原像素"""
    flat = pixels.reshape(-1).astype(float)
    offset, scale = float(flat.mean()), float(flat.std())
    recovered: Dict[str, np.ndarray] = {}
    rows = []
    if scale == 0.0:
        for method in config.methods:
            recovered[method] = np.full(flat.shape, offset)
            rows.append({"channel": channel_index, "method": method, "overlap": float("nan"),
                         "mse": 0.0, "pixel_mse": 0.0, "status": "constant"})
        return recovered, rows

    x_star = (flat - offset) / scale * np.sqrt(config.rho)
    channel = build_channel(config)
    instance = build_instance(config, channel, channel_index, alpha, 0,
                              x_star=x_star, n=flat.shape[0])
    cache: Dict[str, Estimate] = {}
    for method in config.methods:
        try:
            estimate = run_method(config, method, instance, channel, cache)
        except (ParameterError, NumericalError) as e:
            logger.warning(f"通道 {channel_index}, {method}: {e}")
            recovered[method] = np.full(flat.shape, offset)
            rows.append({"channel": channel_index, "method": method, "overlap": float("nan"),
                         "mse": float("nan"), "pixel_mse": float("nan"), "status": type(e).__name__})
            continue
        values = _aligned_real(estimate, instance.x_star) / np.sqrt(config.rho) * scale + offset
        recovered[method] = values
        rows.append({"channel": channel_index, "method": method, "overlap": estimate.overlap,
                     "mse": estimate.mse, "pixel_mse": float(np.mean((values - flat) ** 2)), "status": "ok"})
    return recovered, rows


@log_execution(logger)
def run_image(config: ExperimentConfig, image_path: Optional[Union[str, Path]] = None,
              alpha: Optional[float] = None) -> pd.DataFrame:
    spec = config.image
    path = image_path or spec.path
    if path is not None:
        image = read_pnm(path)
    else:
        height, width = spec.size
        image = synthetic_image(height, width, spec.color)
    image = downscale(image, spec.downscale)
    alpha = alpha if alpha is not None else config.alpha_grid()[0]

    planes = [image] if image.ndim == 2 else [image[:, :, c] for c in range(image.shape[2])]
    logger.info(f"image: {image.shape}, alpha={alpha}, 方法 {config.methods}")
    outputs: Dict[str, List[np.ndarray]] = {method: [] for method in config.methods}
    rows = []
    for c, plane in enumerate(planes):
        recovered, channel_rows = recover_channel(config, plane, c, alpha)
        rows.extend(channel_rows)
        for method, values in recovered.items():
            outputs[method].append(values.reshape(plane.shape))

    suffix = ".pgm" if image.ndim == 2 else ".ppm"
    for method, channels in outputs.items():
        assembled = channels[0] if image.ndim == 2 else np.stack(channels, axis=2)
        write_pnm(output_path(config.output, f"_{method}{suffix}"), assembled)
    return write_csv(rows, output_path(config.output, "_image.csv"), IMAGE_COLUMNS)
