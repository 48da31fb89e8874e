"""
确定性随机数流：每个任务由 (seed, 流编号) 派生独立的 Generator
"""
import numpy as np

# 固定的流编号，保证同一 seed 下各部件互不干扰
STREAM_SIGNAL = 0
STREAM_OPERATOR = 1
STREAM_CHANNEL = 2
STREAM_SOLVER = 3
STREAM_PROBE = 4


def make_rng(seed: int, stream: int = 0, *extra: int) -> np.random.Generator:
    """返回 (seed, stream, *extra) 对应的独立随机数发生器"""
    seq = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(int(stream),) + tuple(int(e) for e in extra))
    return np.random.default_rng(seq)


def task_seed(seed: int, *indices: int) -> int:
    """为子任务（alpha 点、trial 编号等）派生 64 位种子"""
    seq = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=tuple(int(i) for i in indices))
    return int(seq.generate_state(1, dtype=np.uint64)[0])
