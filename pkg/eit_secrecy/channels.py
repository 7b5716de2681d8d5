# channels.py
"""
实验中用到的窃听信道构造器：BSWC 与量化 AWGN 窃听信道。
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from eit_secrecy.core.errors import ConstructionError, DimensionError, DomainError
from eit_secrecy.probability import Pmf, TransitionMatrix, entropy, mutual_information, output_marginal, to_units

BIN_FLOOR = 1e-15
TAIL_SIGMAS = 3.0


@dataclass(frozen=True)
class WiretapChannel:
    """参考输入 P_X、Bob 的信道 P_{Y|X} 和 Eve 的信道 P_{Z|X}。"""

    px: Pmf
    bob: TransitionMatrix
    eve: TransitionMatrix

    def __post_init__(self):
        if self.bob.n_inputs != self.px.size or self.eve.n_inputs != self.px.size:
            raise DimensionError(
                f"|X|={self.px.size} but bob has {self.bob.n_inputs} inputs and eve has {self.eve.n_inputs}"
            )
        if not self.px.is_strictly_interior():
            raise DomainError(f"reference input must be strictly interior (min {self.px.min_prob:.3e})")
        for label, leg in (("P_Y", self.bob), ("P_Z", self.eve)):
            marginal = output_marginal(leg, self.px)
            if not marginal.is_strictly_interior():
                raise DomainError(f"induced {label} has a zero entry (min {marginal.min_prob:.3e})")

    @property
    def nx(self) -> int:
        return self.px.size

    @property
    def ny(self) -> int:
        return self.bob.n_outputs

    @property
    def nz(self) -> int:
        return self.eve.n_outputs

    @property
    def py(self) -> Pmf:
        return output_marginal(self.bob, self.px)

    @property
    def pz(self) -> Pmf:
        return output_marginal(self.eve, self.px)


def _check_crossover(value: float, label: str = "crossover") -> float:
    if not (0.0 <= value <= 1.0):
        raise DomainError(f"{label} probability must lie in [0, 1], got {value!r}")
    return float(value)


def bsc(crossover: float) -> TransitionMatrix:
    c = _check_crossover(crossover)
    return TransitionMatrix(np.array([[1.0 - c, c], [c, 1.0 - c]]))


def bswc(p_bob: float, q_eve: float, px: Pmf | None = None) -> WiretapChannel:
    """二元对称窃听信道，默认均匀输入。"""
    if px is None:
        px = Pmf.uniform(2)
    if px.size != 2:
        raise DimensionError(f"BSWC needs a binary input distribution, got {px.size} symbols")
    return WiretapChannel(px=px, bob=bsc(p_bob), eve=bsc(q_eve))


def pam_constellation(nx: int) -> np.ndarray:
    """等间距 PAM 星座点，平均能量归一化为 1。"""
    points = 2.0 * np.arange(nx) - (nx - 1)
    return points / math.sqrt(np.mean(points**2))


def noise_sigma(nx: int, ebn0_db: float) -> float:
    """Es = 1，Eb = Es / log2(nx)，σ² = N0 / 2。"""
    ebn0 = 10.0 ** (ebn0_db / 10.0)
    return math.sqrt(1.0 / (2.0 * math.log2(nx) * ebn0))


def quantized_awgn_leg(
    points: np.ndarray,
    n_out: int,
    sigma: float,
    rng: np.random.Generator | None = None,
    jitter: float = 0.0,
) -> TransitionMatrix:
    """
    把 AWGN 输出均匀量化为 n_out 个格子，两端格子吸收尾部。
    jitter > 0 时内部格点按种子随机抖动（不超过半个格宽）。
    """
    span = float(np.max(np.abs(points))) + TAIL_SIGMAS * sigma
    edges = np.linspace(-span, span, n_out + 1)
    if jitter > 0.0 and rng is not None:
        width = edges[1] - edges[0]
        edges[1:-1] += rng.uniform(-0.5, 0.5, size=n_out - 1) * jitter * width
    edges[0], edges[-1] = -np.inf, np.inf

    cdf = ndtr((edges[:, None] - points[None, :]) / sigma)
    raw = np.diff(cdf, axis=0)

    dead = np.flatnonzero(np.all(raw < BIN_FLOOR, axis=1))
    if dead.size:
        b = int(dead[0])
        raise ConstructionError(
            f"quantizer bin {b} of {n_out} is unreachable from every input "
            f"(edges [{edges[b]:.4g}, {edges[b + 1]:.4g}], sigma={sigma:.4g}); "
            "lower the SNR or use fewer output levels"
        )
    clamped = np.maximum(raw, BIN_FLOOR)
    return TransitionMatrix(clamped / clamped.sum(axis=0, keepdims=True))


def quantized_awgn_wiretap(
    nx: int,
    ny: int,
    nz: int,
    ebn0_bob_db: float,
    ebn0_eve_db: float,
    rng_seed: int = 0,
    jitter: float = 0.0,
) -> WiretapChannel:
    """
    量化 AWGN 窃听信道，输入为均匀分布的 nx-PAM。
    默认不抖动，此时结果与种子无关。
    """
    if min(nx, ny, nz) < 2:
        raise DomainError(f"alphabet sizes must be >= 2, got nx={nx}, ny={ny}, nz={nz}")
    if not (math.isfinite(ebn0_bob_db) and math.isfinite(ebn0_eve_db)):
        raise DomainError("Eb/N0 values must be finite")
    if not (0.0 <= jitter < 1.0):
        raise DomainError(f"jitter must lie in [0, 1), got {jitter!r}")

    points = pam_constellation(nx)
    rng = np.random.default_rng(rng_seed)
    bob = quantized_awgn_leg(points, ny, noise_sigma(nx, ebn0_bob_db), rng, jitter)
    eve = quantized_awgn_leg(points, nz, noise_sigma(nx, ebn0_eve_db), rng, jitter)
    return WiretapChannel(px=Pmf.uniform(nx), bob=bob, eve=eve)


@dataclass(frozen=True)
class ChannelDraw:
    index: int
    nx: int
    ebn0_bob_db: float
    ebn0_eve_db: float
    seed: int
    channel: WiretapChannel


def awgn_family(
    count: int,
    nx_values=(3, 5, 8),
    seed: int = 0,
    jitter: float = 0.3,
    bob_range: tuple[float, float] = (4.0, 10.0),
    eve_range: tuple[float, float] = (-2.0, 4.0),
) -> list[ChannelDraw]:
    """一族带种子的量化 AWGN 信道（|Y| = |Z| = |X|），SNR 在给定区间内均匀抽取。"""
    draws = []
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(count)):
        rng = np.random.default_rng(child)
        nx = int(nx_values[i % len(nx_values)])
        bob_db = float(rng.uniform(*bob_range))
        eve_db = float(rng.uniform(*eve_range))
        channel_seed = int(child.generate_state(1)[0])
        wc = quantized_awgn_wiretap(nx, nx, nx, bob_db, eve_db, rng_seed=channel_seed, jitter=jitter)
        draws.append(ChannelDraw(i, nx, bob_db, eve_db, channel_seed, wc))
    return draws


def binary_entropy(p: float, base: float = math.e) -> float:
    return entropy(Pmf(np.array([p, 1.0 - p])), base)


def true_secrecy_capacity_bswc(p_bob: float, q_eve: float, base: float = math.e) -> float:
    """C_s = max(0, H_b(q) − H_b(p))。"""
    p = _check_crossover(p_bob, "p_bob")
    q = _check_crossover(q_eve, "q_eve")
    return max(0.0, binary_entropy(q, base) - binary_entropy(p, base))


def commutator_norm(v: np.ndarray, lam: np.ndarray) -> float:
    """‖VΛ − ΛV‖_F。"""
    return float(np.linalg.norm(v @ lam - lam @ v, ord="fro"))


def describe(wc: WiretapChannel, units: str = "nats") -> dict:
    """信道概况：字母表大小、边缘分布、精确互信息。"""
    return {
        "nx": wc.nx,
        "ny": wc.ny,
        "nz": wc.nz,
        "px": wc.px.probs.tolist(),
        "py": wc.py.probs.tolist(),
        "pz": wc.pz.probs.tolist(),
        "i_xy": to_units(mutual_information(wc.px, wc.bob), units),
        "i_xz": to_units(mutual_information(wc.px, wc.eve), units),
    }
