# spectral.py
"""
限制在 S⊥ 上的谱结构：标准特征分解、白化后的矩阵束 (V, Λ)、以及保密局部收缩系数。
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from eit_secrecy.core.errors import DimensionError, DomainError, SingularPencilError
from eit_secrecy.eit import EitSystem

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-10
SINGULAR_TOL = 1e-12
COMMUTING_TOL = 1e-10


def restrict(m: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """basisᵀ·M·basis，结果对称化。"""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != basis.shape[0]:
        raise DimensionError(f"cannot restrict a {m.shape} matrix with a {basis.shape} basis")
    r = basis.T @ m @ basis
    return 0.5 * (r + r.T)


def sym_eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    对称矩阵的特征分解，特征值降序。
    符号约定：每个特征向量中绝对值最大的分量为正（并列时取第一个）。
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"sym_eig needs a square matrix, got shape {m.shape}")
    asym = float(np.max(np.abs(m - m.T))) if m.size else 0.0
    if asym > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(m)))):
        raise DomainError(f"matrix is not symmetric (max |M − Mᵀ| = {asym:.3e})")

    values, vectors = linalg.eigh(0.5 * (m + m.T))
    order = np.argsort(values, kind="stable")[::-1]
    values, vectors = values[order], vectors[:, order]
    lead = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[lead, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return values, vectors * signs


@dataclass(frozen=True)
class PencilSpectrum:
    """
    (V, Λ) 在 S⊥ 上的广义特征结构。

    d 降序排列；lam[j] = 1/(q_jᵀ Λ⊥⁻¹ q_j)；modes 的第 j 列是映回 |X| 空间的广义特征向量，
    满足 modesᵀ Λ modes = I。
    """

    d: np.ndarray
    lam: np.ndarray
    modes: np.ndarray
    lam_max_perp_v: float
    commuting: bool

    @property
    def d_max(self) -> float:
        return float(self.d[0])

    @property
    def n_modes(self) -> int:
        return self.d.size


def pencil_spectrum(sys: EitSystem) -> PencilSpectrum:
    """白化：Ṽ = Λ⊥^{-1/2} V⊥ Λ⊥^{-1/2}，对 Ṽ 做对称特征分解。"""
    v_perp = restrict(sys.v, sys.basis)
    l_perp = restrict(sys.lam, sys.basis)

    s, u = sym_eig(l_perp)
    if s.size == 0 or s.min() <= SINGULAR_TOL:
        raise SingularPencilError(
            f"Λ restricted to the perturbation subspace is not positive definite "
            f"(min eigenvalue {s.min() if s.size else 0.0:.3e} <= {SINGULAR_TOL}); "
            "Eve must observe every perturbation direction for the pencil to exist"
        )

    whiten = (u / np.sqrt(s)) @ u.T
    l_inv = (u / s) @ u.T
    d, q = sym_eig(whiten @ v_perp @ whiten)
    lam = 1.0 / np.einsum("ij,ik,kj->j", q, l_inv, q)
    generalized = whiten @ q

    lam_max_perp_v = float(sym_eig(v_perp)[0][0])
    commuting = sys.commutator < COMMUTING_TOL
    return PencilSpectrum(
        d=d,
        lam=lam,
        modes=sys.basis @ generalized,
        lam_max_perp_v=lam_max_perp_v,
        commuting=commuting,
    )


def eta_loc_sec(sys: EitSystem) -> float:
    """保密局部收缩系数：(V, Λ) 在 S⊥ 上的最大广义特征值。"""
    return pencil_spectrum(sys).d_max


def contraction_coefficient(b: np.ndarray) -> float:
    """单条信道的局部收缩系数 σ₂²(B)；最大奇异值 1 对应 √P_X 方向。"""
    sv = linalg.svdvals(np.asarray(b, dtype=float))
    return float(sv[1] ** 2) if sv.size > 1 else 0.0


def mode_residuals(sys: EitSystem, spec: PencilSpectrum) -> np.ndarray:
    """‖V q̃_j − d_j Λ q̃_j‖，逐模态。"""
    return np.linalg.norm(sys.v @ spec.modes - (sys.lam @ spec.modes) * spec.d, axis=0)
