"""
平面波色散
将动力学方程在 u = û·exp(i(k·x − ωt))、P = P̂·exp(i(k·x − ωt)) 下化为
ω²·M·q = K(k)·q，q = (ŵ, vec P̂)，ŵ = iû，使 K 为实对称 12x12 矩阵。
仅支持各向同性材料。
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence

import numpy as np
import scipy.linalg

from core.anisotropy import SymmetryClass, class_parameters, classify_coupling, classify_stiffness
from core.errors import (
    EigenSolverError,
    InsufficientSamplesError,
    InvalidParameterError,
    UnsupportedMaterialError,
)
from core.homogenize import macro_from_micro_e
from core.material import InertiaSpec, RelaxedMaterial
from core.tensor_core import (
    axial_matrix,
    mapping_matrix,
    skew_projector9,
    sym_projector9,
)
from utils.logger import get_logger

logger = get_logger(__name__)

STATE_DIM = 12
N_ACOUSTIC = 3
NEGATIVE_EIG_TOL = 1e-10


class AcousticSpeeds(NamedTuple):
    cp: float
    cs: float


@dataclass(frozen=True, eq=False)
class PlaneWaveProblem:
    k: np.ndarray
    mass_matrix: np.ndarray
    stiffness_matrix: np.ndarray

    def solve(self) -> np.ndarray:
        """返回升序排列的 12 个 ω ≥ 0"""
        try:
            w2 = scipy.linalg.eigh(self.stiffness_matrix, self.mass_matrix, eigvals_only=True)
        except (np.linalg.LinAlgError, ValueError) as e:
            raise EigenSolverError(f"广义特征值求解失败 (k={self.k.tolist()}): {e}", float(np.linalg.norm(self.k))) from e
        scale = max(1.0, float(np.max(np.abs(w2))))
        if w2[0] < -NEGATIVE_EIG_TOL * scale:
            raise EigenSolverError(
                f"出现负的 ω² = {w2[0]:.6g} (k={self.k.tolist()})，材料不满足正定性",
                float(np.linalg.norm(self.k)),
            )
        return np.sqrt(np.clip(w2, 0.0, None))


@dataclass(frozen=True, eq=False)
class DispersionBranch:
    k_values: np.ndarray
    omega_values: np.ndarray
    branch_index: int


def _cross_matrix(k: np.ndarray) -> np.ndarray:
    return np.array([
        [0.0, -k[2], k[1]],
        [k[2], 0.0, -k[0]],
        [-k[1], k[0], 0.0],
    ])


def require_isotropic(material: RelaxedMaterial) -> None:
    """色散仅对各向同性材料实现"""
    problems = []
    if classify_stiffness(material.Ce) is not SymmetryClass.ISOTROPIC:
        problems.append("Ce")
    if classify_stiffness(material.Cmicro) is not SymmetryClass.ISOTROPIC:
        problems.append("Cmicro")
    if classify_stiffness(material.curv_e) is not SymmetryClass.ISOTROPIC:
        problems.append("curv_e")
    for name in ("Cc", "curv_c"):
        C = getattr(material, name)
        if np.any(C.entries) and classify_coupling(C) is not SymmetryClass.ISOTROPIC:
            problems.append(name)
    if problems:
        raise UnsupportedMaterialError(f"平面波色散仅支持各向同性材料，以下张量不是各向同性: {problems}")


def _resolve_inertia(material: RelaxedMaterial, inertia: Optional[InertiaSpec]) -> InertiaSpec:
    inertia = inertia or material.inertia
    if inertia is None:
        raise InvalidParameterError("色散计算需要惯性参数 (rho, Lc_hat, eta1..3)")
    if not inertia.Lc_hat > 0:
        raise InvalidParameterError("色散计算要求 Lc_hat > 0，否则质量矩阵奇异")
    return inertia


def mass_matrix(inertia: InertiaSpec) -> np.ndarray:
    """blkdiag(ρ·1₃, ρL̂c²·(η1 P_devsym + η2 P_skew + η3 vec(1)vec(1)ᵀ))"""
    vec_eye = np.eye(3).reshape(9)
    spherical = np.outer(vec_eye, vec_eye)
    dev_sym = sym_projector9() - spherical / 3.0
    J = inertia.eta1 * dev_sym + inertia.eta2 * skew_projector9() + inertia.eta3 * spherical
    mass = np.zeros((STATE_DIM, STATE_DIM))
    mass[:3, :3] = inertia.rho * np.eye(3)
    mass[3:, 3:] = inertia.rho * inertia.Lc_hat ** 2 * J
    return mass


def stiffness_matrix(material: RelaxedMaterial, k: np.ndarray) -> np.ndarray:
    """能量二次型 ½qᵀKq 的矩阵，q = (ŵ, vec P̂)"""
    conv = material.convention
    M = mapping_matrix(conv)
    Ax = axial_matrix()

    # vec(∇u − P) = G q，vec(∇u) = ŵ ⊗ k
    G = np.hstack([np.kron(np.eye(3), k.reshape(3, 1)), -np.eye(9)])
    select_P = np.hstack([np.zeros((9, 3)), np.eye(9)])
    # Curl P 逐行作用 k × P̂_i
    curl = np.kron(np.eye(3), _cross_matrix(k)) @ select_P

    elastic = M @ G
    coupling = Ax @ G
    micro = M @ select_P
    curv_sym = M @ curl
    curv_skew = Ax @ curl

    K = (
        elastic.T @ material.Ce.entries @ elastic
        + micro.T @ material.Cmicro.entries @ micro
        + coupling.T @ material.Cc.entries @ coupling
        + material.mu * material.Lc ** 2 * (
            curv_sym.T @ material.curv_e.entries @ curv_sym
            + curv_skew.T @ material.curv_c.entries @ curv_skew
        )
    )
    return 0.5 * (K + K.T)


def assemble_plane_wave(material: RelaxedMaterial, inertia: Optional[InertiaSpec], k) -> PlaneWaveProblem:
    material.validate()
    require_isotropic(material)
    inertia = _resolve_inertia(material, inertia)
    k = np.asarray(k, dtype=float).reshape(3)
    return PlaneWaveProblem(k=k, mass_matrix=mass_matrix(inertia), stiffness_matrix=stiffness_matrix(material, k))


def _unit_direction(direction) -> np.ndarray:
    d = np.asarray(direction, dtype=float).reshape(3)
    norm = float(np.linalg.norm(d))
    if norm == 0.0 or not math.isfinite(norm):
        raise InvalidParameterError(f"传播方向无效: {d.tolist()}")
    if abs(norm - 1.0) > 1e-12:
        logger.warning(f"传播方向不是单位向量 (|d|={norm:.6g})，已归一化")
    return d / norm


def cutoff_frequencies(material: RelaxedMaterial, inertia: Optional[InertiaSpec] = None) -> np.ndarray:
    """k = 0 处的 12 个 ω"""
    return assemble_plane_wave(material, inertia, np.zeros(3)).solve()


def dispersion_sweep(material: RelaxedMaterial, inertia: Optional[InertiaSpec], direction,
                     k_max: float, n_points: int, max_workers: int = 4) -> List[DispersionBranch]:
    """k = linspace(0, k_max, n_points) 上逐点求解，按 ω 升序串联成 12 条分支"""
    if n_points < 2:
        raise InvalidParameterError(f"n_points 至少为 2: {n_points}")
    if not k_max > 0:
        raise InvalidParameterError(f"k_max 必须为正: {k_max}")
    material.validate()
    require_isotropic(material)
    inertia = _resolve_inertia(material, inertia)
    d = _unit_direction(direction)
    mass = mass_matrix(inertia)
    k_values = np.linspace(0.0, k_max, n_points)

    def solve_at(k_scalar: float) -> np.ndarray:
        k = k_scalar * d
        return PlaneWaveProblem(k=k, mass_matrix=mass, stiffness_matrix=stiffness_matrix(material, k)).solve()

    logger.debug(f"色散扫描: {n_points} 个波数点, k_max={k_max}, 方向 {d.tolist()}")
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        omegas = np.vstack(list(executor.map(solve_at, k_values)))

    k_values.setflags(write=False)
    branches = []
    for b in range(STATE_DIM):
        column = omegas[:, b].copy()
        column.setflags(write=False)
        branches.append(DispersionBranch(k_values=k_values, omega_values=column, branch_index=b))
    return branches


def acoustic_slopes(branches: Sequence[DispersionBranch], k_window: float) -> AcousticSpeeds:
    """三条声学分支在 (0, k_window] 上过原点的最小二乘斜率：cs 取两条剪切分支均值，cp 取最大者"""
    acoustic = sorted(branches, key=lambda b: b.branch_index)[:N_ACOUSTIC]
    if len(acoustic) < N_ACOUSTIC:
        raise InsufficientSamplesError(f"需要至少 {N_ACOUSTIC} 条分支，实际 {len(acoustic)} 条")

    slopes = []
    for branch in acoustic:
        k = np.asarray(branch.k_values, dtype=float)
        omega = np.asarray(branch.omega_values, dtype=float)
        mask = (k > 0.0) & (k <= k_window)
        if np.count_nonzero(mask) < 2:
            raise InsufficientSamplesError(
                f"(0, {k_window}] 内的小波数样本不足: {np.count_nonzero(mask)} 个，至少需要 2 个"
            )
        ks, ws = k[mask], omega[mask]
        slopes.append(float(ks @ ws / (ks @ ks)))

    slopes.sort()
    return AcousticSpeeds(cp=slopes[2], cs=0.5 * (slopes[0] + slopes[1]))


def long_wavelength_speeds(material: RelaxedMaterial, inertia: Optional[InertiaSpec] = None) -> AcousticSpeeds:
    """经均质化得到的宏观波速：cp = √((λ+2μ)/ρ)，cs = √(μ/ρ)"""
    material.validate()
    require_isotropic(material)
    inertia = inertia or material.inertia
    if inertia is None:
        raise InvalidParameterError("宏观波速需要密度 rho")
    rho = inertia.rho
    macro = macro_from_micro_e(material.Cmicro, material.Ce).macro
    params = class_parameters(macro, SymmetryClass.ISOTROPIC)
    lam, mu = params["lambda"], params["mu"]
    return AcousticSpeeds(cp=math.sqrt((lam + 2.0 * mu) / rho), cs=math.sqrt(mu / rho))
