"""
一维两场模型
能量 ∫ μe|u′−p|² + μmicro|p|² + (μLc²/2)|p′|² dx，x ∈ [0, 1]，u 两端给定。
均匀网格上的二阶中心差分，写成守恒形式：
    单元通量  σ_{i+½} = 2μe((u_{i+1} − u_i)/h − (p_i + p_{i+1})/2)
    u 方程    σ_{i+½} − σ_{i−½} = 0
    p 方程    −(σ_{i−½} + σ_{i+½})/2 + 2μmicro p_i − μLc²(p_{i−1} − 2p_i + p_{i+1})/h² = 0
free 边界取 p′ = 0（镜像虚节点），clamped 边界取 p = 0。
未知量按节点交错排列 (u0, p0, u1, p1, ...)。
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import List, Sequence, Tuple

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from core.errors import InvalidParameterError, SingularInputError
from utils.logger import get_logger

logger = get_logger(__name__)

MIN_CELLS = 8


class PBoundary(Enum):
    FREE = "free"
    CLAMPED = "clamped"


@dataclass(frozen=True)
class OneDProblem:
    mu_e: float
    mu_micro: float
    mu: float = 1.0
    Lc: float = 0.0
    n_cells: int = 2000
    u_left: float = 0.0
    u_right: float = 1.0
    p_boundary: PBoundary = PBoundary.FREE

    def __post_init__(self):
        object.__setattr__(self, "p_boundary", PBoundary(self.p_boundary))
        for name in ("mu_e", "mu_micro", "mu"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} 必须为正: {getattr(self, name)}")
        if not self.Lc >= 0:
            raise InvalidParameterError(f"Lc 不能为负: {self.Lc}")
        if int(self.n_cells) != self.n_cells or self.n_cells < MIN_CELLS:
            raise InvalidParameterError(f"n_cells 必须为不小于 {MIN_CELLS} 的整数: {self.n_cells}")

    @property
    def harmonic_modulus(self) -> float:
        return self.mu_e * self.mu_micro / (self.mu_e + self.mu_micro)


@dataclass(frozen=True, eq=False)
class OneDSolution:
    grid: np.ndarray
    u: np.ndarray
    p: np.ndarray
    effective_modulus: float
    cell_flux: np.ndarray
    residual: float


def _cell_flux(prob: OneDProblem, grid: np.ndarray, u: np.ndarray, p: np.ndarray) -> np.ndarray:
    """σ = 2μe(u′ − p̄)，p̄ 为单元平均"""
    h = np.diff(grid)
    return 2.0 * prob.mu_e * (np.diff(u) / h - 0.5 * (p[:-1] + p[1:]))


def _effective_modulus(prob: OneDProblem, flux_at_left: float) -> float:
    jump = prob.u_right - prob.u_left
    if jump == 0.0:
        raise InvalidParameterError("u_right == u_left，无法定义等效模量")
    return flux_at_left / (2.0 * jump)


def _assemble(prob: OneDProblem) -> scipy.sparse.csr_matrix:
    """
    差分格式的对称形式：E = ½ xᵀ H x
    p 行乘以 h、端点行乘以 ½ 后即为模块说明中的差分方程，H 的驻值条件与差分格式逐行一致。
    μe 项按单元中点取值，μmicro 项按节点取值（梯形权重）。
    """
    n = prob.n_cells
    h = 1.0 / n
    stiff = np.array([[1.0, -1.0], [-1.0, 1.0]]) / h
    midpoint = np.full((2, 2), 0.25 * h)
    nodal = np.eye(2) * 0.5 * h
    cross = np.array([[0.5, 0.5], [-0.5, -0.5]])

    local = np.zeros((4, 4))
    u_idx, p_idx = [0, 2], [1, 3]
    local[np.ix_(u_idx, u_idx)] = 2.0 * prob.mu_e * stiff
    local[np.ix_(u_idx, p_idx)] = 2.0 * prob.mu_e * cross
    local[np.ix_(p_idx, u_idx)] = 2.0 * prob.mu_e * cross.T
    local[np.ix_(p_idx, p_idx)] = (
        2.0 * prob.mu_e * midpoint + 2.0 * prob.mu_micro * nodal + prob.mu * prob.Lc ** 2 * stiff
    )

    cells = np.arange(n)
    # 单元自由度 (u_i, p_i, u_{i+1}, p_{i+1})
    dofs = np.stack([2 * cells, 2 * cells + 1, 2 * cells + 2, 2 * cells + 3], axis=1)
    rows = np.repeat(dofs, 4, axis=1).ravel()
    cols = np.tile(dofs, (1, 4)).ravel()
    data = np.tile(local.ravel(), n)
    size = 2 * (n + 1)
    return scipy.sparse.coo_matrix((data, (rows, cols)), shape=(size, size)).tocsr()


def solve_mindlin_1d(prob: OneDProblem) -> OneDSolution:
    n = prob.n_cells
    H = _assemble(prob)
    size = 2 * (n + 1)

    fixed = {0: prob.u_left, 2 * n: prob.u_right}
    clamped = prob.p_boundary is PBoundary.CLAMPED and prob.Lc > 0
    if prob.p_boundary is PBoundary.CLAMPED and prob.Lc == 0:
        logger.debug("Lc = 0 时 p 无边界迹，忽略 clamped 条件")
    if clamped:
        fixed.update({1: 0.0, 2 * n + 1: 0.0})

    fixed_idx = np.array(sorted(fixed))
    free_idx = np.setdiff1d(np.arange(size), fixed_idx)
    x = np.zeros(size)
    x[fixed_idx] = [fixed[i] for i in fixed_idx]

    H_ff = H[free_idx][:, free_idx]
    rhs = -(H[free_idx][:, fixed_idx] @ x[fixed_idx])

    # 对称对角缩放，u 与 p 方程量级相差 1/h²
    scale = 1.0 / np.sqrt(H_ff.diagonal())
    S = scipy.sparse.diags(scale)
    y = scipy.sparse.linalg.spsolve((S @ H_ff @ S).tocsc(), scale * rhs)
    if not np.all(np.isfinite(y)):
        raise SingularInputError("一维离散系统奇异")
    x[free_idx] = scale * y

    residual = float(np.max(np.abs(H_ff @ x[free_idx] - rhs))) if free_idx.size else 0.0
    grid = np.linspace(0.0, 1.0, n + 1)
    u, p = x[0::2], x[1::2]
    flux = _cell_flux(prob, grid, u, p)
    mu_eff = _effective_modulus(prob, float(flux[0]))
    logger.debug(f"一维求解: n={n}, Lc={prob.Lc}, p 边界={prob.p_boundary.value}, μeff={mu_eff:.12g}")
    return OneDSolution(grid=grid, u=u, p=p, effective_modulus=mu_eff, cell_flux=flux, residual=residual)


def solve_relaxed_1d(mu_e: float, mu_micro: float, u_left: float = 0.0, u_right: float = 1.0,
                     n_cells: int = 2000) -> OneDSolution:
    """无曲率项的闭式解：u 线性，p = μe/(μe+μmicro)·u′"""
    prob = OneDProblem(mu_e=mu_e, mu_micro=mu_micro, n_cells=n_cells, u_left=u_left, u_right=u_right)
    grid = np.linspace(0.0, 1.0, n_cells + 1)
    slope = u_right - u_left
    u = u_left + slope * grid
    u[-1] = u_right
    p = np.full_like(grid, mu_e / (mu_e + mu_micro) * slope)
    flux = _cell_flux(prob, grid, u, p)
    return OneDSolution(
        grid=grid,
        u=u,
        p=p,
        effective_modulus=prob.harmonic_modulus,
        cell_flux=flux,
        residual=0.0,
    )


def clamped_effective_modulus(prob: OneDProblem) -> float:
    """
    p 两端固定为零时的闭式等效模量
    1/μeff = 1/μe + (1/μmicro)(1 − (2/β)·tanh(β/2))，β² = 2μmicro/(μLc²)
    """
    if prob.Lc == 0:
        return prob.harmonic_modulus
    beta = math.sqrt(2.0 * prob.mu_micro / (prob.mu * prob.Lc ** 2))
    t = 2.0 / beta * math.tanh(beta / 2.0)
    return 1.0 / (1.0 / prob.mu_e + (1.0 - t) / prob.mu_micro)


def discrete_energy(prob: OneDProblem, u: np.ndarray, p: np.ndarray) -> float:
    """离散场 (u, p) 的总能量（中点/梯形求积）"""
    x = np.empty(2 * (prob.n_cells + 1))
    x[0::2] = u
    x[1::2] = p
    return float(0.5 * x @ (_assemble(prob) @ x))


def lc_sweep(template: OneDProblem, lc_values: Sequence[float], max_workers: int = 4) -> List[Tuple[float, float]]:
    """对每个 Lc 求解，返回 [(Lc, μeff)]，顺序与输入一致"""
    for lc in lc_values:
        if not lc >= 0:
            raise InvalidParameterError(f"Lc 不能为负: {lc}")

    def solve_one(lc: float) -> Tuple[float, float]:
        return float(lc), solve_mindlin_1d(replace(template, Lc=float(lc))).effective_modulus

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        return list(executor.map(solve_one, lc_values))
