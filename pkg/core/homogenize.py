"""
均质化：宏观一致性条件及其逆、各对称类闭式解、极限微变形关系
以及 Mindlin-Eringen 不可约残差。
6x6 求逆一律经对称特征分解 (spd_inverse)，结果对称性由构造保证。
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
import scipy.linalg

from core.anisotropy import check_positive_definite
from core.errors import (
    ConventionMismatchError,
    InvalidParameterError,
    MicroEqualsMacroError,
    NotPositiveDefiniteError,
    StiffnessExceedsMicroError,
)
from core.tensor_core import (
    Coupling3,
    StiffnessVoigt,
    Tensor4Full,
    as_mat3,
    skew,
    skew_projector9,
    spd_inverse,
    sym,
    sym_projector9,
    sym_to_vec,
    symmetric_eigenvalues,
    tensor4_from_voigt,
    vec_to_sym,
)
from utils.logger import get_logger

logger = get_logger(__name__)

SYMMETRY_REL_TOL = 1e-12
MICRO_MACRO_GAP_TOL = 1e-10
SMALLER_IS_STIFFER = "smaller is stiffer: Cmicro - Cmacro 必须严格正定"


@dataclass(frozen=True, eq=False)
class HomogenizationResult:
    macro: StiffnessVoigt
    symmetric_ok: bool
    spd_ok: bool
    harmonic_residual: float


@dataclass(frozen=True, eq=False)
class LimitDistortion:
    """P 为极限微变形；skew_determined 为 False 时 skew P 不由平衡方程确定，取 skew ∇u"""
    P: np.ndarray
    skew_determined: bool


def _require_spd(Cv: StiffnessVoigt, name: str) -> None:
    check = check_positive_definite(Cv.entries, "strict")
    if not check.ok:
        raise NotPositiveDefiniteError(f"{name} 不是严格正定 (最小特征值 {check.min_eig:.6g})", check.min_eig)


def _require_same_convention(A: StiffnessVoigt, B: StiffnessVoigt) -> None:
    if A.convention is not B.convention:
        raise ConventionMismatchError(
            f"记法约定不一致: {A.convention.value} 与 {B.convention.value}"
        )


def _relative_asymmetry(M: np.ndarray) -> float:
    scale = float(np.max(np.abs(M)))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(M - M.T))) / scale


# --- 一般 6x6 路径 ---

def macro_from_micro_e(Cmicro: StiffnessVoigt, Ce: StiffnessVoigt) -> HomogenizationResult:
    """C̃_macro = C̃_micro (C̃_micro + C̃_e)⁻¹ C̃_e"""
    _require_same_convention(Cmicro, Ce)
    _require_spd(Cmicro, "Cmicro")
    _require_spd(Ce, "Ce")

    Cm, Cel = Cmicro.entries, Ce.entries
    raw = Cm @ spd_inverse(Cm + Cel) @ Cel
    asymmetry = _relative_asymmetry(raw)
    macro = StiffnessVoigt(0.5 * (raw + raw.T), Cmicro.convention)

    spd_ok = check_positive_definite(macro.entries, "strict").ok
    if spd_ok:
        macro_inv = spd_inverse(macro.entries)
        gap = macro_inv - spd_inverse(Cel) - spd_inverse(Cm)
        residual = float(np.linalg.norm(gap) / np.linalg.norm(macro_inv))
    else:
        residual = float("inf")

    logger.debug(f"宏观刚度: 非对称度 {asymmetry:.3e}, 调和残差 {residual:.3e}")
    return HomogenizationResult(
        macro=macro,
        symmetric_ok=asymmetry <= SYMMETRY_REL_TOL,
        spd_ok=spd_ok,
        harmonic_residual=residual,
    )


def e_from_micro_macro(Cmicro: StiffnessVoigt, Cmacro: StiffnessVoigt) -> StiffnessVoigt:
    """C̃_e = C̃_micro (C̃_micro − C̃_macro)⁻¹ C̃_macro"""
    _require_same_convention(Cmicro, Cmacro)
    _require_spd(Cmicro, "Cmicro")
    _require_spd(Cmacro, "Cmacro")

    Cm, Cmac = Cmicro.entries, Cmacro.entries
    gap = Cm - Cmac
    w = symmetric_eigenvalues(gap)
    threshold = MICRO_MACRO_GAP_TOL * float(symmetric_eigenvalues(Cm)[-1])
    if w[0] < -threshold:
        raise StiffnessExceedsMicroError(
            f"宏观刚度超过微观刚度 (Cmicro - Cmacro 最小特征值 {w[0]:.6g}); {SMALLER_IS_STIFFER}"
        )
    if w[0] <= threshold:
        raise MicroEqualsMacroError(
            f"Cmicro 与 Cmacro 在某方向上相等 (最小特征值差 {w[0]:.3e})，等价于 Ce 趋于无穷"
        )

    Ce = Cm @ spd_inverse(gap) @ Cmac
    return StiffnessVoigt(0.5 * (Ce + Ce.T), Cmicro.convention)


def harmonic_mean(A: StiffnessVoigt, B: StiffnessVoigt) -> StiffnessVoigt:
    """[½(A⁻¹ + B⁻¹)]⁻¹"""
    _require_same_convention(A, B)
    _require_spd(A, "A")
    _require_spd(B, "B")
    H = 2.0 * spd_inverse(spd_inverse(A.entries) + spd_inverse(B.entries))
    return StiffnessVoigt(H, A.convention)


def homogenize_many(pairs: Sequence[Tuple[StiffnessVoigt, StiffnessVoigt]],
                    max_workers: int = 4) -> List[HomogenizationResult]:
    """批量计算 (Cmicro, Ce) 对的宏观刚度，结果顺序与输入一致"""
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        return list(executor.map(lambda pair: macro_from_micro_e(*pair), pairs))


# --- 闭式解 ---

def _positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise InvalidParameterError(f"{name} 必须为正: {value}")


def _scalar_macro(x_e: float, x_micro: float) -> float:
    return x_e * x_micro / (x_e + x_micro)


def _scalar_e(x_micro: float, x_macro: float, name: str) -> float:
    gap = x_micro - x_macro
    if gap < -MICRO_MACRO_GAP_TOL * x_micro:
        raise StiffnessExceedsMicroError(f"{name}: macro {x_macro} 超过 micro {x_micro}; {SMALLER_IS_STIFFER}")
    if gap <= MICRO_MACRO_GAP_TOL * x_micro:
        raise MicroEqualsMacroError(f"{name}: micro 与 macro 相等，等价于 e 模量趋于无穷")
    return x_micro * x_macro / gap


def iso_closed_form(kappa_e: float, mu_e: float, kappa_m: float, mu_m: float) -> Tuple[float, float]:
    """κ_macro = κe·κm/(κe+κm)，μ_macro = μe·μm/(μe+μm)"""
    _positive(kappa_e=kappa_e, mu_e=mu_e, kappa_m=kappa_m, mu_m=mu_m)
    return _scalar_macro(kappa_e, kappa_m), _scalar_macro(mu_e, mu_m)


def iso_inverse_form(kappa_m: float, mu_m: float, kappa_macro: float, mu_macro: float) -> Tuple[float, float]:
    _positive(kappa_m=kappa_m, mu_m=mu_m, kappa_macro=kappa_macro, mu_macro=mu_macro)
    return _scalar_e(kappa_m, kappa_macro, "kappa"), _scalar_e(mu_m, mu_macro, "mu")


def lame_closed_form(lambda_e: float, mu_e: float, lambda_m: float, mu_m: float) -> Tuple[float, float]:
    """Lamé 形式：(2μ+3λ)_macro 按体积模量关系合成，返回 (λ_macro, μ_macro)"""
    bulk_e = 2.0 * mu_e + 3.0 * lambda_e
    bulk_m = 2.0 * mu_m + 3.0 * lambda_m
    _positive(bulk_e=bulk_e, bulk_m=bulk_m, mu_e=mu_e, mu_m=mu_m)
    bulk_macro = _scalar_macro(bulk_e, bulk_m)
    mu_macro = _scalar_macro(mu_e, mu_m)
    return (bulk_macro - 2.0 * mu_macro) / 3.0, mu_macro


def cubic_closed_form(kappa_e: float, mu_e: float, mu_star_e: float,
                      kappa_m: float, mu_m: float, mu_star_m: float) -> Tuple[float, float, float]:
    _positive(kappa_e=kappa_e, mu_e=mu_e, mu_star_e=mu_star_e,
              kappa_m=kappa_m, mu_m=mu_m, mu_star_m=mu_star_m)
    return (
        _scalar_macro(kappa_e, kappa_m),
        _scalar_macro(mu_e, mu_m),
        _scalar_macro(mu_star_e, mu_star_m),
    )


def cubic_inverse_form(kappa_m: float, mu_m: float, mu_star_m: float,
                       kappa_macro: float, mu_macro: float, mu_star_macro: float) -> Tuple[float, float, float]:
    _positive(kappa_m=kappa_m, mu_m=mu_m, mu_star_m=mu_star_m,
              kappa_macro=kappa_macro, mu_macro=mu_macro, mu_star_macro=mu_star_macro)
    return (
        _scalar_e(kappa_m, kappa_macro, "kappa"),
        _scalar_e(mu_m, mu_macro, "mu"),
        _scalar_e(mu_star_m, mu_star_macro, "mu_star"),
    )


def _require_block_spd(block: np.ndarray, name: str) -> np.ndarray:
    block = np.asarray(block, dtype=float)
    if block.shape != (3, 3):
        raise InvalidParameterError(f"{name} 应为 3x3，实际为 {block.shape}")
    check = check_positive_definite(block, "strict")
    if not check.ok:
        raise NotPositiveDefiniteError(f"{name} 不是严格正定 (最小特征值 {check.min_eig:.6g})", check.min_eig)
    return 0.5 * (block + block.T)


def ortho_closed_form(Ce_block, Ce_shears: Sequence[float],
                      Cm_block, Cm_shears: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """3x3 拉伸块 C^a_e (C^a_e + C^a_micro)⁻¹ C^a_micro，剪切项逐个标量调和"""
    Ae = _require_block_spd(Ce_block, "Ce_block")
    Am = _require_block_spd(Cm_block, "Cm_block")
    se = np.asarray(Ce_shears, dtype=float)
    sm = np.asarray(Cm_shears, dtype=float)
    if se.shape != (3,) or sm.shape != (3,) or np.any(se <= 0) or np.any(sm <= 0):
        raise InvalidParameterError("剪切常数应为 3 个正数")
    block = Ae @ spd_inverse(Ae + Am) @ Am
    return 0.5 * (block + block.T), se * sm / (se + sm)


def ortho_inverse_form(Cm_block, Cm_shears: Sequence[float],
                       Cmacro_block, Cmacro_shears: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    Am = _require_block_spd(Cm_block, "Cm_block")
    Amac = _require_block_spd(Cmacro_block, "Cmacro_block")
    gap = Am - Amac
    w = symmetric_eigenvalues(gap)
    threshold = MICRO_MACRO_GAP_TOL * float(symmetric_eigenvalues(Am)[-1])
    if w[0] < -threshold:
        raise StiffnessExceedsMicroError(f"拉伸块: {SMALLER_IS_STIFFER}")
    if w[0] <= threshold:
        raise MicroEqualsMacroError("拉伸块: micro 与 macro 在某方向上相等")
    block = Am @ spd_inverse(gap) @ Amac
    shears = np.array([
        _scalar_e(float(m), float(mac), f"C{p + 4}{p + 4}")
        for p, (m, mac) in enumerate(zip(Cm_shears, Cmacro_shears))
    ])
    return 0.5 * (block + block.T), shears


# --- 极限微变形 ---

def _sym_limit(Ce: StiffnessVoigt, Cmicro: StiffnessVoigt, strain) -> np.ndarray:
    """(ℂ_micro + ℂ_e)⁻¹ ℂ_e · strain，经 6x6 形式求解"""
    _require_same_convention(Ce, Cmicro)
    _require_spd(Ce, "Ce")
    _require_spd(Cmicro, "Cmicro")
    conv = Ce.convention
    s = sym_to_vec(sym(as_mat3(strain)), conv)
    x = scipy.linalg.solve(Ce.entries + Cmicro.entries, Ce.entries @ s, assume_a="pos")
    return vec_to_sym(x, conv)


def limit_micro_distortion(Ce: StiffnessVoigt, Cmicro: StiffnessVoigt, Cc: Coupling3, grad_u) -> LimitDistortion:
    grad_u = as_mat3(grad_u, "grad_u")
    sym_P = _sym_limit(Ce, Cmicro, sym(grad_u))
    determined = check_positive_definite(Cc.entries, "strict").ok
    if not determined:
        logger.debug("Cc 奇异，skew P 不由平衡方程确定，取 skew ∇u")
    return LimitDistortion(P=sym_P + skew(grad_u), skew_determined=determined)


def micro_limit_relation(Ce: StiffnessVoigt, Cmicro: StiffnessVoigt, avg_strain) -> np.ndarray:
    """微观极限下的 sym P̂ = (ℂ_e + ℂ_micro)⁻¹ ℂ_e ⟨ε⟩"""
    return _sym_limit(Ce, Cmicro, avg_strain)


# --- Mindlin-Eringen ---

def _require_full_spd(Ee: Tensor4Full) -> None:
    check = check_positive_definite(Ee.matrix, "strict")
    if not check.ok:
        raise NotPositiveDefiniteError(f"𝔼_e 不是严格正定 (最小特征值 {check.min_eig:.6g})", check.min_eig)


def _mindlin_operator(Ee: Tensor4Full, Cmicro: StiffnessVoigt) -> Tuple[np.ndarray, np.ndarray]:
    """(𝔼_e + ℂ_micro)⁻¹ 𝔼_e，ℂ_micro 嵌入为仅作用于对称部分的 9x9 算子"""
    _require_full_spd(Ee)
    _require_spd(Cmicro, "Cmicro")
    C9m = tensor4_from_voigt(Cmicro).matrix9
    return C9m, scipy.linalg.solve(Ee.matrix + C9m, Ee.matrix, assume_a="pos")


def mindlin_reduction_residual(Ee: Tensor4Full, Cmicro: StiffnessVoigt) -> float:
    """
    T = ℂ_micro (𝔼_e + ℂ_micro)⁻¹ 𝔼_e 的对称-反对称交叉块谱范数之和
    𝔼_e 具有 ℂ_e ⊕ ℂ_c 块结构时为零
    """
    C9m, op = _mindlin_operator(Ee, Cmicro)
    T = C9m @ op
    P_sym, P_skew = sym_projector9(), skew_projector9()
    residual = float(np.linalg.norm(P_skew @ T @ P_sym, 2) + np.linalg.norm(P_sym @ T @ P_skew, 2))
    logger.debug(f"Mindlin 不可约残差: {residual:.3e}")
    return residual


def mindlin_micro_limit(Ee: Tensor4Full, Cmicro: StiffnessVoigt, avg_grad_u) -> np.ndarray:
    """Mindlin-Eringen 微观极限 P̂ = (𝔼_e + ℂ_micro)⁻¹ 𝔼_e ⟨∇u⟩"""
    _, op = _mindlin_operator(Ee, Cmicro)
    return (op @ as_mat3(avg_grad_u).reshape(9)).reshape(3, 3)
