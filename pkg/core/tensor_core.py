"""
三维张量代数核心
Cartan 分解、axl、Voigt/Mandel 映射 (Sym(3) <-> R^6，四阶张量 <-> 6x6)，
以及映射逆恒等式的数值校验。

约定：
- Voigt 顺序固定为 (11, 22, 33, 23, 13, 12)
- 9x9 (Tensor4Full) 基底按行优先 (11, 12, 13, 21, 22, 23, 31, 32, 33)
- 所有对象构造后只读，函数均为纯函数
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Tuple, Union

import numpy as np
import scipy.linalg

from core.errors import (
    InvalidParameterError,
    SingularInputError,
    SymmetryViolationError,
)
from utils.logger import get_logger

logger = get_logger(__name__)

# Mat3 / Sym3 / Skew3 / Vec3 / Vec6 均为 numpy 数组
Mat3 = np.ndarray
Sym3 = np.ndarray
Skew3 = np.ndarray
Vec3 = np.ndarray
Vec6 = np.ndarray

VOIGT_PAIRS: Tuple[Tuple[int, int], ...] = ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1))
SPD_RELATIVE_FLOOR = 1e-12
MINOR_SYMMETRY_TOL = 1e-12


class NotationConvention(Enum):
    """6x6 记法：Voigt (c=2) 或 Mandel (c=√2)"""
    VOIGT = "voigt"
    MANDEL = "mandel"

    @property
    def c(self) -> float:
        return 2.0 if self is NotationConvention.VOIGT else math.sqrt(2.0)

    @property
    def shear_scale(self) -> float:
        """剪切块相对 Voigt 工程常数的缩放 4/c²"""
        return 1.0 if self is NotationConvention.VOIGT else 2.0

    @classmethod
    def parse(cls, value: Union[str, "NotationConvention", None]) -> "NotationConvention":
        if value is None:
            return cls.VOIGT
        if isinstance(value, NotationConvention):
            return value
        key = str(value).strip().lower()
        for member in cls:
            if member.value == key:
                return member
        raise InvalidParameterError(f"未知的记法约定: {value}（可选 voigt / mandel）")


def _as_array(value, shape: Tuple[int, ...], what: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise InvalidParameterError(f"{what} 含非数值元素: {e}") from e
    if arr.shape != shape:
        raise InvalidParameterError(f"{what} 形状应为 {shape}，实际为 {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError(f"{what} 含非有限值")
    return arr


def _from_upper(arr: np.ndarray) -> np.ndarray:
    """以上三角为准重建对称矩阵，对称性精确成立"""
    sym_arr = np.triu(arr) + np.triu(arr, 1).T
    sym_arr.setflags(write=False)
    return sym_arr


def asymmetric_entries(arr: np.ndarray, tol: float) -> List[Tuple[int, int]]:
    """返回 |A_ij - A_ji| > tol·max(1, max|A|) 的下标 (1 起始, i<j)"""
    scale = max(1.0, float(np.max(np.abs(arr)))) if arr.size else 1.0
    diff = np.abs(arr - arr.T)
    rows, cols = np.nonzero(np.triu(diff > tol * scale, 1))
    return [(int(i) + 1, int(j) + 1) for i, j in zip(rows, cols)]


@dataclass(frozen=True, eq=False)
class StiffnessVoigt:
    """6x6 对称刚度矩阵（上三角存储，构造时对称化）"""
    entries: np.ndarray
    convention: NotationConvention = NotationConvention.VOIGT

    def __post_init__(self):
        arr = _as_array(self.entries, (6, 6), "StiffnessVoigt")
        object.__setattr__(self, "entries", _from_upper(arr))
        object.__setattr__(self, "convention", NotationConvention.parse(self.convention))

    @classmethod
    def from_matrix(cls, matrix, convention=NotationConvention.VOIGT, tol: float = 1e-12) -> "StiffnessVoigt":
        """严格构造：输入必须对称，否则报告超差下标"""
        arr = _as_array(matrix, (6, 6), "StiffnessVoigt")
        bad = asymmetric_entries(arr, tol)
        if bad:
            raise SymmetryViolationError(f"6x6 矩阵不对称，超差位置: {bad}", bad)
        return cls(arr, convention)

    def __repr__(self) -> str:
        return f"StiffnessVoigt(convention={self.convention.value}, entries={self.entries.tolist()})"


@dataclass(frozen=True, eq=False)
class Coupling3:
    """作用于轴向量的 3x3 对称转动耦合矩阵 C̃_c"""
    entries: np.ndarray

    def __post_init__(self):
        arr = _as_array(self.entries, (3, 3), "Coupling3")
        object.__setattr__(self, "entries", _from_upper(arr))

    @classmethod
    def from_matrix(cls, matrix, tol: float = 1e-12) -> "Coupling3":
        arr = _as_array(matrix, (3, 3), "Coupling3")
        bad = asymmetric_entries(arr, tol)
        if bad:
            raise SymmetryViolationError(f"3x3 耦合矩阵不对称，超差位置: {bad}", bad)
        return cls(arr)

    @classmethod
    def zero(cls) -> "Coupling3":
        return cls(np.zeros((3, 3)))

    def __repr__(self) -> str:
        return f"Coupling3(entries={self.entries.tolist()})"


@dataclass(frozen=True, eq=False)
class Tensor4Sym:
    """作用于 Sym(3) 的四阶张量，分量 C[i,j,k,l]"""
    components: np.ndarray

    def __post_init__(self):
        arr = _as_array(self.components, (3, 3, 3, 3), "Tensor4Sym")
        arr.setflags(write=False)
        object.__setattr__(self, "components", arr)

    @property
    def matrix9(self) -> np.ndarray:
        return self.components.reshape(9, 9)

    @classmethod
    def from_matrix9(cls, matrix) -> "Tensor4Sym":
        return cls(_as_array(matrix, (9, 9), "Tensor4Sym").reshape(3, 3, 3, 3))


@dataclass(frozen=True, eq=False)
class Tensor4Full:
    """R^{3x3} -> R^{3x3} 的四阶张量，9x9 行优先基底；来自二次型，主对称"""
    matrix: np.ndarray

    def __post_init__(self):
        arr = _as_array(self.matrix, (9, 9), "Tensor4Full")
        object.__setattr__(self, "matrix", _from_upper(arr))

    @classmethod
    def from_matrix(cls, matrix, tol: float = 1e-12) -> "Tensor4Full":
        arr = _as_array(matrix, (9, 9), "Tensor4Full")
        bad = asymmetric_entries(arr, tol)
        if bad:
            raise SymmetryViolationError(f"9x9 矩阵不满足主对称，超差位置: {bad}", bad)
        return cls(arr)


class CartanParts(NamedTuple):
    devsym: Sym3
    skew: Skew3
    trace: float


# --- 二阶张量 ---

def as_mat3(X, what: str = "Mat3") -> Mat3:
    return _as_array(X, (3, 3), what)


def sym(X: Mat3) -> Sym3:
    X = np.asarray(X, dtype=float)
    return 0.5 * (X + X.T)


def skew(X: Mat3) -> Skew3:
    X = np.asarray(X, dtype=float)
    return 0.5 * (X - X.T)


def dev(X: Mat3) -> Mat3:
    X = np.asarray(X, dtype=float)
    return X - (np.trace(X) / 3.0) * np.eye(3)


def cartan_decompose(X: Mat3) -> CartanParts:
    """X = dev sym X + skew X + (tr X / 3)·1"""
    X = as_mat3(X)
    trace = float(np.trace(X))
    return CartanParts(devsym=dev(sym(X)), skew=skew(X), trace=trace)


def axl(A: Skew3) -> Vec3:
    A = as_mat3(A, "Skew3")
    return np.array([-A[1, 2], A[0, 2], -A[0, 1]])


def anti(v: Vec3) -> Skew3:
    """axl 的逆：axl(anti(v)) == v"""
    v = _as_array(v, (3,), "Vec3")
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def frobenius_inner(A: Mat3, B: Mat3) -> float:
    return float(np.sum(np.asarray(A) * np.asarray(B)))


# --- Voigt / Mandel 映射 ---

def mapping_matrix(conv: NotationConvention = NotationConvention.VOIGT) -> np.ndarray:
    """𝔐 (6x9)：v_α = 𝔐_{α,ij} S_ij"""
    conv = NotationConvention.parse(conv)
    M = np.zeros((6, 9))
    for alpha, (i, j) in enumerate(VOIGT_PAIRS):
        if i == j:
            M[alpha, 3 * i + j] = 1.0
        else:
            M[alpha, 3 * i + j] = conv.c / 2.0
            M[alpha, 3 * j + i] = conv.c / 2.0
    return M


def inverse_mapping_matrix(conv: NotationConvention = NotationConvention.VOIGT) -> np.ndarray:
    """𝔐⁻¹ (9x6)：S_ij = 𝔐⁻¹_{ij,α} v_α，且 𝔐 𝔐⁻¹ = 1 (6x6)"""
    conv = NotationConvention.parse(conv)
    Minv = np.zeros((9, 6))
    for alpha, (i, j) in enumerate(VOIGT_PAIRS):
        if i == j:
            Minv[3 * i + j, alpha] = 1.0
        else:
            Minv[3 * i + j, alpha] = 1.0 / conv.c
            Minv[3 * j + i, alpha] = 1.0 / conv.c
    return Minv


def axial_matrix() -> np.ndarray:
    """Ax (3x9)：axl(skew X) = Ax · vec(X)"""
    Ax = np.zeros((3, 9))
    # a1 = -(X23 - X32)/2, a2 = (X13 - X31)/2, a3 = -(X12 - X21)/2
    Ax[0, 3 * 1 + 2], Ax[0, 3 * 2 + 1] = -0.5, 0.5
    Ax[1, 3 * 0 + 2], Ax[1, 3 * 2 + 0] = 0.5, -0.5
    Ax[2, 3 * 0 + 1], Ax[2, 3 * 1 + 0] = -0.5, 0.5
    return Ax


def sym_projector9() -> np.ndarray:
    """9x9 对称部分投影"""
    eye = np.eye(9)
    transpose = np.zeros((9, 9))
    for i in range(3):
        for j in range(3):
            transpose[3 * i + j, 3 * j + i] = 1.0
    return 0.5 * (eye + transpose)


def skew_projector9() -> np.ndarray:
    return np.eye(9) - sym_projector9()


def sym_to_vec(S: Sym3, conv: NotationConvention = NotationConvention.VOIGT) -> Vec6:
    """(S11, S22, S33, c·S23, c·S13, c·S12)"""
    conv = NotationConvention.parse(conv)
    S = sym(as_mat3(S, "Sym3"))
    c = conv.c
    return np.array([S[0, 0], S[1, 1], S[2, 2], c * S[1, 2], c * S[0, 2], c * S[0, 1]])


def vec_to_sym(v: Vec6, conv: NotationConvention = NotationConvention.VOIGT) -> Sym3:
    conv = NotationConvention.parse(conv)
    v = _as_array(v, (6,), "Vec6")
    c = conv.c
    S = np.diag(v[:3])
    S[1, 2] = S[2, 1] = v[3] / c
    S[0, 2] = S[2, 0] = v[4] / c
    S[0, 1] = S[1, 0] = v[5] / c
    return S


def _voigt_index_and_scale(conv: NotationConvention) -> Tuple[np.ndarray, np.ndarray]:
    """9 个行优先基底分量对应的 Voigt 下标与 𝔐 系数"""
    index = np.zeros(9, dtype=int)
    scale = np.ones(9)
    for alpha, (i, j) in enumerate(VOIGT_PAIRS):
        index[3 * i + j] = alpha
        index[3 * j + i] = alpha
        if i != j:
            scale[3 * i + j] = scale[3 * j + i] = conv.c / 2.0
    return index, scale


def tensor4_from_voigt(Cv: StiffnessVoigt) -> Tensor4Sym:
    """ℂ_ijkl = 𝔐_αij C̃_αβ 𝔐_βkl；逐项单次乘积，主/次对称精确成立"""
    index, scale = _voigt_index_and_scale(Cv.convention)
    C9 = Cv.entries[np.ix_(index, index)] * np.outer(scale, scale)
    return Tensor4Sym.from_matrix9(C9)


def voigt_from_tensor4(C: Tensor4Sym, conv: NotationConvention = NotationConvention.VOIGT) -> StiffnessVoigt:
    """C̃_αβ = 𝔐⁻¹_ijα ℂ_ijkl 𝔐⁻¹_klβ；例如 C̃_44 = (4/c²)·ℂ_2323"""
    conv = NotationConvention.parse(conv)
    comp = C.components
    scale = max(1.0, float(np.max(np.abs(comp))))
    minor = max(
        float(np.max(np.abs(comp - comp.transpose(1, 0, 2, 3)))),
        float(np.max(np.abs(comp - comp.transpose(0, 1, 3, 2)))),
    )
    if minor > MINOR_SYMMETRY_TOL * scale:
        raise SymmetryViolationError(f"四阶张量不满足次对称 (偏差 {minor:.3e})")
    major = float(np.max(np.abs(comp - comp.transpose(2, 3, 0, 1))))
    if major > MINOR_SYMMETRY_TOL * scale:
        raise SymmetryViolationError(f"四阶张量不满足主对称 (偏差 {major:.3e})")
    Minv = inverse_mapping_matrix(conv)
    return StiffnessVoigt(Minv.T @ C.matrix9 @ Minv, conv)


def convert_convention(Cv: StiffnessVoigt, conv: NotationConvention) -> StiffnessVoigt:
    conv = NotationConvention.parse(conv)
    if conv is Cv.convention:
        return Cv
    return voigt_from_tensor4(tensor4_from_voigt(Cv), conv)


def identity_stiffness(conv: NotationConvention = NotationConvention.VOIGT) -> StiffnessVoigt:
    """Sym(3) 上的恒等算子"""
    conv = NotationConvention.parse(conv)
    return voigt_from_tensor4(Tensor4Sym.from_matrix9(sym_projector9()), conv)


def apply_stiffness(Cv: StiffnessVoigt, S: Mat3) -> Sym3:
    """ℂ S，经 6x6 形式计算：σ = 𝔐ᵀ C̃ 𝔐 vec(S)"""
    M = mapping_matrix(Cv.convention)
    flat = M.T @ (Cv.entries @ (M @ as_mat3(S).reshape(9)))
    return sym(flat.reshape(3, 3))


def apply_coupling(Cc: Coupling3, A: Mat3) -> Skew3:
    """ℂ_c skew A，满足 ⟨ℂ_c A, A⟩ = ⟨C̃_c axl A, axl A⟩"""
    return 0.5 * anti(Cc.entries @ axl(skew(as_mat3(A))))


def coupling_matrix9(Cc: Coupling3) -> np.ndarray:
    Ax = axial_matrix()
    return Ax.T @ Cc.entries @ Ax


def relaxed_tensor4_full(Ce: StiffnessVoigt, Cc: Coupling3) -> Tensor4Full:
    """具有松弛块结构的 𝔼_e = ℂ_e ⊕ ℂ_c"""
    return Tensor4Full(tensor4_from_voigt(Ce).matrix9 + coupling_matrix9(Cc))


def isotropic_tensor4_full(mu_e: float, lambda_e: float, mu_c: float) -> Tensor4Full:
    """
    𝔼_e X = 2μe sym X + λe tr(X)·1 + 2μc skew X
    μc 取经典 Mindlin 记法，skew 部分等于 relaxed_tensor4_full 配 C̃_c = 4μc·1。
    """
    vec_eye = np.eye(3).reshape(9)
    return Tensor4Full(
        2.0 * mu_e * sym_projector9()
        + lambda_e * np.outer(vec_eye, vec_eye)
        + 2.0 * mu_c * skew_projector9()
    )


def rotate_tensor4(C: Tensor4Sym, Q: np.ndarray) -> Tensor4Sym:
    """C'_ijkl = Q_ia Q_jb Q_kc Q_ld C_abcd"""
    Q = as_mat3(Q, "Q")
    return Tensor4Sym(np.einsum("ia,jb,kc,ld,abcd->ijkl", Q, Q, Q, Q, C.components))


# --- 对称矩阵谱工具 ---

def symmetric_eigenvalues(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    return scipy.linalg.eigh(0.5 * (M + M.T), eigvals_only=True)


def spd_inverse(A: np.ndarray) -> np.ndarray:
    """经对称特征分解求逆，结果精确对称"""
    w, V = scipy.linalg.eigh(0.5 * (A + A.T))
    inv = (V / w) @ V.T
    return 0.5 * (inv + inv.T)


def check_inverse_mapping_identity(Cv: StiffnessVoigt) -> float:
    """
    校验 (ℂ⁻¹)_ijkl == 𝔐⁻¹_ijα (C̃⁻¹)_αβ 𝔐⁻¹_klβ
    左端独立计算：Sym(3) 上的逆 = (ℂ + P_skew)⁻¹ - P_skew
    """
    w = symmetric_eigenvalues(Cv.entries)
    if w[0] <= SPD_RELATIVE_FLOOR * max(w[-1], 0.0):
        raise SingularInputError(f"输入矩阵奇异或非正定 (最小特征值 {w[0]:.3e})", float(w[0]))

    C9 = tensor4_from_voigt(Cv).matrix9
    P_skew = skew_projector9()
    direct = scipy.linalg.inv(C9 + P_skew) - P_skew

    Minv = inverse_mapping_matrix(Cv.convention)
    mapped = Minv @ spd_inverse(Cv.entries) @ Minv.T

    residual = float(np.max(np.abs(direct - mapped)))
    logger.debug(f"映射逆恒等式残差: {residual:.3e} ({Cv.convention.value})")
    return residual
