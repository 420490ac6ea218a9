"""
各向异性：对称类模板、分类、正定性检查与极限情形判据
6x6 刚度的类模板由 plugins/classes 下的插件提供，本模块负责调度。
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np

from core.errors import InvalidParameterError, ParameterCountError
from core.tensor_core import (
    Coupling3,
    NotationConvention,
    StiffnessVoigt,
    as_mat3,
    dev,
    skew,
    sym,
    symmetric_eigenvalues,
)
from utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_CLASSIFY_TOL = 1e-9
PD_RELATIVE_FLOOR = 1e-12


class SymmetryClass(Enum):
    ISOTROPIC = "isotropic"
    CUBIC = "cubic"
    ORTHOTROPIC = "orthotropic"
    TETRAGONAL = "tetragonal"
    MONOCLINIC = "monoclinic"
    TRICLINIC = "triclinic"

    @classmethod
    def parse(cls, value: Union[str, "SymmetryClass"]) -> "SymmetryClass":
        if isinstance(value, SymmetryClass):
            return value
        key = str(value).strip().lower().replace("-", "_")
        key = _CLASS_ALIASES.get(key, key)
        for member in cls:
            if member.value == key:
                return member
        raise InvalidParameterError(f"未知的对称类: {value}")


_CLASS_ALIASES = {
    "iso": "isotropic",
    "orthorhombic": "orthotropic",
    "ortho": "orthotropic",
    "transversely_isotropic": "tetragonal",
    "transverse": "tetragonal",
    "tetr": "tetragonal",
    "mono": "monoclinic",
    "aniso": "triclinic",
}


class LimitingCase(Enum):
    COSSERAT = "cosserat"
    MICRO_DILATION = "micro_dilation"
    MICRO_INCOMPRESSIBLE = "micro_incompressible"
    MICRO_STRETCH = "micro_stretch"
    MICROSTRAIN = "microstrain"


class PDMode(Enum):
    STRICT = "strict"
    SEMI = "semi"


class PDCheck(NamedTuple):
    ok: bool
    min_eig: float


# --- 模量换算 ---

def bulk_modulus(lam: float, mu: float) -> float:
    """κ = (2μ + 3λ)/3"""
    return (2.0 * mu + 3.0 * lam) / 3.0


def lame_lambda(kappa: float, mu: float) -> float:
    return kappa - 2.0 * mu / 3.0


# --- 6x6 模板 ---

def _block_template(diagonal: Sequence[float], off: Sequence[float], shears: Sequence[float],
                    conv: NotationConvention) -> StiffnessVoigt:
    """diagonal: (C11,C22,C33)，off: (C12,C13,C23)，shears 为 Voigt 工程值"""
    conv = NotationConvention.parse(conv)
    C = np.zeros((6, 6))
    C[0, 0], C[1, 1], C[2, 2] = diagonal
    C12, C13, C23 = off
    C[0, 1] = C[1, 0] = C12
    C[0, 2] = C[2, 0] = C13
    C[1, 2] = C[2, 1] = C23
    for p, value in enumerate(shears):
        C[3 + p, 3 + p] = conv.shear_scale * value
    return StiffnessVoigt(C, conv)


def build_isotropic(lam: float, mu: float, conv: NotationConvention = NotationConvention.VOIGT) -> StiffnessVoigt:
    return _block_template([2.0 * mu + lam] * 3, [lam] * 3, [mu] * 3, conv)


def build_cubic(kappa: float, mu: float, mu_star: float,
                conv: NotationConvention = NotationConvention.VOIGT) -> StiffnessVoigt:
    diag = kappa + 4.0 * mu / 3.0
    off = kappa - 2.0 * mu / 3.0
    return _block_template([diag] * 3, [off] * 3, [mu_star] * 3, conv)


def build_orthotropic(params: Sequence[float], conv: NotationConvention = NotationConvention.VOIGT) -> StiffnessVoigt:
    """params = (C11, C22, C33, C12, C13, C23, C44, C55, C66)"""
    values = [float(v) for v in params]
    if len(values) != 9:
        raise ParameterCountError(f"正交各向异性需要 9 个常数，实际 {len(values)} 个")
    return _block_template(values[0:3], values[3:6], values[6:9], conv)


# --- 转动耦合模板 ---

_COUPLING_COUNTS = {
    SymmetryClass.TRICLINIC: 6,
    SymmetryClass.MONOCLINIC: 4,
    SymmetryClass.ORTHOTROPIC: 3,
    SymmetryClass.TETRAGONAL: 2,
    SymmetryClass.CUBIC: 1,
    SymmetryClass.ISOTROPIC: 1,
}


def isotropic_coupling(mu_c: float) -> Coupling3:
    """
    各向同性转动耦合 C̃_c = (μc/2)·1，μc 为 Cosserat 耦合模量
    能量项 ½⟨C̃_c axl A, axl A⟩ = (μc/8)‖skew A‖²；couple_modulus 返回同一个 μc。
    """
    return Coupling3(0.5 * mu_c * np.eye(3))


def build_coupling(symmetry_class: Union[str, SymmetryClass], params: Sequence[float]) -> Coupling3:
    """
    按类构造 C̃_c
    triclinic: (C11, C22, C33, C23, C13, C12)
    monoclinic: (C11, C22, C33, C13)
    orthotropic: (C11, C22, C33)
    tetragonal: (a, b) -> diag(a, a, b)
    isotropic / cubic: (μc,) -> isotropic_coupling(μc)
    """
    cls = SymmetryClass.parse(symmetry_class)
    values = np.atleast_1d(np.asarray(params, dtype=float)).tolist()
    expected = _COUPLING_COUNTS[cls]
    if len(values) != expected:
        raise ParameterCountError(f"{cls.value} 耦合需要 {expected} 个参数，实际 {len(values)} 个")

    if cls in (SymmetryClass.ISOTROPIC, SymmetryClass.CUBIC):
        return isotropic_coupling(values[0])
    if cls is SymmetryClass.TETRAGONAL:
        a, b = values
        return Coupling3(np.diag([a, a, b]))
    if cls is SymmetryClass.ORTHOTROPIC:
        return Coupling3(np.diag(values))

    C = np.diag(values[:3])
    if cls is SymmetryClass.MONOCLINIC:
        C[0, 2] = C[2, 0] = values[3]
    else:
        C23, C13, C12 = values[3:]
        C[1, 2] = C[2, 1] = C23
        C[0, 2] = C[2, 0] = C13
        C[0, 1] = C[1, 0] = C12
    return Coupling3(C)


def classify_coupling(Cc: Coupling3, tol: float = DEFAULT_CLASSIFY_TOL) -> SymmetryClass:
    """耦合矩阵按 isotropic → tetragonal → orthotropic → monoclinic → triclinic 归类"""
    C = Cc.entries
    bound = tol * max(float(np.max(np.abs(C))), np.finfo(float).tiny)
    d = np.diag(C)
    if abs(C[0, 1]) <= bound and abs(C[1, 2]) <= bound:
        if abs(C[0, 2]) <= bound:
            if abs(d[0] - d[1]) <= bound:
                if abs(d[1] - d[2]) <= bound:
                    return SymmetryClass.ISOTROPIC
                return SymmetryClass.TETRAGONAL
            return SymmetryClass.ORTHOTROPIC
        return SymmetryClass.MONOCLINIC
    return SymmetryClass.TRICLINIC


# --- 经插件调度的类操作 ---

def _registry():
    from core.plugin_system import get_class_registry

    return get_class_registry()


@dataclass(frozen=True)
class MaterialSpec:
    """对称类 + 命名参数；build 经插件模板生成 6x6 刚度"""
    symmetry_class: SymmetryClass
    parameters: Dict[str, float] = field(default_factory=dict)

    def build(self, conv: NotationConvention = NotationConvention.VOIGT) -> StiffnessVoigt:
        plugin = _registry().require(self.symmetry_class)
        return plugin.build(self.parameters, conv)


def build_stiffness(symmetry_class: Union[str, SymmetryClass],
                    params: Union[Sequence[float], Mapping[str, float]],
                    conv: NotationConvention = NotationConvention.VOIGT) -> StiffnessVoigt:
    return _registry().require(SymmetryClass.parse(symmetry_class)).build(params, conv)


def classify_stiffness(Cv: StiffnessVoigt, tol: float = DEFAULT_CLASSIFY_TOL) -> SymmetryClass:
    """返回模板约束在 tol·‖Cv‖∞ 内成立的最具体类，全部不满足时为 triclinic"""
    for plugin in _registry().ordered_plugins():
        if plugin.matches(Cv, tol):
            return plugin.symmetry_class
    return SymmetryClass.TRICLINIC


def class_parameters(Cv: StiffnessVoigt, symmetry_class: Optional[SymmetryClass] = None,
                     tol: float = DEFAULT_CLASSIFY_TOL) -> Optional[Dict[str, float]]:
    """读出类参数；triclinic 无命名参数，返回 None"""
    cls = symmetry_class or classify_stiffness(Cv, tol)
    plugin = _registry().get_plugin(cls)
    if plugin is None:
        return None
    return plugin.extract_parameters(Cv)


# --- 正定性 ---

def check_positive_definite(M, mode: Union[str, PDMode] = PDMode.STRICT) -> PDCheck:
    """
    strict: min_eig > 1e-12·max_eig
    semi:   min_eig >= -1e-12·max_eig（零耦合 Cc == 0 可通过）
    """
    mode = PDMode(mode) if not isinstance(mode, PDMode) else mode
    arr = M.entries if hasattr(M, "entries") else np.asarray(M, dtype=float)
    w = symmetric_eigenvalues(arr)
    min_eig = float(w[0])
    max_eig = float(w[-1])
    if mode is PDMode.STRICT:
        ok = max_eig > 0.0 and min_eig > PD_RELATIVE_FLOOR * max_eig
    else:
        ok = min_eig >= -PD_RELATIVE_FLOOR * max(abs(max_eig), abs(min_eig))
    return PDCheck(ok=bool(ok), min_eig=min_eig)


# --- 极限情形 ---

def limiting_case_predicate(case: Union[str, LimitingCase], P, tol: float = 1e-12) -> bool:
    """
    在给定的微变形样本 P 上检验极限情形的代数约束
    cosserat: sym P == 0
    micro_dilation: P ∈ ℝ·1
    micro_incompressible: tr P == 0
    micro_stretch: dev sym P == 0
    microstrain: skew P == 0
    """
    case = LimitingCase(case) if not isinstance(case, LimitingCase) else case
    P = as_mat3(P, "P")
    bound = tol * max(1.0, float(np.max(np.abs(P))))

    if case is LimitingCase.COSSERAT:
        residual = np.max(np.abs(sym(P)))
    elif case is LimitingCase.MICRO_DILATION:
        residual = np.max(np.abs(dev(P)))
    elif case is LimitingCase.MICRO_INCOMPRESSIBLE:
        residual = abs(np.trace(P))
    elif case is LimitingCase.MICRO_STRETCH:
        residual = np.max(np.abs(dev(sym(P))))
    else:
        residual = np.max(np.abs(skew(P)))
    return bool(residual <= bound)


def active_limiting_cases(P, tol: float = 1e-12) -> List[LimitingCase]:
    return [case for case in LimitingCase if limiting_case_predicate(case, P, tol)]
