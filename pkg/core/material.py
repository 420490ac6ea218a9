"""
材料与运动学状态
RelaxedMaterial 汇总松弛微形态模型的全部本构参数，KinematicState 为逐点运动学量。
"""
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from core.errors import InvalidMaterialError, InvalidParameterError
from core.tensor_core import (
    Coupling3,
    NotationConvention,
    StiffnessVoigt,
    as_mat3,
    identity_stiffness,
    symmetric_eigenvalues,
)

SPD_RELATIVE_FLOOR = 1e-12


def _min_eig_ok(matrix: np.ndarray, strict: bool) -> bool:
    w = symmetric_eigenvalues(matrix)
    scale = max(float(np.max(np.abs(w))), 0.0)
    if strict:
        return scale > 0.0 and w[0] > SPD_RELATIVE_FLOOR * scale
    return w[0] >= -SPD_RELATIVE_FLOOR * scale


@dataclass(frozen=True)
class InertiaSpec:
    """微惯性参数：ρ、L̂c 与各向同性分裂系数 η1..η3"""
    rho: float
    Lc_hat: float = 0.0
    eta1: float = 1.0
    eta2: float = 1.0
    eta3: float = 1.0

    def __post_init__(self):
        if not self.rho > 0:
            raise InvalidParameterError(f"密度 rho 必须为正: {self.rho}")
        if not self.Lc_hat >= 0:
            raise InvalidParameterError(f"惯性长度 Lc_hat 不能为负: {self.Lc_hat}")
        for name in ("eta1", "eta2", "eta3"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} 必须为正: {getattr(self, name)}")


@dataclass(frozen=True, eq=False)
class KinematicState:
    grad_u: np.ndarray
    P: np.ndarray
    curl_P: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    P_dot: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))

    def __post_init__(self):
        for name in ("grad_u", "P", "curl_P", "P_dot"):
            arr = as_mat3(getattr(self, name), name)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def zero(cls) -> "KinematicState":
        return cls(np.zeros((3, 3)), np.zeros((3, 3)))


@dataclass(frozen=True, eq=False)
class RelaxedMaterial:
    """
    松弛微形态材料
    Ce / Cmicro 为 6x6 刚度，Cc 为转动耦合，curv_e / curv_c 为曲率张量 𝕃_e / 𝕃_c。
    默认曲率张量使曲率能退化为 (μLc²/2)‖Curl P‖²。
    """
    Ce: StiffnessVoigt
    Cmicro: StiffnessVoigt
    Cc: Coupling3 = field(default_factory=Coupling3.zero)
    curv_e: Optional[StiffnessVoigt] = None
    curv_c: Coupling3 = field(default_factory=lambda: Coupling3(2.0 * np.eye(3)))
    mu: float = 1.0
    Lc: float = 0.0
    inertia: Optional[InertiaSpec] = None

    def __post_init__(self):
        if self.curv_e is None:
            object.__setattr__(self, "curv_e", identity_stiffness(self.Ce.convention))

    @property
    def convention(self) -> NotationConvention:
        return self.Ce.convention

    @classmethod
    def isotropic(cls, lambda_e: float, mu_e: float, lambda_micro: float, mu_micro: float,
                  mu_c: float = 0.0, mu: float = 1.0, Lc: float = 0.0,
                  inertia: Optional[InertiaSpec] = None,
                  conv: NotationConvention = NotationConvention.VOIGT) -> "RelaxedMaterial":
        """各向同性材料；mu_c 与材料文件、couple_modulus 同义，耦合张量由 isotropic_coupling 构造"""
        from core.anisotropy import build_isotropic, isotropic_coupling

        return cls(
            Ce=build_isotropic(lambda_e, mu_e, conv),
            Cmicro=build_isotropic(lambda_micro, mu_micro, conv),
            Cc=isotropic_coupling(mu_c),
            mu=mu,
            Lc=Lc,
            inertia=inertia,
        )

    def problems(self) -> List[str]:
        """返回材料校验问题列表，空列表表示有效"""
        errors = []
        conv = self.convention
        for name in ("Cmicro", "curv_e"):
            if getattr(self, name).convention is not conv:
                errors.append(f"{name} 的记法约定与 Ce 不一致")
        if not _min_eig_ok(self.Ce.entries, strict=True):
            errors.append("Ce 不是严格正定")
        if not _min_eig_ok(self.Cmicro.entries, strict=True):
            errors.append("Cmicro 不是严格正定")
        if not _min_eig_ok(self.Cc.entries, strict=False):
            errors.append("Cc 不是半正定")
        if not _min_eig_ok(self.curv_e.entries, strict=False):
            errors.append("curv_e 不是半正定")
        if not _min_eig_ok(self.curv_c.entries, strict=False):
            errors.append("curv_c 不是半正定")
        if not self.mu > 0:
            errors.append(f"mu 必须为正: {self.mu}")
        if not self.Lc >= 0:
            errors.append(f"Lc 不能为负: {self.Lc}")
        return errors

    def validate(self) -> "RelaxedMaterial":
        errors = self.problems()
        if errors:
            raise InvalidMaterialError("材料无效: " + "; ".join(errors))
        return self
