"""
逐点能量密度与应力
松弛微形态能量、Mindlin-Eringen 能量、各向同性曲率、微惯性动能及线弹性上界检查。
Curl P 由调用方逐点给出，本模块不做场微分。
"""
from typing import NamedTuple, Optional

import numpy as np

from core.material import InertiaSpec, KinematicState, RelaxedMaterial
from core.tensor_core import (
    Coupling3,
    StiffnessVoigt,
    Tensor4Full,
    apply_coupling,
    apply_stiffness,
    as_mat3,
    axl,
    dev,
    skew,
    sym,
    sym_to_vec,
)
from utils.logger import get_logger

logger = get_logger(__name__)

UPPER_BOUND_TOL = 1e-13


class EnergyContributions(NamedTuple):
    elastic: float
    micro_self: float
    coupling: float
    curvature: float

    @property
    def total(self) -> float:
        return self.elastic + self.micro_self + self.coupling + self.curvature


class UpperBound(NamedTuple):
    W_admissible: float
    W_linear: float
    ok: bool


def _sym_form(Cv: StiffnessVoigt, S: np.ndarray) -> float:
    """⟨ℂ S, S⟩，S 取对称部分"""
    v = sym_to_vec(sym(S), Cv.convention)
    return float(v @ Cv.entries @ v)


def _skew_form(Cc: Coupling3, A: np.ndarray) -> float:
    """⟨ℂ_c A, A⟩ = ⟨C̃_c axl A, axl A⟩"""
    a = axl(skew(A))
    return float(a @ Cc.entries @ a)


def energy_contributions(material: RelaxedMaterial, state: KinematicState) -> EnergyContributions:
    material.validate()
    e = state.grad_u - state.P
    curvature_scale = 0.5 * material.mu * material.Lc ** 2
    return EnergyContributions(
        elastic=0.5 * _sym_form(material.Ce, e),
        micro_self=0.5 * _sym_form(material.Cmicro, state.P),
        coupling=0.5 * _skew_form(material.Cc, e),
        curvature=curvature_scale * (
            _sym_form(material.curv_e, state.curl_P) + _skew_form(material.curv_c, state.curl_P)
        ),
    )


def relaxed_energy(material: RelaxedMaterial, state: KinematicState) -> float:
    """
    W = ½⟨ℂe sym e, sym e⟩ + ½⟨ℂmicro sym P, sym P⟩ + ½⟨ℂc skew e, skew e⟩
        + (μLc²/2)[⟨𝕃e sym Curl P, sym Curl P⟩ + ⟨𝕃c skew Curl P, skew Curl P⟩]，e = ∇u − P
    """
    return energy_contributions(material, state).total


def relaxed_stress(material: RelaxedMaterial, grad_u, P) -> np.ndarray:
    """σ = ℂe sym(∇u − P) + ℂc skew(∇u − P)"""
    e = as_mat3(grad_u, "grad_u") - as_mat3(P, "P")
    return apply_stiffness(material.Ce, e) + apply_coupling(material.Cc, e)


def mindlin_energy(Ee: Tensor4Full, Cmicro: StiffnessVoigt, grad_P_norm_sq: float,
                   mu: float, Lc: float, grad_u, P) -> float:
    """W = ½⟨𝔼e(∇u−P), ∇u−P⟩ + ½⟨ℂmicro sym P, sym P⟩ + (μLc²/2)‖∇P‖²"""
    e = (as_mat3(grad_u, "grad_u") - as_mat3(P, "P")).reshape(9)
    return float(
        0.5 * e @ Ee.matrix @ e
        + 0.5 * _sym_form(Cmicro, as_mat3(P))
        + 0.5 * mu * Lc ** 2 * grad_P_norm_sq
    )


def isotropic_curvature(alpha1: float, alpha2: float, alpha3: float, curl_P,
                        mu: float, Lc: float) -> float:
    X = as_mat3(curl_P, "curl_P")
    return 0.5 * mu * Lc ** 2 * (
        alpha1 * float(np.sum(dev(sym(X)) ** 2))
        + alpha2 * float(np.sum(skew(X) ** 2))
        + alpha3 * float(np.trace(X)) ** 2
    )


def kinetic_density(inertia: InertiaSpec, P_dot, u_dot: Optional[np.ndarray] = None) -> float:
    """(ρL̂c²/2)(η1‖devsym Ṗ‖² + η2‖skew Ṗ‖² + η3 tr(Ṗ)²)，给出 u̇ 时加上 ½ρ‖u̇‖²"""
    X = as_mat3(P_dot, "P_dot")
    micro = 0.5 * inertia.rho * inertia.Lc_hat ** 2 * (
        inertia.eta1 * float(np.sum(dev(sym(X)) ** 2))
        + inertia.eta2 * float(np.sum(skew(X) ** 2))
        + inertia.eta3 * float(np.trace(X)) ** 2
    )
    if u_dot is None:
        return micro
    v = np.asarray(u_dot, dtype=float).reshape(3)
    return micro + 0.5 * inertia.rho * float(v @ v)


def upper_bound_check(material: RelaxedMaterial, grad_u) -> UpperBound:
    """取 P = ∇u、Curl P = 0 的容许场，与线弹性 ½⟨ℂmicro sym∇u, sym∇u⟩ 比较"""
    grad_u = as_mat3(grad_u, "grad_u")
    admissible = relaxed_energy(material, KinematicState(grad_u, grad_u))
    linear = 0.5 * _sym_form(material.Cmicro, grad_u)
    ok = abs(admissible - linear) <= UPPER_BOUND_TOL * (1.0 + linear)
    return UpperBound(W_admissible=admissible, W_linear=linear, ok=ok)
