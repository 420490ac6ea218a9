from typing import Dict

import numpy as np

from core.anisotropy import SymmetryClass, build_cubic
from core.homogenize import cubic_closed_form, cubic_inverse_form
from core.tensor_core import NotationConvention, StiffnessVoigt
from plugins.classes.Base_Class import Parameters, SymmetryClassPlugin


class CubicClass(SymmetryClassPlugin):
    """立方：(κ, μ, μ*)，μ* 为剪切块模量"""

    def __init__(self):
        super().__init__(SymmetryClass.CUBIC, ("kappa", "mu", "mu_star"), specificity=1)

    def build(self, params: Parameters, conv: NotationConvention) -> StiffnessVoigt:
        p = self.normalize_parameters(params)
        return build_cubic(p["kappa"], p["mu"], p["mu_star"], conv)

    def matches(self, Cv: StiffnessVoigt, tol: float) -> bool:
        if not self.zero_pattern_ok(Cv, tol):
            return False
        C = Cv.entries
        bound = tol * max(float(np.max(np.abs(C))), np.finfo(float).tiny)
        return bool(
            np.ptp(np.diag(C)[:3]) <= bound
            and np.ptp([C[0, 1], C[0, 2], C[1, 2]]) <= bound
            and np.ptp(np.diag(C)[3:]) <= bound
        )

    def extract_parameters(self, Cv: StiffnessVoigt) -> Dict[str, float]:
        C = Cv.entries
        diag = float(np.mean(np.diag(C)[:3]))
        off = float(np.mean([C[0, 1], C[0, 2], C[1, 2]]))
        return {
            "kappa": (diag + 2.0 * off) / 3.0,
            "mu": (diag - off) / 2.0,
            "mu_star": float(np.mean(np.diag(C)[3:])) / Cv.convention.shear_scale,
        }

    def closed_form_macro(self, e_params: Parameters, micro_params: Parameters) -> Dict[str, float]:
        e = self.normalize_parameters(e_params)
        m = self.normalize_parameters(micro_params)
        values = cubic_closed_form(e["kappa"], e["mu"], e["mu_star"], m["kappa"], m["mu"], m["mu_star"])
        return dict(zip(self.parameter_names, values))

    def closed_form_e(self, micro_params: Parameters, macro_params: Parameters) -> Dict[str, float]:
        m = self.normalize_parameters(micro_params)
        mac = self.normalize_parameters(macro_params)
        values = cubic_inverse_form(m["kappa"], m["mu"], m["mu_star"], mac["kappa"], mac["mu"], mac["mu_star"])
        return dict(zip(self.parameter_names, values))
