from typing import Dict, Mapping

import numpy as np

from core.anisotropy import SymmetryClass, build_isotropic, bulk_modulus, lame_lambda
from core.homogenize import iso_closed_form, iso_inverse_form
from core.tensor_core import NotationConvention, StiffnessVoigt
from plugins.classes.Base_Class import Parameters, SymmetryClassPlugin


class IsotropicClass(SymmetryClassPlugin):
    """各向同性：(λ, μ) 或 (κ, μ)"""

    def __init__(self):
        super().__init__(SymmetryClass.ISOTROPIC, ("lambda", "mu"), specificity=0)

    def normalize_parameters(self, params: Parameters) -> Dict[str, float]:
        if isinstance(params, Mapping) and "lambda" not in params and "kappa" in params:
            if "mu" not in params:
                return super().normalize_parameters(params)
            mu = float(params["mu"])
            return {"lambda": lame_lambda(float(params["kappa"]), mu), "mu": mu}
        return super().normalize_parameters(params)

    def build(self, params: Parameters, conv: NotationConvention) -> StiffnessVoigt:
        p = self.normalize_parameters(params)
        return build_isotropic(p["lambda"], p["mu"], conv)

    def matches(self, Cv: StiffnessVoigt, tol: float) -> bool:
        if not self.zero_pattern_ok(Cv, tol):
            return False
        C = Cv.entries
        bound = tol * max(float(np.max(np.abs(C))), np.finfo(float).tiny)
        diag = np.diag(C)[:3]
        off = np.array([C[0, 1], C[0, 2], C[1, 2]])
        shears = np.diag(C)[3:]
        expected_shear = Cv.convention.shear_scale * (diag.mean() - off.mean()) / 2.0
        return bool(
            np.ptp(diag) <= bound
            and np.ptp(off) <= bound
            and np.max(np.abs(shears - expected_shear)) <= bound
        )

    def extract_parameters(self, Cv: StiffnessVoigt) -> Dict[str, float]:
        C = Cv.entries
        lam = float(np.mean([C[0, 1], C[0, 2], C[1, 2]]))
        mu = float(np.mean(np.diag(C)[3:])) / Cv.convention.shear_scale
        return {"lambda": lam, "mu": mu, "kappa": bulk_modulus(lam, mu)}

    def closed_form_macro(self, e_params: Parameters, micro_params: Parameters) -> Dict[str, float]:
        e = self.normalize_parameters(e_params)
        m = self.normalize_parameters(micro_params)
        kappa, mu = iso_closed_form(
            bulk_modulus(e["lambda"], e["mu"]), e["mu"],
            bulk_modulus(m["lambda"], m["mu"]), m["mu"],
        )
        return {"lambda": lame_lambda(kappa, mu), "mu": mu, "kappa": kappa}

    def closed_form_e(self, micro_params: Parameters, macro_params: Parameters) -> Dict[str, float]:
        m = self.normalize_parameters(micro_params)
        mac = self.normalize_parameters(macro_params)
        kappa, mu = iso_inverse_form(
            bulk_modulus(m["lambda"], m["mu"]), m["mu"],
            bulk_modulus(mac["lambda"], mac["mu"]), mac["mu"],
        )
        return {"lambda": lame_lambda(kappa, mu), "mu": mu, "kappa": kappa}
