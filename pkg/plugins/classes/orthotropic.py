from typing import Dict, Tuple

import numpy as np

from core.anisotropy import SymmetryClass, build_orthotropic
from core.homogenize import ortho_closed_form, ortho_inverse_form
from core.tensor_core import NotationConvention, StiffnessVoigt
from plugins.classes.Base_Class import Parameters, SymmetryClassPlugin

ORTHO_NAMES = ("C11", "C22", "C33", "C12", "C13", "C23", "C44", "C55", "C66")


def _split(p: Dict[str, float]) -> Tuple[np.ndarray, np.ndarray]:
    block = np.array([
        [p["C11"], p["C12"], p["C13"]],
        [p["C12"], p["C22"], p["C23"]],
        [p["C13"], p["C23"], p["C33"]],
    ])
    return block, np.array([p["C44"], p["C55"], p["C66"]])


def _join(block: np.ndarray, shears: np.ndarray) -> Dict[str, float]:
    values = [block[0, 0], block[1, 1], block[2, 2], block[0, 1], block[0, 2], block[1, 2], *shears]
    return {name: float(v) for name, v in zip(ORTHO_NAMES, values)}


class OrthotropicClass(SymmetryClassPlugin):
    """正交各向异性：9 个 Voigt 工程常数，Mandel 下剪切项按 4/c² 缩放"""

    def __init__(self):
        super().__init__(SymmetryClass.ORTHOTROPIC, ORTHO_NAMES, specificity=2)

    def build(self, params: Parameters, conv: NotationConvention) -> StiffnessVoigt:
        p = self.normalize_parameters(params)
        return build_orthotropic([p[name] for name in ORTHO_NAMES], conv)

    def matches(self, Cv: StiffnessVoigt, tol: float) -> bool:
        return self.zero_pattern_ok(Cv, tol)

    def extract_parameters(self, Cv: StiffnessVoigt) -> Dict[str, float]:
        C = Cv.entries
        return _join(C[:3, :3], np.diag(C)[3:] / Cv.convention.shear_scale)

    def closed_form_macro(self, e_params: Parameters, micro_params: Parameters) -> Dict[str, float]:
        e_block, e_shears = _split(self.normalize_parameters(e_params))
        m_block, m_shears = _split(self.normalize_parameters(micro_params))
        return _join(*ortho_closed_form(e_block, e_shears, m_block, m_shears))

    def closed_form_e(self, micro_params: Parameters, macro_params: Parameters) -> Dict[str, float]:
        m_block, m_shears = _split(self.normalize_parameters(micro_params))
        mac_block, mac_shears = _split(self.normalize_parameters(macro_params))
        return _join(*ortho_inverse_form(m_block, m_shears, mac_block, mac_shears))
