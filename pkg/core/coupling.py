"""
转动耦合张量的各向同性投影
算术平均 (Voigt 界)、几何/对数平均、调和平均 (Reuss 界)，均作用于 C̃_c 的特征值。
"""
from enum import Enum
from typing import Union

import numpy as np
import scipy.linalg

from core.errors import NotPositiveDefiniteError, SingularInputError
from core.tensor_core import Coupling3, symmetric_eigenvalues
from utils.logger import get_logger

logger = get_logger(__name__)

EIGEN_FLOOR = 1e-12


class CouplingMean(Enum):
    ARITHM = "arithm"
    LOG = "log"
    HARM = "harm"


def _eigen_floor(w: np.ndarray) -> float:
    return EIGEN_FLOOR * max(float(np.max(np.abs(w))), 0.0)


def iso_arithm(Cc: Coupling3) -> Coupling3:
    """(tr C̃_c / 3)·1"""
    return Coupling3(np.trace(Cc.entries) / 3.0 * np.eye(3))


def iso_log(Cc: Coupling3) -> Coupling3:
    """
    exp(tr log C̃_c / 3)·1 = det(C̃_c)^{1/3}·1
    存在不大于下限的特征值时退化为零矩阵
    """
    w = symmetric_eigenvalues(Cc.entries)
    floor = _eigen_floor(w)
    if w[0] < -floor:
        raise NotPositiveDefiniteError(f"几何平均要求半正定输入 (最小特征值 {w[0]:.6g})", float(w[0]))
    if w[0] <= floor:
        logger.debug("耦合矩阵存在零特征值，几何平均退化为零")
        return Coupling3.zero()
    log_mean = np.trace(np.real(scipy.linalg.logm(Cc.entries))) / 3.0
    return Coupling3(np.exp(log_mean) * np.eye(3))


def iso_harm(Cc: Coupling3) -> Coupling3:
    """[iso_arithm(C̃_c⁻¹)]⁻¹"""
    w, V = scipy.linalg.eigh(Cc.entries)
    if w[0] <= _eigen_floor(w):
        raise SingularInputError(f"调和平均要求严格正定输入 (最小特征值 {w[0]:.6g})", float(w[0]))
    inverse = Coupling3((V / w) @ V.T)
    mean_of_inverse = np.trace(inverse.entries) / 3.0
    return Coupling3(np.eye(3) / mean_of_inverse)


_PROJECTIONS = {
    CouplingMean.ARITHM: iso_arithm,
    CouplingMean.LOG: iso_log,
    CouplingMean.HARM: iso_harm,
}


def project_coupling(Cc: Coupling3, mean: Union[str, CouplingMean] = CouplingMean.ARITHM) -> Coupling3:
    mean = CouplingMean(mean) if not isinstance(mean, CouplingMean) else mean
    return _PROJECTIONS[mean](Cc)


def couple_modulus(Cc_iso: Coupling3) -> float:
    """各向同性 C̃_c = (μc/2)·1 对应的 Cosserat 耦合模量 μc"""
    return 2.0 * float(np.trace(Cc_iso.entries)) / 3.0
