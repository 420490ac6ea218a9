from abc import ABC, abstractmethod
from typing import Dict, Mapping, Sequence, Tuple, Union

import numpy as np

from core.anisotropy import SymmetryClass
from core.errors import ParameterCountError
from core.tensor_core import NotationConvention, StiffnessVoigt
from utils.logger import get_logger

logger = get_logger(__name__)

Parameters = Union[Sequence[float], Mapping[str, float]]


class SymmetryClassPlugin(ABC):
    """对称类插件基类：模板构造、模式匹配、参数提取与闭式均质化"""

    def __init__(self, symmetry_class: SymmetryClass, parameter_names: Tuple[str, ...], specificity: int):
        self.symmetry_class = symmetry_class
        self.parameter_names = parameter_names
        # 数值越小越具体，分类时按此顺序尝试
        self.specificity = specificity
        logger.debug(f"对称类插件初始化: {symmetry_class.value}")

    def normalize_parameters(self, params: Parameters) -> Dict[str, float]:
        """
        将位置参数或命名参数统一为 {参数名: 值}
        子类可重写以接受等价的参数组合（如各向同性的 κ/μ）
        """
        if isinstance(params, Mapping):
            missing = [name for name in self.parameter_names if name not in params]
            if missing:
                raise ParameterCountError(f"{self.symmetry_class.value} 缺少参数: {missing}")
            return {name: float(params[name]) for name in self.parameter_names}
        values = list(params)
        if len(values) != len(self.parameter_names):
            raise ParameterCountError(
                f"{self.symmetry_class.value} 需要 {len(self.parameter_names)} 个参数 "
                f"{list(self.parameter_names)}，实际 {len(values)} 个"
            )
        return {name: float(v) for name, v in zip(self.parameter_names, values)}

    @staticmethod
    def zero_pattern_ok(Cv: StiffnessVoigt, tol: float) -> bool:
        """正交模板的零元：剪切-拉伸耦合块与剪切块非对角元"""
        C = Cv.entries
        bound = tol * max(float(np.max(np.abs(C))), np.finfo(float).tiny)
        shear_off = C[3:, 3:] - np.diag(np.diag(C[3:, 3:]))
        return bool(np.all(np.abs(C[:3, 3:]) <= bound) and np.all(np.abs(shear_off) <= bound))

    @abstractmethod
    def build(self, params: Parameters, conv: NotationConvention) -> StiffnessVoigt:
        """
        按模板构造 6x6 刚度
        返回: StiffnessVoigt
        """
        pass

    @abstractmethod
    def matches(self, Cv: StiffnessVoigt, tol: float) -> bool:
        """判断 Cv 是否在容差 tol·‖Cv‖∞ 内满足该类模板的零元与等式约束"""
        pass

    @abstractmethod
    def extract_parameters(self, Cv: StiffnessVoigt) -> Dict[str, float]:
        """从满足模板的矩阵读出命名参数"""
        pass

    @abstractmethod
    def closed_form_macro(self, e_params: Parameters, micro_params: Parameters) -> Dict[str, float]:
        """由 e 与 micro 的类参数给出 macro 类参数"""
        pass

    @abstractmethod
    def closed_form_e(self, micro_params: Parameters, macro_params: Parameters) -> Dict[str, float]:
        """由 micro 与 macro 的类参数反求 e 的类参数"""
        pass
