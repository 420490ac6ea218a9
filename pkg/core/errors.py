"""
异常定义
exit_code: 1 表示领域校验失败，2 表示解析/用法错误
"""
from typing import List, Optional, Tuple


class MicromorphError(ValueError):
    """所有领域异常的基类"""
    exit_code = 1


class InvalidParameterError(MicromorphError):
    pass


class ParameterCountError(InvalidParameterError):
    pass


class SymmetryViolationError(MicromorphError):
    """对称性校验失败，offending 记录超差的下标对 (1 起始)"""

    def __init__(self, message: str, offending: Optional[List[Tuple[int, int]]] = None):
        super().__init__(message)
        self.offending = offending or []


class NotPositiveDefiniteError(MicromorphError):
    def __init__(self, message: str, min_eig: float = float("nan")):
        super().__init__(message)
        self.min_eig = min_eig


class SingularInputError(NotPositiveDefiniteError):
    pass


class ConventionMismatchError(MicromorphError):
    pass


class StiffnessExceedsMicroError(MicromorphError):
    pass


class MicroEqualsMacroError(MicromorphError):
    pass


class UnsupportedMaterialError(MicromorphError):
    pass


class InsufficientSamplesError(MicromorphError):
    pass


class EigenSolverError(MicromorphError):
    def __init__(self, message: str, k: Optional[float] = None):
        super().__init__(message)
        self.k = k


class InvalidMaterialError(MicromorphError):
    pass


class MaterialFileError(MicromorphError):
    """材料文件/状态文件无法解析"""
    exit_code = 2
