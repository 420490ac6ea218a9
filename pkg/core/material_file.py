"""
材料文件与状态文件 (YAML)

材料文件示例：
    convention: voigt
    micro: {class: isotropic, kappa: 6, mu: 1}
    e:
      matrix: [[...6 个数...], ...6 行...]
    coupling: {class: isotropic, mu_c: 1}
    curvature:
      Le: {class: isotropic, lambda: 0, mu: 0.5}
      Lc: {matrix: [[2, 0, 0], [0, 2, 0], [0, 0, 2]]}
    mu: 1
    Lc: 0.1
    rho: 1
    Lc_hat: 1
    eta: [1, 1, 1]

张量可写为 class + 命名参数（或 parameters: 映射），也可写为原始 matrix；
两者同时出现时以 matrix 为准。未知键被忽略，因此报告输出可直接作为输入读回。
"""
import hashlib
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np
import yaml

from core.anisotropy import build_coupling, build_stiffness
from core.errors import MaterialFileError, MicromorphError
from core.homogenize import e_from_micro_macro
from core.material import InertiaSpec, KinematicState, RelaxedMaterial
from core.tensor_core import Coupling3, NotationConvention, StiffnessVoigt, convert_convention
from utils.logger import get_logger

logger = get_logger(__name__)

STIFFNESS_ROLES = ("micro", "e", "macro")
IGNORED_SPEC_KEYS = {"class", "matrix", "parameters", "detected_class"}


@dataclass(frozen=True, eq=False)
class MaterialFile:
    path: str
    digest: str
    convention: NotationConvention
    stiffness: Dict[str, StiffnessVoigt] = field(default_factory=dict)
    coupling: Optional[Coupling3] = None
    curv_e: Optional[StiffnessVoigt] = None
    curv_c: Optional[Coupling3] = None
    mu: float = 1.0
    Lc: float = 0.0
    inertia: Optional[InertiaSpec] = None

    @property
    def micro(self) -> Optional[StiffnessVoigt]:
        return self.stiffness.get("micro")

    @property
    def e(self) -> Optional[StiffnessVoigt]:
        return self.stiffness.get("e")

    @property
    def macro(self) -> Optional[StiffnessVoigt]:
        return self.stiffness.get("macro")

    def require(self, *roles: str) -> Tuple[StiffnessVoigt, ...]:
        missing = [role for role in roles if role not in self.stiffness]
        if missing:
            raise MaterialFileError(f"{self.path}: 该命令需要张量 {list(roles)}，缺少 {missing}")
        return tuple(self.stiffness[role] for role in roles)

    def to_material(self) -> RelaxedMaterial:
        """组装 RelaxedMaterial；缺少 e 但给出 macro 时经均质化反求"""
        Cmicro, = self.require("micro")
        Ce = self.e
        if Ce is None:
            if self.macro is None:
                raise MaterialFileError(f"{self.path}: 需要 e 或 macro 以确定 Ce")
            Ce = e_from_micro_macro(Cmicro, self.macro)
        kwargs: Dict[str, Any] = {}
        if self.curv_e is not None:
            kwargs["curv_e"] = self.curv_e
        if self.curv_c is not None:
            kwargs["curv_c"] = self.curv_c
        return RelaxedMaterial(
            Ce=Ce,
            Cmicro=Cmicro,
            Cc=self.coupling or Coupling3.zero(),
            mu=self.mu,
            Lc=self.Lc,
            inertia=self.inertia,
            **kwargs,
        )


def file_digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _read_yaml(path: str) -> Tuple[Dict[str, Any], str]:
    try:
        with open(path, 'rb') as f:
            data = f.read()
    except OSError as e:
        raise MaterialFileError(f"无法读取文件 {path}: {e}") from e
    try:
        doc = yaml.safe_load(data.decode('utf-8'))
    except (UnicodeDecodeError, yaml.YAMLError) as e:
        raise MaterialFileError(f"{path}: 解析失败: {e}") from e
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise MaterialFileError(f"{path}: 顶层必须是映射")
    return doc, file_digest(data)


def _matrix(value: Any, shape: Tuple[int, int], where: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise MaterialFileError(f"{where}: 矩阵含非数值元素") from e
    if arr.shape != shape:
        raise MaterialFileError(f"{where}: 矩阵应为 {shape[0]} 行 {shape[1]} 列，实际形状 {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise MaterialFileError(f"{where}: 矩阵含非有限值")
    return arr


def _named_parameters(spec: Mapping[str, Any], where: str) -> Dict[str, float]:
    nested = spec.get("parameters")
    source = nested if isinstance(nested, Mapping) else {
        k: v for k, v in spec.items() if k not in IGNORED_SPEC_KEYS
    }
    try:
        return {str(k): float(v) for k, v in source.items()}
    except (TypeError, ValueError) as e:
        raise MaterialFileError(f"{where}: 参数必须是数值: {e}") from e


def _has_class(spec: Mapping[str, Any]) -> bool:
    return "class" in spec and (
        "parameters" in spec or any(k not in IGNORED_SPEC_KEYS for k in spec)
    )


def parse_stiffness(spec: Any, conv: NotationConvention, where: str) -> StiffnessVoigt:
    if not isinstance(spec, Mapping):
        raise MaterialFileError(f"{where}: 应为映射 (class + 参数，或 matrix)")
    if "matrix" in spec:
        if _has_class(spec):
            logger.warning(f"{where}: 同时给出 matrix 与类参数，以 matrix 为准")
        return StiffnessVoigt.from_matrix(_matrix(spec["matrix"], (6, 6), where), conv)
    if "class" not in spec:
        raise MaterialFileError(f"{where}: 缺少 class 或 matrix")
    return build_stiffness(spec["class"], _named_parameters(spec, where), conv)


def parse_coupling(spec: Any, where: str) -> Coupling3:
    if not isinstance(spec, Mapping):
        raise MaterialFileError(f"{where}: 应为映射 (class + params，或 matrix)")
    if "matrix" in spec:
        if "class" in spec:
            logger.warning(f"{where}: 同时给出 matrix 与类参数，以 matrix 为准")
        return Coupling3.from_matrix(_matrix(spec["matrix"], (3, 3), where))
    if "class" not in spec:
        raise MaterialFileError(f"{where}: 缺少 class 或 matrix")
    if "params" in spec:
        params = spec["params"]
    elif "mu_c" in spec:
        params = [spec["mu_c"]]
    else:
        raise MaterialFileError(f"{where}: 缺少 params (或各向同性的 mu_c)")
    try:
        values = [float(v) for v in np.atleast_1d(params)]
    except (TypeError, ValueError) as e:
        raise MaterialFileError(f"{where}: params 必须是数值列表") from e
    return build_coupling(spec["class"], values)


def _scalar(doc: Mapping[str, Any], key: str, default: Optional[float], where: str) -> Optional[float]:
    if key not in doc:
        return default
    try:
        return float(doc[key])
    except (TypeError, ValueError) as e:
        raise MaterialFileError(f"{where}: {key} 必须是数值") from e


def _parse_inertia(doc: Mapping[str, Any], where: str) -> Optional[InertiaSpec]:
    rho = _scalar(doc, "rho", None, where)
    if rho is None:
        return None
    eta = doc.get("eta")
    if eta is not None:
        try:
            eta1, eta2, eta3 = (float(v) for v in eta)
        except (TypeError, ValueError) as e:
            raise MaterialFileError(f"{where}: eta 应为 3 个数值") from e
    else:
        eta1, eta2, eta3 = (_scalar(doc, f"eta{i}", 1.0, where) for i in (1, 2, 3))
    return InertiaSpec(
        rho=rho,
        Lc_hat=_scalar(doc, "Lc_hat", 0.0, where),
        eta1=eta1,
        eta2=eta2,
        eta3=eta3,
    )


def load_material_file(path: str, default_convention: NotationConvention = NotationConvention.VOIGT,
                       target_convention: Optional[NotationConvention] = None) -> MaterialFile:
    """
    读取材料文件
    矩阵按文件自身的记法解释；给出 target_convention 时全部转换到该记法
    """
    doc, digest = _read_yaml(path)
    try:
        conv = NotationConvention.parse(doc.get("convention", default_convention))
    except MicromorphError as e:
        raise MaterialFileError(f"{path}: {e}") from e

    stiffness = {
        role: parse_stiffness(doc[role], conv, f"{path}:{role}")
        for role in STIFFNESS_ROLES if doc.get(role) is not None
    }
    coupling = parse_coupling(doc["coupling"], f"{path}:coupling") if doc.get("coupling") is not None else None

    curvature = doc.get("curvature") or {}
    if not isinstance(curvature, Mapping):
        raise MaterialFileError(f"{path}:curvature 应为映射")
    curv_e = parse_stiffness(curvature["Le"], conv, f"{path}:curvature.Le") if curvature.get("Le") is not None else None
    curv_c = parse_coupling(curvature["Lc"], f"{path}:curvature.Lc") if curvature.get("Lc") is not None else None

    if target_convention is not None and target_convention is not conv:
        stiffness = {role: convert_convention(C, target_convention) for role, C in stiffness.items()}
        if curv_e is not None:
            curv_e = convert_convention(curv_e, target_convention)
        conv = target_convention

    material_file = MaterialFile(
        path=path,
        digest=digest,
        convention=conv,
        stiffness=stiffness,
        coupling=coupling,
        curv_e=curv_e,
        curv_c=curv_c,
        mu=_scalar(doc, "mu", 1.0, path),
        Lc=_scalar(doc, "Lc", 0.0, path),
        inertia=_parse_inertia(doc, path),
    )
    logger.debug(f"已读取材料文件 {path}: 张量 {sorted(stiffness)}，记法 {conv.value}")
    return material_file


@dataclass(frozen=True, eq=False)
class StateFile:
    path: str
    digest: str
    state: KinematicState
    u_dot: Optional[np.ndarray] = None


def load_state_file(path: str) -> StateFile:
    """状态文件：grad_u、P 必需，curl_P、P_dot、u_dot 可选"""
    doc, digest = _read_yaml(path)
    for key in ("grad_u", "P"):
        if key not in doc:
            raise MaterialFileError(f"{path}: 缺少 {key}")
    fields = {
        key: _matrix(doc[key], (3, 3), f"{path}:{key}")
        for key in ("grad_u", "P", "curl_P", "P_dot") if doc.get(key) is not None
    }
    u_dot = None
    if doc.get("u_dot") is not None:
        u_dot = np.array(_matrix([doc["u_dot"]], (1, 3), f"{path}:u_dot")[0])
    return StateFile(path=path, digest=digest, state=KinematicState(**fields), u_dot=u_dot)
