"""
命令行入口
validate | homogenize | invert | classify | project-coupling | energy | dispersion | oned-demo
退出码：0 成功，1 领域校验失败，2 解析/用法错误
"""
import argparse
import hashlib
import sys
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from core.anisotropy import (
    SymmetryClass,
    check_positive_definite,
    class_parameters,
    classify_coupling,
    classify_stiffness,
)
from core.config_manager import ConfigManager
from core.coupling import CouplingMean, couple_modulus, project_coupling
from core.dynamics import acoustic_slopes, dispersion_sweep, long_wavelength_speeds
from core.energy import energy_contributions, kinetic_density, relaxed_stress, upper_bound_check
from core.errors import (
    InsufficientSamplesError,
    InvalidParameterError,
    MaterialFileError,
    MicromorphError,
    SymmetryViolationError,
)
from core.homogenize import e_from_micro_macro, macro_from_micro_e
from core.material_file import MaterialFile, load_material_file, load_state_file
from core.oned import OneDProblem, PBoundary, lc_sweep
from core.plugin_system import get_class_registry
from core.report import Report
from core.tensor_core import NotationConvention, StiffnessVoigt
from utils.logger import get_logger, set_log_level

logger = get_logger(__name__)

TABLE_COMMANDS = ("dispersion", "oned-demo")


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"应为逗号分隔的数值列表: {text}")


def _direction(text: str) -> List[float]:
    values = _float_list(text)
    if len(values) != 3:
        raise argparse.ArgumentTypeError(f"方向应为 3 个分量: {text}")
    return values


class CommandLine:
    """命令分发器"""

    def __init__(self, config_manager: Optional[ConfigManager] = None):
        self.config_manager = config_manager or ConfigManager(None)
        self.parser = self._build_parser()
        self.commands: Dict[str, Callable[[argparse.Namespace], Report]] = {
            "validate": self.cmd_validate,
            "homogenize": self.cmd_homogenize,
            "invert": self.cmd_invert,
            "classify": self.cmd_classify,
            "project-coupling": self.cmd_project_coupling,
            "energy": self.cmd_energy,
            "dispersion": self.cmd_dispersion,
            "oned-demo": self.cmd_oned,
        }

    # --- 参数解析 ---

    def _common_options(self) -> argparse.ArgumentParser:
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--convention", choices=[c.value for c in NotationConvention], default=argparse.SUPPRESS,
                            help="输出矩阵使用的记法 (默认沿用文件或配置)")
        common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="对称类识别的相对容差")
        common.add_argument("--output", choices=["csv", "text"], default=argparse.SUPPRESS, help="输出格式")
        common.add_argument("--config", default=argparse.SUPPRESS, help="配置文件路径")
        common.add_argument("--log-level", dest="log_level", default=argparse.SUPPRESS,
                            choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])
        common.add_argument("--workers", type=int, default=argparse.SUPPRESS, help="并行线程数")
        return common

    def _build_parser(self) -> argparse.ArgumentParser:
        common = self._common_options()
        parser = argparse.ArgumentParser(prog="micromorph", description="各向异性松弛微形态弹性计算工具",
                                         parents=[common])
        sub = parser.add_subparsers(dest="command", required=True)

        for name, help_text in (
            ("validate", "检查对称性、正定性与对称类"),
            ("homogenize", "由 micro 与 e 计算 macro"),
            ("invert", "由 micro 与 macro 反求 e"),
            ("classify", "识别各张量的对称类与类参数"),
        ):
            cmd = sub.add_parser(name, help=help_text, parents=[common])
            cmd.add_argument("file", help="材料文件 (YAML)")

        cmd = sub.add_parser("project-coupling", help="转动耦合张量的各向同性投影", parents=[common])
        cmd.add_argument("file")
        cmd.add_argument("--mean", choices=[m.value for m in CouplingMean], default=CouplingMean.ARITHM.value)

        cmd = sub.add_parser("energy", help="逐点能量与应力", parents=[common])
        cmd.add_argument("file")
        cmd.add_argument("state", help="运动学状态文件 (YAML)")

        cmd = sub.add_parser("dispersion", help="平面波色散曲线 (CSV)", parents=[common])
        cmd.add_argument("file")
        cmd.add_argument("--direction", type=_direction, default=[1.0, 0.0, 0.0])
        cmd.add_argument("--kmax", type=float, default=None)
        cmd.add_argument("--n", type=int, default=None)

        cmd = sub.add_parser("oned-demo", help="一维模型等效模量随 Lc 的变化 (CSV)", parents=[common])
        cmd.add_argument("--mu-e", dest="mu_e", type=float, required=True)
        cmd.add_argument("--mu-micro", dest="mu_micro", type=float, required=True)
        cmd.add_argument("--mu", type=float, default=1.0)
        cmd.add_argument("--lc-list", dest="lc_list", type=_float_list, default=[0.0])
        cmd.add_argument("--cells", type=int, default=None)
        cmd.add_argument("--p-boundary", dest="p_boundary", choices=[b.value for b in PBoundary],
                         default=PBoundary.FREE.value)
        return parser

    # --- 公共工具 ---

    def _tol(self, args: argparse.Namespace) -> float:
        tol = getattr(args, "tol", None)
        if tol is None:
            return self.config_manager.get_classify_tol()
        if not tol > 0:
            raise InvalidParameterError(f"--tol 必须为正: {tol}")
        return tol

    def _workers(self, args: argparse.Namespace) -> int:
        workers = getattr(args, "workers", None)
        if workers is None:
            return self.config_manager.get_max_workers()
        if workers < 1:
            raise InvalidParameterError(f"--workers 必须为正整数: {workers}")
        return workers

    def _output(self, args: argparse.Namespace) -> str:
        if hasattr(args, "output"):
            return args.output
        if args.command in TABLE_COMMANDS:
            return "csv"
        return self.config_manager.get_output()

    def _load(self, args: argparse.Namespace, report: Report) -> MaterialFile:
        target = NotationConvention.parse(args.convention) if hasattr(args, "convention") else None
        mf = load_material_file(args.file, self.config_manager.get_convention(), target)
        report.add_input(mf.path, mf.digest)
        return mf

    def _tensor_section(self, C: StiffnessVoigt, tol: float) -> Dict[str, Any]:
        cls = classify_stiffness(C, tol)
        section: Dict[str, Any] = {"matrix": C.entries, "detected_class": cls.value}
        params = class_parameters(C, cls)
        if params is not None:
            section["parameters"] = params
        return section

    def _closed_form_check(self, method: str, first: StiffnessVoigt, second: StiffnessVoigt,
                           result: StiffnessVoigt, tol: float) -> Optional[Dict[str, Any]]:
        """两个输入属于同一对称类时，用类闭式解交叉验证一般 6x6 结果"""
        cls = classify_stiffness(first, tol)
        if cls is SymmetryClass.TRICLINIC or classify_stiffness(second, tol) is not cls:
            return None
        plugin = get_class_registry().get_plugin(cls)
        if plugin is None:
            return None
        closed = getattr(plugin, method)(plugin.extract_parameters(first), plugin.extract_parameters(second))
        general = plugin.extract_parameters(result)
        deviation = max(abs(closed[k] - general[k]) for k in closed if k in general)
        return {"class": cls.value, "parameters": closed, "max_deviation": deviation}

    @staticmethod
    def _warn_extra_roles(mf: MaterialFile, used: List[str]) -> None:
        extra = [role for role in mf.stiffness if role not in used]
        if extra:
            logger.warning(f"文件同时给出 {sorted(mf.stiffness)}，本命令忽略 {extra}")

    # --- 命令 ---

    def cmd_validate(self, args: argparse.Namespace) -> Report:
        report = Report(command="validate")
        try:
            mf = self._load(args, report)
        except SymmetryViolationError as e:
            with open(args.file, 'rb') as f:
                report.add_input(args.file, hashlib.sha256(f.read()).hexdigest())
            report.diagnostics = {"valid": False, "error": str(e), "offending": [list(p) for p in e.offending]}
            report.status = e.exit_code
            return report

        tol = self._tol(args)
        tensors: Dict[str, Any] = {}
        valid = True
        for role, C in mf.stiffness.items():
            check = check_positive_definite(C.entries, "strict")
            valid &= check.ok
            tensors[role] = {"symmetric": True, "pd_mode": "strict", "positive_definite": check.ok,
                             "min_eig": check.min_eig, "class": classify_stiffness(C, tol).value}
        if mf.curv_e is not None:
            check = check_positive_definite(mf.curv_e.entries, "semi")
            valid &= check.ok
            tensors["curvature.Le"] = {"symmetric": True, "pd_mode": "semi", "positive_definite": check.ok,
                                       "min_eig": check.min_eig, "class": classify_stiffness(mf.curv_e, tol).value}
        for role, Cc in (("coupling", mf.coupling), ("curvature.Lc", mf.curv_c)):
            if Cc is None:
                continue
            check = check_positive_definite(Cc.entries, "semi")
            valid &= check.ok
            entry = {"symmetric": True, "pd_mode": "semi", "positive_definite": check.ok,
                     "min_eig": check.min_eig, "class": classify_coupling(Cc, tol).value}
            if role == "coupling" and not np.any(Cc.entries):
                entry["note"] = "non-redundant (Cc=0)"
            tensors[role] = entry

        report.diagnostics["tensors"] = tensors
        if mf.micro is not None and mf.macro is not None:
            stiffer = check_positive_definite(mf.micro.entries - mf.macro.entries, "strict").ok
            report.diagnostics["smaller_is_stiffer"] = stiffer
            valid &= stiffer
        if mf.micro is not None and mf.e is not None:
            problems = mf.to_material().problems()
            if problems:
                report.diagnostics["material_problems"] = problems
                valid = False
        report.diagnostics["valid"] = bool(valid)
        report.status = 0 if valid else 1
        return report

    def cmd_homogenize(self, args: argparse.Namespace) -> Report:
        report = Report(command="homogenize")
        mf = self._load(args, report)
        Cmicro, Ce = mf.require("micro", "e")
        self._warn_extra_roles(mf, ["micro", "e"])
        tol = self._tol(args)

        result = macro_from_micro_e(Cmicro, Ce)
        report.results = {
            "convention": mf.convention,
            "micro": self._tensor_section(Cmicro, tol),
            "macro": self._tensor_section(result.macro, tol),
        }
        report.diagnostics = {
            "symmetric_ok": result.symmetric_ok,
            "spd_ok": result.spd_ok,
            "harmonic_residual": result.harmonic_residual,
            "smaller_is_stiffer": check_positive_definite(Cmicro.entries - result.macro.entries, "strict").ok,
        }
        closed = self._closed_form_check("closed_form_macro", Ce, Cmicro, result.macro, tol)
        if closed is not None:
            report.diagnostics["closed_form"] = closed
        report.status = 0 if result.symmetric_ok and result.spd_ok else 1
        return report

    def cmd_invert(self, args: argparse.Namespace) -> Report:
        report = Report(command="invert")
        mf = self._load(args, report)
        Cmicro, Cmacro = mf.require("micro", "macro")
        self._warn_extra_roles(mf, ["micro", "macro"])
        tol = self._tol(args)

        Ce = e_from_micro_macro(Cmicro, Cmacro)
        back = macro_from_micro_e(Cmicro, Ce).macro
        report.results = {
            "convention": mf.convention,
            "micro": self._tensor_section(Cmicro, tol),
            "e": self._tensor_section(Ce, tol),
        }
        report.diagnostics = {
            "round_trip_residual": float(np.linalg.norm(back.entries - Cmacro.entries) / np.linalg.norm(Cmacro.entries)),
        }
        closed = self._closed_form_check("closed_form_e", Cmicro, Cmacro, Ce, tol)
        if closed is not None:
            report.diagnostics["closed_form"] = closed
        return report

    def cmd_classify(self, args: argparse.Namespace) -> Report:
        report = Report(command="classify")
        mf = self._load(args, report)
        tol = self._tol(args)
        classes: Dict[str, Any] = {}
        for role, C in mf.stiffness.items():
            section = self._tensor_section(C, tol)
            section.pop("matrix")
            classes[role] = section
        if mf.curv_e is not None:
            section = self._tensor_section(mf.curv_e, tol)
            section.pop("matrix")
            classes["curvature.Le"] = section
        for role, Cc in (("coupling", mf.coupling), ("curvature.Lc", mf.curv_c)):
            if Cc is not None:
                classes[role] = {"detected_class": classify_coupling(Cc, tol).value}
        report.results = {"convention": mf.convention, "classes": classes}
        return report

    def cmd_project_coupling(self, args: argparse.Namespace) -> Report:
        report = Report(command=f"project-coupling --mean {args.mean}")
        mf = self._load(args, report)
        if mf.coupling is None:
            raise MaterialFileError(f"{args.file}: 缺少 coupling")
        projected = project_coupling(mf.coupling, args.mean)
        report.results = {
            "mean": args.mean,
            "coupling": {"matrix": projected.entries},
            "mu_c": couple_modulus(projected),
        }
        report.diagnostics = {"input_class": classify_coupling(mf.coupling, self._tol(args)).value}
        return report

    def cmd_energy(self, args: argparse.Namespace) -> Report:
        report = Report(command="energy")
        mf = self._load(args, report)
        state_file = load_state_file(args.state)
        report.add_input(state_file.path, state_file.digest)

        material = mf.to_material()
        state = state_file.state
        parts = energy_contributions(material, state)
        bound = upper_bound_check(material, state.grad_u)
        report.results = {
            "energy": {**parts._asdict(), "total": parts.total},
            "stress": relaxed_stress(material, state.grad_u, state.P),
        }
        if material.inertia is not None:
            report.results["kinetic"] = kinetic_density(material.inertia, state.P_dot, state_file.u_dot)
        report.diagnostics = {"upper_bound": bound._asdict()}
        report.status = 0 if bound.ok else 1
        return report

    def cmd_dispersion(self, args: argparse.Namespace) -> Report:
        report = Report(command="dispersion")
        mf = self._load(args, report)
        material = mf.to_material()
        k_max = args.kmax if args.kmax is not None else self.config_manager.get_dispersion_k_max()
        n_points = args.n if args.n is not None else self.config_manager.get_dispersion_n_points()

        branches = dispersion_sweep(material, None, args.direction, k_max, n_points, max_workers=self._workers(args))
        k_values = branches[0].k_values
        report.table_header = ["k"] + [f"omega_{b.branch_index + 1}" for b in branches]
        report.table = [[k] + [b.omega_values[i] for b in branches] for i, k in enumerate(k_values)]

        report.diagnostics["long_wavelength"] = long_wavelength_speeds(material)._asdict()
        window = min(k_max, 0.01 / material.inertia.Lc_hat)
        try:
            report.diagnostics["acoustic_slopes"] = {"k_window": window, **acoustic_slopes(branches, window)._asdict()}
        except InsufficientSamplesError as e:
            report.diagnostics["acoustic_slopes"] = {"k_window": window, "error": str(e)}
        return report

    def cmd_oned(self, args: argparse.Namespace) -> Report:
        report = Report(command="oned-demo")
        n_cells = args.cells if args.cells is not None else self.config_manager.get_oned_n_cells()
        template = OneDProblem(mu_e=args.mu_e, mu_micro=args.mu_micro, mu=args.mu, n_cells=n_cells,
                               p_boundary=PBoundary(args.p_boundary))
        rows = lc_sweep(template, args.lc_list, max_workers=self._workers(args))
        report.table_header = ["Lc", "mu_eff"]
        report.table = [list(row) for row in rows]
        report.diagnostics = {"harmonic_modulus": template.harmonic_modulus, "p_boundary": template.p_boundary}
        return report

    # --- 执行 ---

    def run(self, argv: Optional[List[str]] = None) -> int:
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as e:
            return e.code if isinstance(e.code, int) else 2

        if hasattr(args, "log_level"):
            set_log_level(args.log_level)

        handler = self.commands[args.command]
        try:
            report = handler(args)
        except MicromorphError as e:
            logger.error(f"{args.command} 失败: {e}")
            return e.exit_code
        except Exception as e:
            logger.error(f"{args.command} 出现未预期的错误: {e}", exc_info=True)
            return 1

        sys.stdout.write(report.render(self._output(args)))
        sys.stdout.flush()
        return report.status
