"""
配置管理器 (YAML)
所有配置位于 program: 段，缺少配置文件时使用内置默认值
"""
import os
import threading
from typing import Any, Dict, List, Optional

import yaml

from core.tensor_core import NotationConvention
from utils.logger import get_logger

logger = get_logger(__name__)

DEFAULTS: Dict[str, Any] = {
    "log_level": "INFO",
    "log_dir": "logs",
    "log_to_file": True,
    "class_plugin_dir": "plugins/classes",
    "convention": "voigt",
    "classify_tol": 1e-9,
    "output": "text",
    "max_workers": 4,
    "dispersion": {"k_max": 1.0, "n_points": 200},
    "oned": {"n_cells": 2000},
}

VALID_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
VALID_OUTPUTS = ("text", "csv")


class ConfigManager:
    def __init__(self, config_path: Optional[str] = 'config.yaml'):
        self.config_path = config_path
        self.config: Dict[str, Any] = {}
        self.config_lock = threading.Lock()
        self.load_config()

    def load_config(self):
        with self.config_lock:
            if not self.config_path or not os.path.exists(self.config_path):
                logger.warning(f"配置文件不存在，使用默认配置: {self.config_path}")
                self.config = {}
                return
            try:
                with open(self.config_path, 'r', encoding='utf-8') as f:
                    self.config = yaml.safe_load(f) or {}
                logger.debug(f"成功加载配置: {self.config_path}")
            except Exception as e:
                logger.error(f"加载配置失败: {e}")
                raise

    def get_program_config(self) -> Dict[str, Any]:
        program = self.config.get("program") or {}
        return program if isinstance(program, dict) else {}

    def _get(self, key: str) -> Any:
        return self.get_program_config().get(key, DEFAULTS[key])

    def _get_section(self, section: str, key: str) -> Any:
        values = self.get_program_config().get(section) or {}
        if not isinstance(values, dict):
            return DEFAULTS[section][key]
        return values.get(key, DEFAULTS[section][key])

    def validate_config(self) -> List[str]:
        """验证配置文件的有效性"""
        errors = []
        if "program" in self.config and not isinstance(self.config["program"], dict):
            errors.append("program 段必须是映射")
            return errors

        if str(self.get_log_level()).upper() not in VALID_LOG_LEVELS:
            errors.append(f"log_level 无效: {self.get_log_level()}")
        try:
            NotationConvention.parse(self._get("convention"))
        except ValueError as e:
            errors.append(str(e))
        if self.get_output() not in VALID_OUTPUTS:
            errors.append(f"output 必须是 {VALID_OUTPUTS} 之一: {self.get_output()}")

        checks = [
            ("classify_tol", self._get("classify_tol"), float, lambda v: v > 0),
            ("max_workers", self._get("max_workers"), int, lambda v: v >= 1),
            ("dispersion.k_max", self._get_section("dispersion", "k_max"), float, lambda v: v > 0),
            ("dispersion.n_points", self._get_section("dispersion", "n_points"), int, lambda v: v >= 2),
            ("oned.n_cells", self._get_section("oned", "n_cells"), int, lambda v: v >= 8),
        ]
        for name, value, kind, ok in checks:
            try:
                if not ok(kind(value)):
                    errors.append(f"{name} 超出范围: {value}")
            except (TypeError, ValueError):
                errors.append(f"{name} 不是有效的数值: {value}")
        return errors

    # --- Getters ---
    def get_log_level(self) -> str:
        return self._get("log_level")

    def get_log_dir(self) -> str:
        return self._get("log_dir")

    def is_log_to_file(self) -> bool:
        return bool(self._get("log_to_file"))

    def get_class_plugin_dir(self) -> str:
        return self._get("class_plugin_dir")

    def get_convention(self) -> NotationConvention:
        return NotationConvention.parse(self._get("convention"))

    def get_classify_tol(self) -> float:
        return float(self._get("classify_tol"))

    def get_output(self) -> str:
        return str(self._get("output")).lower()

    def get_max_workers(self) -> int:
        return int(self._get("max_workers"))

    def get_dispersion_k_max(self) -> float:
        return float(self._get_section("dispersion", "k_max"))

    def get_dispersion_n_points(self) -> int:
        return int(self._get_section("dispersion", "n_points"))

    def get_oned_n_cells(self) -> int:
        return int(self._get_section("oned", "n_cells"))
