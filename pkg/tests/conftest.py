import os

import numpy as np
import pytest

from core.config_manager import ConfigManager
from core.plugin_system import get_class_registry
from core.tensor_core import NotationConvention, StiffnessVoigt

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
MATERIALS_DIR = os.path.join(PROJECT_ROOT, "materials")
CONFIG_PATH = os.path.join(PROJECT_ROOT, "config.yaml")

CORPUS_SIZE = 1000


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture(scope="session")
def registry():
    return get_class_registry()


@pytest.fixture
def config_manager():
    return ConfigManager(CONFIG_PATH)


@pytest.fixture
def material_path():
    def _path(name: str) -> str:
        return os.path.join(MATERIALS_DIR, name)
    return _path


@pytest.fixture
def random_spd():
    """n×n 对称正定矩阵，条件数适中"""
    def _make(rng, n: int = 6, shift: float = 1.0) -> np.ndarray:
        A = rng.standard_normal((n, n))
        return A @ A.T + shift * n * np.eye(n)
    return _make


@pytest.fixture
def random_stiffness(random_spd):
    def _make(rng, conv: NotationConvention = NotationConvention.VOIGT) -> StiffnessVoigt:
        return StiffnessVoigt(random_spd(rng), conv)
    return _make
