"""
Micromorph 插件系统
对称类插件的发现、加载与管理，新增对称类只需在插件目录放入文件
"""
import os
import sys
import importlib.util
import inspect
import threading
from abc import ABC
from typing import Any, Dict, List, Optional, Type

from core.anisotropy import SymmetryClass
from core.errors import InvalidParameterError
from utils.logger import get_logger

logger = get_logger(__name__)

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DEFAULT_CLASS_PLUGIN_DIR = os.path.join(PROJECT_ROOT, "plugins", "classes")


def resolve_plugin_dir(plugin_dir: str) -> str:
    """相对路径按项目根目录解析"""
    if os.path.isabs(plugin_dir):
        return plugin_dir
    return os.path.join(PROJECT_ROOT, plugin_dir)


class PluginLoader:
    """插件加载器基类"""

    def __init__(self, plugin_dir: str, base_class: Type[ABC]):
        self.plugin_dir = plugin_dir
        self.base_class = base_class
        self.loaded_plugins: Dict[Any, Any] = {}

    def discover_plugins(self) -> Dict[str, Type[ABC]]:
        """
        自动发现插件目录中的所有插件类
        返回: {插件文件名: 插件类}
        """
        plugins = {}

        if not os.path.exists(self.plugin_dir):
            logger.warning(f"插件目录不存在: {self.plugin_dir}")
            return plugins

        # 排序保证加载顺序与平台无关
        for filename in sorted(os.listdir(self.plugin_dir)):
            if filename.endswith('.py') and not filename.startswith('__') and filename != 'Base_Class.py':
                plugin_name = filename[:-3]
                plugin_path = os.path.join(self.plugin_dir, filename)

                try:
                    plugin_class = self._load_plugin_from_file(plugin_path, plugin_name)
                    if plugin_class:
                        plugins[plugin_name] = plugin_class
                        logger.debug(f"发现插件: {plugin_name}")
                except Exception as e:
                    logger.error(f"加载插件文件失败 {filename}: {e}")

        return plugins

    def _load_plugin_from_file(self, file_path: str, plugin_name: str) -> Optional[Type[ABC]]:
        """从Python文件中加载插件类"""
        try:
            # 插件以 plugins.<kind>.Base_Class 的绝对路径导入基类
            if PROJECT_ROOT not in sys.path:
                sys.path.insert(0, PROJECT_ROOT)

            spec = importlib.util.spec_from_file_location(plugin_name, file_path)
            if not spec or not spec.loader:
                logger.error(f"无法创建模块规范: {file_path}")
                return None

            module = importlib.util.module_from_spec(spec)
            module.__package__ = os.path.basename(os.path.dirname(file_path))
            spec.loader.exec_module(module)

            for name, obj in inspect.getmembers(module):
                if (inspect.isclass(obj) and
                    issubclass(obj, self.base_class) and
                    obj != self.base_class):

                    self._validate_plugin_class(obj)
                    return obj

            logger.warning(f"在文件 {file_path} 中未找到有效的插件类")
            return None

        except Exception as e:
            logger.error(f"加载插件文件失败 {file_path}: {e}")
            return None

    def _validate_plugin_class(self, plugin_class: Type[ABC]) -> bool:
        """验证插件类是否实现了所有必需的抽象方法"""
        missing = getattr(plugin_class, '__abstractmethods__', frozenset())
        if missing:
            raise ValueError(f"插件类 {plugin_class.__name__} 缺少必需的抽象方法: {sorted(missing)}")
        return True

    def load_plugins(self) -> Dict[Any, Any]:
        """
        加载所有发现的插件并创建实例
        返回: {插件标识: 插件实例}
        """
        discovered_plugins = self.discover_plugins()

        for plugin_name, plugin_class in discovered_plugins.items():
            try:
                plugin_instance = plugin_class()
                plugin_id = self._get_plugin_id(plugin_instance)
                if plugin_id is None:
                    logger.warning(f"插件 {plugin_name} 没有返回有效的标识符")
                    continue
                if plugin_id in self.loaded_plugins:
                    logger.warning(f"插件标识重复，忽略 {plugin_name}: {plugin_id}")
                    continue
                self.loaded_plugins[plugin_id] = plugin_instance
                logger.debug(f"成功加载插件: {plugin_name} -> {plugin_id}")

            except Exception as e:
                logger.error(f"实例化插件失败 {plugin_name}: {e}")

        return self.loaded_plugins

    def _get_plugin_id(self, plugin_instance: Any) -> Optional[Any]:
        """获取插件实例的标识符，子类需要重写此方法"""
        return None

    def get_plugin(self, plugin_id: Any) -> Optional[Any]:
        return self.loaded_plugins.get(plugin_id)

    def get_all_plugins(self) -> Dict[Any, Any]:
        return self.loaded_plugins.copy()

    def reload_plugins(self) -> Dict[Any, Any]:
        self.loaded_plugins.clear()
        return self.load_plugins()


class ClassPluginLoader(PluginLoader):
    """对称类插件加载器"""

    def __init__(self, plugin_dir: str = DEFAULT_CLASS_PLUGIN_DIR):
        if PROJECT_ROOT not in sys.path:
            sys.path.insert(0, PROJECT_ROOT)
        from plugins.classes.Base_Class import SymmetryClassPlugin
        super().__init__(plugin_dir, SymmetryClassPlugin)

    def _get_plugin_id(self, plugin_instance: Any) -> Optional[SymmetryClass]:
        """对称类插件以 symmetry_class 作为标识符"""
        return getattr(plugin_instance, 'symmetry_class', None)


class ClassPluginManager:
    """对称类插件管理器"""

    def __init__(self, plugin_dir: str = DEFAULT_CLASS_PLUGIN_DIR):
        self.plugin_dir = resolve_plugin_dir(plugin_dir)
        self.loader = ClassPluginLoader(self.plugin_dir)
        self.class_plugins: Dict[SymmetryClass, Any] = {}

    def load_all_plugins(self) -> Dict[str, Dict[str, Any]]:
        try:
            self.class_plugins = self.loader.load_plugins()
        except Exception as e:
            logger.error(f"加载对称类插件失败: {e}")
            return {"error": {"status": str(e)}}
        logger.debug(f"已加载对称类插件: {[cls.value for cls in self.class_plugins]}")
        return self.get_plugin_status()

    def reload_plugins(self) -> Dict[str, Dict[str, Any]]:
        logger.info("重新加载对称类插件...")
        self.class_plugins.clear()
        self.loader.loaded_plugins.clear()
        return self.load_all_plugins()

    def get_plugin(self, symmetry_class: SymmetryClass) -> Optional[Any]:
        return self.class_plugins.get(symmetry_class)

    def require(self, symmetry_class: SymmetryClass) -> Any:
        plugin = self.class_plugins.get(symmetry_class)
        if plugin is None:
            available = [cls.value for cls in self.class_plugins]
            raise InvalidParameterError(f"没有对称类 {symmetry_class.value} 的模板插件，可用: {available}")
        return plugin

    def ordered_plugins(self) -> List[Any]:
        """按具体程度排序：isotropic → cubic → orthotropic"""
        return sorted(self.class_plugins.values(), key=lambda p: p.specificity)

    def get_plugin_status(self) -> Dict[str, Dict[str, Any]]:
        return {
            plugin.symmetry_class.value: {
                "type": type(plugin).__name__,
                "parameters": list(plugin.parameter_names),
                "specificity": plugin.specificity,
            }
            for plugin in self.ordered_plugins()
        }


_class_registry: Optional[ClassPluginManager] = None
_registry_lock = threading.Lock()


def get_class_registry(plugin_dir: Optional[str] = None) -> ClassPluginManager:
    """获取全局对称类插件管理器（首次调用时加载）"""
    global _class_registry
    with _registry_lock:
        if _class_registry is None or (plugin_dir and resolve_plugin_dir(plugin_dir) != _class_registry.plugin_dir):
            manager = ClassPluginManager(plugin_dir or DEFAULT_CLASS_PLUGIN_DIR)
            manager.load_all_plugins()
            _class_registry = manager
        return _class_registry
