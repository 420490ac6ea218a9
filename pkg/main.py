#!/usr/bin/env python3
"""
各向异性松弛微形态弹性计算工具主程序
用法: python main.py [--config config.yaml] <命令> [参数]
"""

import argparse
import os
import sys
from typing import List, Optional

from utils.logger import setup_logging, get_logger
from core.config_manager import ConfigManager
from core.plugin_system import get_class_registry, resolve_plugin_dir
from core.cli import CommandLine

CONFIG_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'config.yaml')


class MicromorphApplication:
    """命令行应用程序"""

    def __init__(self, config_path: str = CONFIG_PATH):
        self.config_path = config_path
        self.config_manager: Optional[ConfigManager] = None
        self.logger = None
        self.running = False

    def setup_logging(self) -> None:
        """设置日志系统"""
        if self.config_manager:
            log_level = self.config_manager.get_log_level()
            log_dir = self.config_manager.get_log_dir()
            log_to_file = self.config_manager.is_log_to_file()
        else:
            log_level = os.environ.get('LOG_LEVEL', 'INFO')
            log_dir, log_to_file = "logs", False
        setup_logging(log_level=log_level, log_dir=log_dir, log_to_file=log_to_file)
        self.logger = get_logger(__name__)

    def initialize(self) -> bool:
        """加载配置、日志与对称类插件；配置无效时返回 False"""
        self.config_manager = ConfigManager(self.config_path)
        errors = self.config_manager.validate_config()
        self.setup_logging()
        if errors:
            for error in errors:
                self.logger.error(f"配置错误: {error}")
            return False

        plugin_dir = resolve_plugin_dir(self.config_manager.get_class_plugin_dir())
        registry = get_class_registry(plugin_dir)
        self.logger.debug(f"已加载对称类插件: {registry.get_plugin_status()}")
        return True

    def run(self, argv: Optional[List[str]] = None) -> int:
        """执行一条命令并返回退出码"""
        try:
            if not self.initialize():
                return 2
            self.running = True
            return CommandLine(self.config_manager).run(argv)
        except KeyboardInterrupt:
            self.logger.info("接收到停止信号...")
            return 1
        finally:
            self.shutdown()

    def shutdown(self) -> None:
        if not self.running:
            return
        self.running = False
        self.logger.debug("命令执行结束")


def main(argv: Optional[List[str]] = None) -> int:
    # 先取出 --config，其余参数交给命令解析器
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=CONFIG_PATH)
    known, _ = pre.parse_known_args(argv)
    return MicromorphApplication(known.config).run(argv)


if __name__ == "__main__":
    sys.exit(main())
