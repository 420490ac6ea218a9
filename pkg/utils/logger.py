import logging
import os
import glob
import sys
from datetime import datetime
from typing import Optional

# 全局 LogManager 实例，便于后续修改级别
_log_manager_instance = None

LOG_FORMAT = '%(asctime)s - [%(levelname)s] - %(name)s - %(message)s'
LOG_FILE_PREFIX = "Micromorph_"
KEEP_LOG_FILES = 10


class LogManager:
    """日志管理器：负责配置日志文件、清理旧日志和挂载处理器"""

    def __init__(self, log_level: str = "INFO", log_dir: str = "logs", log_to_file: bool = True):
        self.log_level = log_level
        self.log_dir = log_dir
        self.log_to_file = log_to_file
        self.current_log_file: Optional[str] = None

        if self.log_to_file:
            if not os.path.exists(log_dir):
                try:
                    os.makedirs(log_dir)
                except Exception as e:
                    print(f"[Logger] 创建日志目录失败: {e}", file=sys.stderr)
                    self.log_to_file = False

        if self.log_to_file:
            self._cleanup_old_logs()
            timestamp = datetime.now().strftime("%Y%m%d%H%M%S")
            self.current_log_file = os.path.join(log_dir, f"{LOG_FILE_PREFIX}{timestamp}.log")

        self._configure_root_logger()

    def _cleanup_old_logs(self):
        """清理旧日志文件，保留最新的 KEEP_LOG_FILES 个（含即将创建的一个）"""
        try:
            log_files = glob.glob(os.path.join(self.log_dir, f"{LOG_FILE_PREFIX}*.log"))
            log_files.sort(key=lambda x: os.path.getmtime(x), reverse=True)
            for log_file in log_files[KEEP_LOG_FILES - 1:]:
                try:
                    os.remove(log_file)
                except Exception:
                    pass
        except Exception as e:
            print(f"[Logger] 清理旧日志失败: {e}", file=sys.stderr)

    def _configure_root_logger(self):
        """配置根日志器。控制台输出走 stderr，stdout 只留给报告"""
        numeric_level = getattr(logging, self.log_level.upper(), logging.INFO)

        root_logger = logging.getLogger()
        root_logger.setLevel(numeric_level)

        formatter = logging.Formatter(LOG_FORMAT, datefmt='%Y-%m-%d %H:%M:%S')

        # 防止重复添加 Handler 导致日志重复打印
        if root_logger.hasHandlers():
            root_logger.handlers.clear()

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(numeric_level)
        console_handler.setFormatter(formatter)
        root_logger.addHandler(console_handler)

        if self.current_log_file:
            try:
                file_handler = logging.FileHandler(self.current_log_file, encoding='utf-8')
                file_handler.setLevel(numeric_level)
                file_handler.setFormatter(formatter)
                root_logger.addHandler(file_handler)
            except Exception as e:
                print(f"[Logger] 无法创建日志文件处理器: {e}", file=sys.stderr)
                self.current_log_file = None

    def set_level(self, level: str):
        """动态修改日志级别"""
        self.log_level = level
        numeric_level = getattr(logging, level.upper(), logging.INFO)
        root_logger = logging.getLogger()
        root_logger.setLevel(numeric_level)
        for handler in root_logger.handlers:
            handler.setLevel(numeric_level)


def get_logger(name: str) -> logging.Logger:
    """
    获取日志器
    轻量级：不创建文件，也不改动已有配置。
    """
    if len(logging.getLogger().handlers) == 0:
        logging.basicConfig(level=logging.INFO, format=LOG_FORMAT, datefmt='%H:%M:%S', stream=sys.stderr)
    return logging.getLogger(name)


def setup_logging(log_level: str = "INFO", log_dir: str = "logs", log_to_file: bool = True) -> LogManager:
    """
    初始化日志系统
    这是创建日志文件的唯一入口；重复调用只更新级别。
    """
    global _log_manager_instance

    if _log_manager_instance is not None:
        _log_manager_instance.set_level(log_level)
        return _log_manager_instance

    _log_manager_instance = LogManager(log_level, log_dir, log_to_file)
    return _log_manager_instance


def set_log_level(level: str) -> None:
    """修改日志级别；日志系统尚未初始化时只调整根日志器"""
    if _log_manager_instance is not None:
        _log_manager_instance.set_level(level)
        return
    numeric_level = getattr(logging, level.upper(), logging.INFO)
    logging.getLogger().setLevel(numeric_level)
