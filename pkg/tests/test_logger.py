import logging
import os

import pytest

from utils import logger as log_module
from utils.logger import KEEP_LOG_FILES, LOG_FILE_PREFIX, get_logger, set_log_level, setup_logging


@pytest.fixture
def fresh_logging():
    root = logging.getLogger()
    saved_handlers, saved_level = list(root.handlers), root.level
    log_module._log_manager_instance = None
    yield
    for handler in root.handlers:
        if handler not in saved_handlers:
            handler.close()
    root.handlers[:] = saved_handlers
    root.setLevel(saved_level)
    log_module._log_manager_instance = None


def test_old_log_files_are_rotated(fresh_logging, tmp_path):
    for i in range(KEEP_LOG_FILES + 3):
        path = tmp_path / f"{LOG_FILE_PREFIX}2024010100{i:04d}.log"
        path.write_text("old\n", encoding="utf-8")
        os.utime(path, (1_000_000 + i, 1_000_000 + i))
    (tmp_path / "unrelated.log").write_text("keep\n", encoding="utf-8")

    manager = setup_logging(log_level="DEBUG", log_dir=str(tmp_path), log_to_file=True)
    get_logger("tests.logger").info("写入当前日志")

    kept = sorted(p.name for p in tmp_path.glob(f"{LOG_FILE_PREFIX}*.log"))
    assert len(kept) == KEEP_LOG_FILES
    assert os.path.basename(manager.current_log_file) in kept
    # 最旧的几个被删除
    assert f"{LOG_FILE_PREFIX}20240101000000.log" not in kept
    assert f"{LOG_FILE_PREFIX}2024010100{KEEP_LOG_FILES + 2:04d}.log" in kept
    assert (tmp_path / "unrelated.log").exists()


def test_setup_without_file_and_level_changes(fresh_logging, tmp_path):
    log_dir = tmp_path / "logs"
    manager = setup_logging(log_level="INFO", log_dir=str(log_dir), log_to_file=False)
    assert manager.current_log_file is None
    assert not log_dir.exists()

    assert setup_logging(log_level="WARNING") is manager
    assert logging.getLogger().level == logging.WARNING

    set_log_level("debug")
    assert logging.getLogger().level == logging.DEBUG
    assert all(h.level == logging.DEBUG for h in logging.getLogger().handlers)


def test_set_level_before_setup(fresh_logging):
    set_log_level("ERROR")
    assert logging.getLogger().level == logging.ERROR
