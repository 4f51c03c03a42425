# file: config/project_config.py

import os
import sys
from dotenv import load_dotenv
from logger import AppLogger


class ProjectConfig:
    def __init__(
        self,
        dotenv_path=".env",
        log_dir_env_var="DMTG_LOG_DIR",
        default_log_dir="logs",
        results_dir_env_var="DMTG_RESULTS_DIR",
        default_results_dir="results",
        workers_env_var="DMTG_WORKERS",
        default_workers=1,
        progress_env_var="DMTG_SHOW_PROGRESS",
    ):
        self._load_env(dotenv_path)
        self.logger = AppLogger().get_logger(self.__class__.__name__)

        self._check_python_version()

        self.log_dir = os.getenv(log_dir_env_var, default_log_dir)
        self.results_dir = os.getenv(results_dir_env_var, default_results_dir)
        self.workers = self._load_int(workers_env_var, default_workers, minimum=1)
        self.show_progress = os.getenv(progress_env_var, "0").strip().lower() in ("1", "true", "yes")

        self.logger.debug(
            f"Project settings: log_dir={self.log_dir}, results_dir={self.results_dir}, "
            f"workers={self.workers}, show_progress={self.show_progress}"
        )

    def _check_python_version(self):
        if sys.version_info < (3, 10):
            self.logger.error("❌ This project requires Python 3.10 or newer")
            sys.exit("This project requires Python 3.10 or newer")

    def _load_env(self, dotenv_path):
        # .env is optional; defaults cover every setting
        if os.path.isfile(dotenv_path):
            load_dotenv(dotenv_path)

    def _load_int(self, env_var, default, minimum=None):
        raw = os.getenv(env_var)
        if raw is None or raw.strip() == "":
            return default
        try:
            value = int(raw)
        except ValueError:
            self.logger.warning(f"⚠️ {env_var}={raw!r} is not an integer; using {default}")
            return default
        if minimum is not None and value < minimum:
            self.logger.warning(f"⚠️ {env_var}={value} below {minimum}; using {default}")
            return default
        return value

    def get_results_dir(self):
        return self.results_dir

    def get_workers(self):
        return self.workers

    def get_show_progress(self):
        return self.show_progress

    def get_logger(self, logger_name=None):
        if logger_name:
            return AppLogger().get_logger(logger_name)
        return AppLogger().get_logger(self.__class__.__name__)


# === Base class for all your project classes ===
class BaseConfigurable:
    """
    Any class inheriting from this gets:
    - self.config (global ProjectConfig)
    - self.logger (logger named after class)
    """
    def __init__(self):
        from config.project_config import CONFIG  # safe import
        self.config = CONFIG
        self.logger = CONFIG.get_logger(self.__class__.__name__)


# Global singleton config
CONFIG = ProjectConfig()
