import logging
import multiprocessing
import os
import sys
from logging.handlers import RotatingFileHandler

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - [%(run)s] %(message)s [in %(filename)s:%(lineno)d]"


class ColoredFormatter(logging.Formatter):
    COLORS = {
        "DEBUG": "\033[90m",   # light gray
        "INFO": "\033[97m",    # white
        "WARNING": "\033[93m", # yellow/orange
        "ERROR": "\033[91m",   # red
        "CRITICAL": "\033[41m" # red background
    }
    RESET = "\033[0m"

    def format(self, record):
        log_msg = super().format(record)
        color = self.COLORS.get(record.levelname, self.RESET)
        return f"{color}{log_msg}{self.RESET}"


class RunContextFilter(logging.Filter):
    """Stamps every record with the seed the current process is working on."""

    context = "main"

    def filter(self, record):
        record.run = RunContextFilter.context
        return True


def set_run_context(seed=None):
    """Tag subsequent log lines of this process with a seed; None resets to 'main'."""
    RunContextFilter.context = "main" if seed is None else f"seed {seed}"


class AppLogger:
    _initialized = False
    _base_logger_name = "dmtg_logger"

    def __init__(self, log_dir=None, log_file="dmtg.log", level=None):
        self.log_dir = log_dir or os.getenv("DMTG_LOG_DIR", "logs")
        self.log_file = log_file
        self.console_level = self._parse_level(level or os.getenv("DMTG_LOG_LEVEL", "DEBUG"))

        self.logger = logging.getLogger(self._base_logger_name)
        self.logger.setLevel(logging.DEBUG)
        # per-epoch DEBUG lines must not reach the root logger of embedding applications
        self.logger.propagate = False

        if not AppLogger._initialized:
            os.makedirs(self.log_dir, exist_ok=True)
            # workers append to the log the parent process started
            if multiprocessing.parent_process() is None:
                self._clear_log_file()
            self._setup_handlers()
            AppLogger._initialized = True

    @staticmethod
    def _parse_level(name):
        level = logging.getLevelName(str(name).upper())
        return level if isinstance(level, int) else logging.DEBUG

    def _clear_log_file(self):
        log_path = os.path.join(self.log_dir, self.log_file)
        try:
            with open(log_path, "w", encoding="utf-8"):
                pass
        except OSError as e:
            print(f"Warning: Could not clear log file '{log_path}': {e}", file=sys.stderr)

    def _setup_handlers(self):
        if self.logger.handlers:
            return
        context = RunContextFilter()

        # stdout carries report tables and check results, so the console log goes to stderr
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(self.console_level)
        console_handler.setFormatter(ColoredFormatter(LOG_FORMAT))
        console_handler.addFilter(context)
        self.logger.addHandler(console_handler)

        file_handler = RotatingFileHandler(
            os.path.join(self.log_dir, self.log_file),
            maxBytes=5 * 1024 * 1024,
            backupCount=3,
            encoding="utf-8",
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        file_handler.addFilter(context)
        self.logger.addHandler(file_handler)

    def get_logger(self, name=None):
        if name:
            return self.logger.getChild(name)
        return self.logger
