import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import Optional, Union

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class ColorFormatter(logging.Formatter):
    COLORS = {
        'DEBUG': '\033[94m',     # blue
        'INFO': '\033[92m',      # green
        'WARNING': '\033[93m',   # yellow
        'ERROR': '\033[91m',     # red
        'CRITICAL': '\033[91m',  # red
        'ENDC': '\033[0m',
    }

    def format(self, record):
        color = self.COLORS.get(record.levelname, self.COLORS['ENDC'])
        return f"{color}{super().format(record)}{self.COLORS['ENDC']}"


def setup_logging(log_level: Union[int, str] = logging.INFO, log_dir: Optional[str] = None,
                  color: Optional[bool] = None):
    """Configure the root logger: console on stderr, optional rotating files in log_dir"""
    if isinstance(log_level, str):
        log_level = logging.getLevelName(log_level.upper())
        if not isinstance(log_level, int):
            log_level = logging.INFO

    logger = logging.getLogger()
    logger.setLevel(log_level)

    if color is None:
        color = hasattr(sys.stderr, "isatty") and sys.stderr.isatty()

    # stdout carries data tables, so the console handler writes to stderr
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(ColorFormatter(LOG_FORMAT) if color else logging.Formatter(LOG_FORMAT))

    handlers = [console_handler]

    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
        formatter = logging.Formatter(LOG_FORMAT)

        file_handler = RotatingFileHandler(
            os.path.join(log_dir, 'conelab.log'),
            maxBytes=5*1024*1024,  # 5MB
            backupCount=5,
            encoding='utf-8'
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(formatter)

        error_handler = RotatingFileHandler(
            os.path.join(log_dir, 'error.log'),
            maxBytes=5*1024*1024,
            backupCount=5,
            encoding='utf-8'
        )
        error_handler.setLevel(logging.ERROR)
        error_handler.setFormatter(formatter)

        handlers.extend([file_handler, error_handler])

    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    for handler in handlers:
        logger.addHandler(handler)

    logger.debug("Logging setup complete")
    logger.debug(f"Python version: {sys.version.split()[0]}")
    if log_dir:
        logger.debug(f"Logs directory: {log_dir}")

    return logger
