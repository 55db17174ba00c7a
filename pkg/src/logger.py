import logging
from typing import Optional

LOGGER_NAME = "lector"
FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


# Configure logging
def setup_logger(log_file: Optional[str] = None, level: int = logging.INFO) -> logging.Logger:
    """Configure the package logger.

    Args:
        log_file: Optional path of a DEBUG-level log file. Console output is always attached.
        level: Console log level.
    """
    logger = logging.getLogger(LOGGER_NAME)
    logger.setLevel(logging.DEBUG)

    # Remove any existing handlers to prevent duplicates
    if logger.hasHandlers():
        for handler in list(logger.handlers):
            handler.close()
        logger.handlers.clear()

    formatter = logging.Formatter(FORMAT)

    # Console handler
    console_handler = logging.StreamHandler()
    console_handler.setLevel(level)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    # File handler
    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def get_logger(name: str) -> logging.Logger:
    """Return a child of the package logger for a module."""
    if name.startswith(LOGGER_NAME):
        return logging.getLogger(name)
    return logging.getLogger(f"{LOGGER_NAME}.{name}")
