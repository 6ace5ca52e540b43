"""
Configuration module for the Mackey functor verification toolkit
Loads settings from environment variables and provides configuration constants
"""

import logging
import os

from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _int_env(name: str, default: str) -> int:
    return int(os.getenv(name, default))


class Config:
    """Configuration class containing all toolkit settings"""

    # Size caps
    GROUP_SIZE_CAP = _int_env("MACKEY_SIZE_CAP", "10000")
    COMPLEX_SIZE_CAP = _int_env("MACKEY_COMPLEX_CAP", os.getenv("MACKEY_SIZE_CAP", "4096"))

    # Modular cochain engine runs on int64 up to this exponent, on Python integers above it
    MAX_EXPONENT = _int_env("MACKEY_MAX_EXPONENT", str(2 ** 20))

    # Full associativity scan up to this order, sampled above
    ASSOCIATIVITY_SCAN_LIMIT = 64
    ASSOCIATIVITY_SAMPLES = 20000

    # Split norm property harness
    NORM_TRIALS = _int_env("MACKEY_NORM_TRIALS", "1000")

    # Logging Configuration
    LOG_LEVEL = os.getenv("LOG_LEVEL", "WARNING")
    LOG_FILE = os.getenv("LOG_FILE", "")

    @classmethod
    def validate(cls):
        """Validate configuration settings"""
        problems = []

        for name in ("GROUP_SIZE_CAP", "COMPLEX_SIZE_CAP", "MAX_EXPONENT", "NORM_TRIALS"):
            if getattr(cls, name) <= 0:
                problems.append(name)
        if not isinstance(logging.getLevelName(cls.LOG_LEVEL.upper()), int):
            problems.append("LOG_LEVEL")

        if problems:
            raise ValueError(f"Invalid configuration values: {', '.join(problems)}")

        return True

    @classmethod
    def as_dict(cls) -> dict:
        return {
            "group_size_cap": cls.GROUP_SIZE_CAP,
            "complex_size_cap": cls.COMPLEX_SIZE_CAP,
            "max_exponent": cls.MAX_EXPONENT,
            "norm_trials": cls.NORM_TRIALS,
            "log_level": cls.LOG_LEVEL,
            "log_file": cls.LOG_FILE,
        }
