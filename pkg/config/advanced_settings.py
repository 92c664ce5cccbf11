"""
Advanced Configuration for the Congruence Verification Toolkit
"""
import os
from dotenv import load_dotenv
from dataclasses import dataclass, field
from typing import List, Dict

import psutil

from config.settings import (
    CONGR_WORKERS, ORACLE_BUDGET, PARALLEL_MIN_TERMS, NAIVE_STEP_THRESHOLD,
    DIGIT_TABLE_LIMIT, SCAN_MAX_KEY_MODULUS, SCAN_HEIGHT_CAP, LOG_LEVEL,
    LOG_FILE, LOG_FORMAT, DEFAULT_FORMAT,
)

load_dotenv()


def default_workers() -> int:
    """Worker count from CONGR_WORKERS, else physical cores, else 1"""
    if CONGR_WORKERS.strip():
        try:
            return max(1, int(CONGR_WORKERS))
        except ValueError:
            pass
    return psutil.cpu_count(logical=False) or 1


@dataclass
class EngineConfig:
    """Recurrence engine parameters"""
    naive_step_threshold: int = NAIVE_STEP_THRESHOLD
    digit_table_limit: int = DIGIT_TABLE_LIMIT
    power_cache_size: int = 256  # cached x^(p^a) ladders


@dataclass
class OracleConfig:
    """Brute-force enumeration limits"""
    budget: int = ORACLE_BUDGET
    parallel_min_terms: int = PARALLEL_MIN_TERMS
    backend: str = os.getenv('CONGR_JOBLIB_BACKEND', 'loky')


@dataclass
class SweepDefaults:
    """Defaults for verify sweeps when neither flags nor config file set them"""
    pmin: int = 5
    pmax: int = 100
    amin: int = 1
    amax: int = 1
    output_format: str = DEFAULT_FORMAT
    workers: int = field(default_factory=default_workers)

    # T1.1 / T3.2 sample of c values when none is given
    c_values: List[str] = field(default_factory=lambda: ['1', '3', '-1/3', '5/2'])
    # T1.3 sample of t values (m defaults to t^2 + t + 7)
    t_values: List[int] = field(default_factory=lambda: [0, 1, 2, 3])


@dataclass
class ScanConfig:
    """Pattern scan heuristics"""
    max_key_modulus: int = SCAN_MAX_KEY_MODULUS
    height_cap: int = SCAN_HEIGHT_CAP


# Main configuration instances
engine_config = EngineConfig()
oracle_config = OracleConfig()
sweep_defaults = SweepDefaults()
scan_config = ScanConfig()

# Logging configuration
LOGGING_CONFIG = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'standard': {
            'format': '%(asctime)s [%(levelname)s] %(name)s: %(message)s'
        },
        'detailed': {
            'format': '%(asctime)s [%(levelname)s] %(name)s:%(lineno)d: %(funcName)s() %(message)s'
        },
        'json': {
            '()': 'pythonjsonlogger.jsonlogger.JsonFormatter',
            'format': '%(asctime)s %(levelname)s %(name)s %(message)s'
        }
    },
    'handlers': {
        'console': {
            'level': LOG_LEVEL,
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'json' if LOG_FORMAT == 'json' else 'standard'
        },
        'file': {
            'level': 'DEBUG',
            'class': 'logging.handlers.RotatingFileHandler',
            'filename': LOG_FILE,
            'maxBytes': 10485760,  # 10MB
            'backupCount': 5,
            'formatter': 'json' if LOG_FORMAT == 'json' else 'detailed'
        }
    },
    'loggers': {
        '': {
            'handlers': ['console', 'file'],
            'level': 'DEBUG',
            'propagate': False
        }
    }
}

# Feature flags
FEATURES: Dict[str, bool] = {
    'remark_quartic_rows': True,      # R5.1 root counts and v_p values
    'intermediate_rows': True,        # extra T1.2 / T1.6 / T1.9 / T3.1 rows
    'relation_rows': True,            # T1.8(ii) when d values are supplied
    'sign_convention_report': True,   # T1.10(i) outcome under every (x, y) sign
}
