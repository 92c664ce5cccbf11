import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Parallelism
CONGR_WORKERS = os.getenv('CONGR_WORKERS', '')  # empty -> physical core count

# Oracle Settings
ORACLE_BUDGET = int(os.getenv('CONGR_BUDGET', str(2 * 10**8)))  # terms per enumeration
PARALLEL_MIN_TERMS = int(os.getenv('CONGR_PARALLEL_MIN_TERMS', '200000'))

# Engine Thresholds
NAIVE_STEP_THRESHOLD = 4096  # |n| at or below this steps the window directly
DIGIT_TABLE_LIMIT = 2**20  # largest p with cached factorial digit tables
MAX_PRIME = 2**63

# Scan Settings
SCAN_MAX_KEY_MODULUS = 24
SCAN_HEIGHT_CAP = 10**4

# Logging Configuration
LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
LOG_FILE = os.getenv('LOG_FILE', 'logs/congruence.log')
LOG_FORMAT = os.getenv('LOG_FORMAT', 'text')  # 'text' or 'json'

# Output
DEFAULT_FORMAT = 'jsonl'
REPORTS_DIR = 'reports'
