import os
import configparser
import logging

# Initialize the config parser
config = configparser.ConfigParser()

# We assume 'config.ini' is one level up from this file; the example file is the fallback
PACKAGE_DIR = os.path.dirname(os.path.abspath(__file__))
CONFIG_PATH = os.path.join(PACKAGE_DIR, "..", "config.ini")
EXAMPLE_CONFIG_PATH = os.path.join(PACKAGE_DIR, "..", "example.config.ini")
if not config.read(CONFIG_PATH):
    config.read(EXAMPLE_CONFIG_PATH)


def _get_bool(section: str, key: str, fallback: bool) -> bool:
    return config.get(section, key, fallback=str(fallback)).strip().lower() == "true"


def _get_int(section: str, key: str, fallback: int) -> int:
    return int(config.get(section, key, fallback=str(fallback)))


# Enumeration
MAX_COSETS = _get_int("ENUMERATION", "max_cosets", 2_000_000)
STRATEGY = config.get("ENUMERATION", "strategy", fallback="felsch").strip().lower()
CERTIFICATE_STRATEGY = config.get("ENUMERATION", "certificate_strategy", fallback="hlt").strip().lower()
CERTIFICATE_LIMITS = [
    int(x) for x in config.get("ENUMERATION", "certificate_limits", fallback="110000, 2000000").split(",")
    if x.strip()
]
LOOKAHEAD = _get_bool("ENUMERATION", "lookahead", True)

# Tietze simplification
TIETZE_BUDGET = _get_int("TIETZE", "budget", 200_000)
TIETZE_MAX_TOTAL_LENGTH = _get_int("TIETZE", "max_total_length", 20_000_000)

# Permutation groups
DEGREE_BOUND = _get_int("PERMREP", "degree_bound", 200_000)
DERIVED_SERIES_CAP = _get_int("PERMREP", "derived_series_cap", 64)

# Pair-group quotients
ORDER_CAP = _get_int("QUOTIENT", "order_cap", 2 ** 20)
CROSS_VALIDATE_BUDGET = _get_int("QUOTIENT", "cross_validate_budget", 140_000)
VALIDATE_ALL_FIBERS = _get_bool("QUOTIENT", "validate_all_fibers", True)

# Application
DEBUG = _get_bool("APP", "debug", False)
WORKERS = _get_int("APP", "workers", 1)
OUTPUT_FORMAT = config.get("APP", "output_format", fallback="text").strip().lower()

# Artifact cache
CACHE_ENABLED = _get_bool("CACHE", "enabled", True)
CACHE_DIR = os.path.expanduser(config.get("CACHE", "directory", fallback="~/.polyforge/cache"))

# Initialize logger
if DEBUG:
    logging.basicConfig(
        level=logging.DEBUG,
        format="%(asctime)s - %(levelname)s - %(message)s"
    )
else:
    # Only failures are interesting when DEBUG is off
    logging.basicConfig(
        level=logging.CRITICAL,
        format="%(asctime)s - %(levelname)s - %(message)s"
    )
logger = logging.getLogger(__name__)


def coset_limit() -> int:
    """The default coset limit. POLYFORGE_LIMIT, when set, overrides [ENUMERATION] max_cosets."""
    value = os.environ.get("POLYFORGE_LIMIT")
    if value:
        try:
            limit = int(value)
            if limit >= 1:
                return limit
        except ValueError:
            pass
        logger.warning(f"Ignoring malformed POLYFORGE_LIMIT={value!r}")
    return MAX_COSETS
