import os
import typing

import yaml

from fairlattice.exceptions import ConfigError

HARD_MAX_M = 20
DEFAULT_MAX_M = 16
DEFAULT_MEMORY_BUDGET = 4 * 1024 ** 3
DEFAULT_ORACLE_BUDGET = 10 ** 9

DEFAULT_SEED = 2022
DEFAULT_N_REPEATS = 20
# VarRatio within 1 ± ISP_TOLERANCE reads as ISP-consistent
ISP_TOLERANCE = 0.15

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

DEFAULT_ADULT_CSV = 'data/adult.csv'


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == '':
        return default
    try:
        return int(float(raw))
    except ValueError as e:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from e


def max_m() -> int:
    return min(_env_int('FAIRLATTICE_MAX_M', DEFAULT_MAX_M), HARD_MAX_M)


def memory_budget() -> int:
    return _env_int('FAIRLATTICE_MEMORY_BUDGET', DEFAULT_MEMORY_BUDGET)


def oracle_budget() -> int:
    return _env_int('FAIRLATTICE_ORACLE_BUDGET', DEFAULT_ORACLE_BUDGET)


def adult_csv() -> str:
    return os.getenv('FAIRLATTICE_ADULT_CSV', DEFAULT_ADULT_CSV)


def load_yaml(path) -> typing.Dict[str, typing.Any]:
    try:
        with open(path, 'r') as file:
            content = yaml.safe_load(file)
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"malformed config {path}: {e}") from e
    if not isinstance(content, dict):
        raise ConfigError(f"config {path} must hold a mapping")
    return content
