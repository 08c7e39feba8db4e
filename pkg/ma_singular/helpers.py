import json
import logging
import os

from configparser import ConfigParser
from typing import Optional

THREADS_ENV = "MA_SINGULAR_THREADS"


class ConfigError(ValueError):
    """Malformed or incomplete job configuration."""


def configure_logging(level=logging.WARNING):
    """Attach a single stderr handler to the root logger."""
    logger = logging.getLogger()
    if not logger.handlers:
        ch = logging.StreamHandler()
        ch.setFormatter(logging.Formatter("%(levelname)s: %(message)s"))
        logger.addHandler(ch)
    logger.setLevel(level)
    for handler in logger.handlers:
        handler.setLevel(level)
    return logger


def parse_limit(lim) -> Optional[int]:
    """Max number of messages; 'none' removes the cap."""
    if lim is None:
        return None
    try:
        return int(lim)
    except ValueError:
        if str(lim).lower() == "none":
            return None
        raise ConfigError("Invalid --limit option: " + str(lim))


def get_threads() -> int:
    value = os.environ.get(THREADS_ENV, "1")
    try:
        threads = int(value)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV}: expected an integer, got '{value}'")
    return max(1, threads)


def _ini_value(raw: str):
    """INI values are JSON when they parse as JSON, plain strings otherwise."""
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def read_json(path: str):
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: malformed JSON ({e})")
    except OSError as e:
        raise ConfigError(f"{path}: {e.strerror}")


def load_config(path: str) -> dict:
    """Read a job configuration from a JSON file (.json) or an INI file (.ini).

    An INI file needs a [job] section; other sections become nested objects. An
    `initial_data` value may be inline JSON or a path relative to the INI file.
    """
    if path.endswith(".json"):
        config = read_json(path)
        if not isinstance(config, dict):
            raise ConfigError(f"{path}: the configuration must be a JSON object")
        return config
    elif path.endswith(".ini"):
        config_parser = ConfigParser()
        if not config_parser.read(path):
            raise ConfigError(f"{path}: cannot read configuration")
        if "job" not in config_parser:
            raise ConfigError(f"{path}: missing [job] section")
        config = {k: _ini_value(v) for k, v in config_parser["job"].items()}
        for section in config_parser.sections():
            if section != "job":
                config[section] = {k: _ini_value(v) for k, v in config_parser[section].items()}
        data = config.get("initial_data")
        if isinstance(data, str):
            config["initial_data"] = read_json(os.path.join(os.path.dirname(path), data))
        return config
    raise ConfigError(f"{path}: configuration must be a .json or .ini file")


def write_json(obj, path: str):
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    with open(path, "w") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")
