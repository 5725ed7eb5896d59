# config.py
"""
Run settings from the environment (and an optional .env file).

INJEKT_THREADS        concurrency cap for partitioned trials, not a speedup (default 1)
INJEKT_LOG_DIR        directory for timestamped debug logs (default: console only)
INJEKT_LOG_LEVEL      console level (default INFO)
INJEKT_DEFAULT_HEIGHT sampling height bound (default 100)
INJEKT_SEED           default seed (default 0)
"""
import logging
import os
from dataclasses import asdict, dataclass

from dotenv import load_dotenv

from spaces import DEFAULT_HEIGHT

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
REPORT_FORMATS = ("json", "text")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Settings:
    threads: int = 1
    log_dir: str = None
    log_level: str = "INFO"
    default_height: int = DEFAULT_HEIGHT
    seed: int = 0


def _int_setting(env, name, default, minimum):
    raw = env.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from exc
    if value < minimum:
        raise ConfigError(f"{name} must be at least {minimum}, got {value}")
    return value


def load_settings(env=None, dotenv_path=None):
    """
    Read Settings from `env` (default: os.environ after loading .env).

    Args:
        env (dict): explicit environment, used by tests; .env is not read then
        dotenv_path (str): .env location; python-dotenv searches upward when None

    Returns:
        Settings: validated settings
    """
    if env is None:
        load_dotenv(dotenv_path)
        env = os.environ
    level = (env.get("INJEKT_LOG_LEVEL") or "INFO").strip().upper()
    if level not in LOG_LEVELS:
        raise ConfigError(f"INJEKT_LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}, got {level!r}")
    settings = Settings(
        threads=_int_setting(env, "INJEKT_THREADS", 1, 1),
        log_dir=(env.get("INJEKT_LOG_DIR") or None),
        log_level=level,
        default_height=_int_setting(env, "INJEKT_DEFAULT_HEIGHT", DEFAULT_HEIGHT, 1),
        seed=_int_setting(env, "INJEKT_SEED", 0, 0),
    )
    logger.debug(f"Loaded settings: {settings}")
    return settings


@dataclass(frozen=True)
class RunConfig:
    """What a CLI run was asked to do; copied verbatim into its report."""

    subcommand: str
    seed: int = 0
    trials: int = 0
    height: int = DEFAULT_HEIGHT
    primes: tuple = None
    output: str = None
    report_format: str = "json"
    workers: int = 1

    def __post_init__(self):
        if self.report_format not in REPORT_FORMATS:
            raise ConfigError(f"report format must be one of {REPORT_FORMATS}, got {self.report_format!r}")
        if self.trials < 0 or self.height < 1 or self.workers < 1:
            raise ConfigError("trials must be >= 0, height and workers >= 1")

    @classmethod
    def from_args(cls, args, settings):
        seed = args.seed if getattr(args, "seed", None) is not None else settings.seed
        height = getattr(args, "height", None) or settings.default_height
        primes = getattr(args, "primes", None)
        return cls(
            subcommand=args.command,
            seed=seed,
            trials=getattr(args, "trials", None) or 0,
            height=height,
            primes=tuple(primes) if primes else None,
            output=getattr(args, "report", None) or getattr(args, "out", None),
            report_format=getattr(args, "format", "json"),
            workers=settings.threads,
        )

    def to_json(self):
        data = asdict(self)
        data["primes"] = list(self.primes) if self.primes else None
        return data
