"""Grensemble config file parser."""

import yaml
import os
import pathlib
import typing
import logging
import voluptuous as vol  # type: ignore
from dataclasses import dataclass, field, replace
from typing import Any, Optional, Union
from .alignment import MatcherParams
from .const import (
    PROGRAM_NAME,
    CONF_THETA,
    CONF_MODE,
    CONF_TIE_POLICY,
    CONF_RESTARTS,
    CONF_MAX_CLIMB_STEPS,
    CONF_SEED,
    CONF_JOBS,
    CONF_AMR_MODE,
    CONF_STRICT,
    ENV_JOBS,
    DEFAULT_THETA,
    DEFAULT_RESTARTS,
    DEFAULT_SEED,
    MODE_VALID_AMR,
    MODE_STRICT,
    TIE_FIRST_PIVOT,
    TIE_STABLE_RNG,
)
from .exceptions import GrensembleValueError
from .voting import EnsembleConfig

_LOGGER = logging.getLogger(__name__)


def default_jobs() -> int:
    value = os.getenv(ENV_JOBS)
    if not value:
        return 1
    try:
        jobs = int(value)
    except ValueError:
        raise GrensembleValueError(f"{ENV_JOBS} must be an integer, got {value!r}")
    if jobs < 1:
        raise GrensembleValueError(f"{ENV_JOBS} must be >= 1, got {jobs}")
    return jobs


def _theta(value: Any) -> Union[int, float]:
    if isinstance(value, bool):
        raise vol.Invalid("theta must be a number")
    if isinstance(value, int):
        if value < 1:
            raise vol.Invalid("integer theta must be >= 1")
        return value
    if isinstance(value, float):
        if not 0 < value <= 1:
            raise vol.Invalid("fractional theta must be in (0, 1]")
        return value
    raise vol.Invalid("theta must be an integer vote count or a fraction")


CONFIG_SCHEMA = vol.Schema({
    vol.Optional(CONF_THETA, default=DEFAULT_THETA): _theta,
    vol.Optional(CONF_MODE, default=MODE_VALID_AMR): vol.In([MODE_VALID_AMR, MODE_STRICT]),
    vol.Optional(CONF_TIE_POLICY, default=TIE_FIRST_PIVOT): vol.In([TIE_FIRST_PIVOT, TIE_STABLE_RNG]),
    vol.Optional(CONF_RESTARTS, default=DEFAULT_RESTARTS): vol.All(int, vol.Range(min=1)),
    vol.Optional(CONF_MAX_CLIMB_STEPS, default=None): vol.Any(None, vol.All(int, vol.Range(min=1))),
    vol.Optional(CONF_SEED, default=DEFAULT_SEED): int,
    vol.Optional(CONF_JOBS): vol.All(int, vol.Range(min=1)),
    vol.Optional(CONF_AMR_MODE, default=True): bool,
    vol.Optional(CONF_STRICT, default=True): bool,
})


def default_config_file() -> pathlib.Path:
    config_dir = pathlib.Path(
            os.environ.get("APPDATA") or
            os.environ.get("XDG_CONFIG_HOME") or
            os.path.join(os.environ.get("HOME", "."), ".config"),
        ) / PROGRAM_NAME
    return config_dir / "config.yaml"


@dataclass
class Config:
    theta: Union[int, float] = DEFAULT_THETA
    mode: str = MODE_VALID_AMR
    tie_policy: str = TIE_FIRST_PIVOT
    restarts: int = DEFAULT_RESTARTS
    max_climb_steps: Optional[int] = None
    seed: int = DEFAULT_SEED
    jobs: int = field(default_factory=default_jobs)
    # inverse role normalization and root matching
    amr_mode: bool = True
    strict: bool = True

    @classmethod
    def from_dict(cls, config_dict: dict[str, Any]) -> "Config":
        try:
            config_dict = CONFIG_SCHEMA(config_dict)
        except vol.Invalid as e:
            raise GrensembleValueError(f"invalid config: {e}") from e

        c = cls(
            theta=config_dict[CONF_THETA],
            mode=config_dict[CONF_MODE],
            tie_policy=config_dict[CONF_TIE_POLICY],
            restarts=config_dict[CONF_RESTARTS],
            max_climb_steps=config_dict[CONF_MAX_CLIMB_STEPS],
            seed=config_dict[CONF_SEED],
            amr_mode=config_dict[CONF_AMR_MODE],
            strict=config_dict[CONF_STRICT],
        )
        if CONF_JOBS in config_dict:
            c.jobs = config_dict[CONF_JOBS]
        _LOGGER.debug("config: %r", c)
        return c

    @classmethod
    def from_yaml_file(cls, file: typing.TextIO) -> "Config":
        with file:
            config_dict = yaml.safe_load(file)
        if config_dict is None:
            config_dict = {}
        _LOGGER.debug("config_dict: %r", config_dict)
        return cls.from_dict(config_dict)

    @classmethod
    def load(cls, path: Optional[pathlib.Path] = None) -> "Config":
        """Read the config file; a missing default file means defaults."""
        if path is None:
            path = default_config_file()
            if not path.exists():
                _LOGGER.debug("no config file at %s, using defaults", path)
                return cls()
        return cls.from_yaml_file(open(path, encoding="utf-8"))

    def override(self, **kwargs: Any) -> "Config":
        """Copy with the given non-None values replaced."""
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})

    def matcher_params(self) -> MatcherParams:
        return MatcherParams(
            restarts=self.restarts,
            seed=self.seed,
            max_climb_steps=self.max_climb_steps,
            match_root=self.amr_mode,
        )

    def ensemble_config(self, pivot: Optional[int] = None) -> EnsembleConfig:
        return EnsembleConfig(
            theta=self.theta,
            mode=self.mode,
            tie_policy=self.tie_policy,
            matcher=self.matcher_params(),
            pivot=pivot,
        )
