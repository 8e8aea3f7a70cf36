"""
Core functionality for the pgrl package: the package logger, the error
hierarchy, the settings (enumeration caps, seeds) and the typed records
shared by all reports.
"""

import logging
import os
from pathlib import Path
from typing import Any, Optional, TypedDict

import sympy
import tomli

logger = logging.getLogger("pgrl")


class PgrlError(Exception):
    """
    Base class of all errors raised by pgrl.
    """


class ModulusNotPrime(PgrlError, ValueError):
    pass


class ShapeError(PgrlError, ValueError):
    pass


class NotASubspace(PgrlError, ValueError):
    pass


class DimensionTooLarge(PgrlError, ValueError):
    pass


class NonCommutativeInput(PgrlError, ValueError):
    pass


class NotClosedInput(PgrlError, ValueError):
    pass


class InternalInvariantViolation(PgrlError, RuntimeError):
    """
    Raised when a proven invariant fails on a concrete instance.
    Never expected to fire: it signals a bug (or a counterexample).
    """


class CapExceeded(PgrlError, RuntimeError):
    pass


class NonAbelian(PgrlError, ValueError):
    pass


class NotInvertible(PgrlError, ValueError):
    pass


class NotAPGroup(PgrlError, ValueError):
    pass


class NotAlternating(PgrlError, ValueError):
    pass


class TooLarge(PgrlError, ValueError):
    pass


class ParseError(PgrlError, ValueError):
    pass


class Check(TypedDict):
    """
    One expectation-versus-measurement record.

    Attributes:
        name (str): What is being checked.
        expected (Any): The value (or bound) the formula predicts.
        measured (Any): The value obtained by computation.
        ok (bool): Whether the measurement meets the expectation.
    """

    name: str
    expected: Any
    measured: Any
    ok: bool


def check(name: str, expected: Any, measured: Any, ok: Optional[bool] = None) -> Check:
    """
    Build a Check record; when ok is not given, equality is required.
    """
    if ok is None:
        ok = expected == measured
    logger.debug(f"check '{name}': expected {expected}, measured {measured}, ok={ok}")
    return Check(name=name, expected=expected, measured=measured, ok=bool(ok))


def all_ok(checks: list[Check]) -> bool:
    return all(c["ok"] for c in checks)


def is_prime(p: int) -> bool:
    return bool(sympy.isprime(p))


def prime_power(q: int) -> tuple[int, int]:
    """
    Split a prime power q = p^r.

    Args:
        q (int): A prime power, q >= 2.

    Returns:
        tuple[int, int]: The pair (p, r).

    Raises:
        ModulusNotPrime: If q is not a prime power.
    """
    factors = sympy.factorint(q) if q >= 2 else {}
    if len(factors) != 1:
        raise ModulusNotPrime(f"modulus {q} is not a prime power")
    ((p, r),) = factors.items()
    return int(p), int(r)


class Settings:
    """
    Process-wide settings, with class-level defaults which may be
    overwritten from a TOML file (table [pgrl]) or, for the enumeration
    cap, from the environment variable PGRL_MAX_ENUM.

    Attributes:
        enumeration_cap (int): Maximum number of group elements enumerated.
        subgroup_cap (int): Maximum group order for exhaustive subgroup sweeps.
        seed (int): Default seed of randomized searches.
        trials (int): Default number of trials of randomized searches.
        processes (int): Worker processes for independent trials/builders.
        config_path (Path): Default location of the TOML configuration.
    """

    enumeration_cap = 2**20
    subgroup_cap = 512
    seed = 0
    trials = 1000
    processes = 1
    config_path = Path("pgrl.toml")
    env_cap = "PGRL_MAX_ENUM"

    _keys = ("enumeration_cap", "subgroup_cap", "seed", "trials", "processes")

    @classmethod
    def max_enum(cls) -> int:
        """
        Return the enumeration cap, honoring PGRL_MAX_ENUM if set.

        Returns:
            int: The maximum number of elements any enumeration may reach.
        """
        value = os.environ.get(cls.env_cap)
        if value is None or value.strip() == "":
            return cls.enumeration_cap
        try:
            cap = int(value)
        except ValueError:
            raise ValueError(f"{cls.env_cap} should be an integer, got '{value}'")
        if cap < 1:
            raise ValueError(f"{cls.env_cap} should be positive, got {cap}")
        return cap

    @classmethod
    def load(cls, path: Optional[Path] = None) -> dict[str, Any]:
        """
        Read the [pgrl] table of a TOML file and overwrite the defaults.

        Args:
            path (Optional[Path]): The TOML file; defaults to config_path, which
              is allowed not to exist.

        Returns:
            dict[str, Any]: The settings that were applied.
        """
        explicit = path is not None
        toml_path = Path(path) if path is not None else cls.config_path
        if not toml_path.exists():
            if explicit:
                raise FileNotFoundError(f"configuration file not found: {toml_path}")
            return {}
        logger.debug(f"reading settings from {toml_path}")
        with open(toml_path, "rb") as f:
            d = tomli.load(f)
        table = d.get("pgrl", {})
        applied: dict[str, Any] = {}
        for key, value in table.items():
            if key not in cls._keys:
                logger.warning(f"ignoring unknown setting '{key}' in {toml_path}")
                continue
            if not isinstance(value, int) or isinstance(value, bool):
                raise ValueError(f"setting '{key}' in {toml_path} should be an integer")
            setattr(cls, key, value)
            applied[key] = value
        return applied

    @classmethod
    def as_dict(cls) -> dict[str, int]:
        d = {key: getattr(cls, key) for key in cls._keys}
        d["enumeration_cap"] = cls.max_enum()
        return d
