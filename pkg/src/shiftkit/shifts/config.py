"""Build shift engines from JSON-style configuration dictionaries."""
from __future__ import annotations

from ..errors import ConfigError, ShiftkitError
from ..words import Alphabet
from .base import ShiftLanguage
from .beta import BetaShift, BetaShiftParams
from .coded import CodedShift
from .factor import BlockCode, FactorShift
from .sft import SFT, FullShift
from .sgap import SGapParams, SGapShift

KINDS = ("beta", "coded", "factor", "full", "sft", "sgap")


def _alphabet(cfg: dict) -> Alphabet:
    if "alphabet" in cfg:
        return Alphabet(tuple(str(s) for s in cfg["alphabet"]))
    return Alphabet.digits(int(cfg.get("size", 2)))


def beta_params_from_config(cfg: dict) -> BetaShiftParams:
    if cfg.get("preset") == "golden":
        return BetaShiftParams.golden()
    if cfg.get("preset") == "tribonacci":
        return BetaShiftParams.tribonacci()
    if "polynomial" in cfg:
        return BetaShiftParams.from_polynomial(cfg["polynomial"], cfg["interval"])
    if "decimal" in cfg:
        return BetaShiftParams.from_decimal(str(cfg["decimal"]), cfg.get("radius"))
    raise ConfigError("beta needs 'preset', 'polynomial' + 'interval', or 'decimal'")


def shift_from_config(cfg: dict) -> ShiftLanguage:
    """``{"kind": ..., parameters}`` → engine.  Raises :class:`ConfigError`."""
    if not isinstance(cfg, dict):
        raise ConfigError("shift config must be an object")
    kind = cfg.get("kind")
    try:
        if kind == "full":
            return FullShift(_alphabet(cfg))
        if kind == "sft":
            a = _alphabet(cfg)
            return SFT(a, [a.parse(f) for f in cfg["forbidden"]])
        if kind == "beta":
            return BetaShift(beta_params_from_config(cfg))
        if kind == "sgap":
            return SGapShift(SGapParams.from_config(cfg["S"]))
        if kind == "coded":
            a = _alphabet(cfg)
            return CodedShift(a, [a.parse(g) for g in cfg["generators"]])
        if kind == "factor":
            source = shift_from_config(cfg["source"])
            code = cfg["code"]
            target = Alphabet(tuple(str(s) for s in code["target"]))
            rule = {source.alphabet.parse(k): target.parse(v) for k, v in code["rule"].items()}
            return FactorShift(source, BlockCode(int(code.get("radius", 0)), rule, target,
                                                 source.alphabet))
    except KeyError as exc:
        raise ConfigError(f"shift kind {kind!r} is missing parameter {exc.args[0]!r}") from None
    except ConfigError:
        raise
    except ShiftkitError as exc:
        raise ConfigError(f"invalid {kind} shift: {exc}") from exc
    raise ConfigError(f"unknown shift kind {kind!r}; expected one of {', '.join(KINDS)}")
