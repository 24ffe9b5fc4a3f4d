"""Shift-language engines."""
from .base import MAX_WORDS, ShiftLanguage, enumerate_language, reachable_states
from .beta import BetaShift, BetaShiftParams, beta_expansion, beta_membership
from .coded import CodedShift
from .config import shift_from_config
from .factor import BlockCode, FactorShift, factor_language
from .sft import SFT, FullShift
from .sgap import BINARY, SGapParams, SGapShift, sgap_membership

__all__ = [
    "MAX_WORDS", "ShiftLanguage", "enumerate_language", "reachable_states",
    "BetaShift", "BetaShiftParams", "beta_expansion", "beta_membership",
    "CodedShift", "shift_from_config", "BlockCode", "FactorShift", "factor_language",
    "SFT", "FullShift", "BINARY", "SGapParams", "SGapShift", "sgap_membership",
]
