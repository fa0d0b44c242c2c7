from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BudgetExceeded

ENV_DIGITS = "ORBITLINE_BUDGET_DIGITS"

_LOG10_2 = 0.30102999566398120


def digits_of(x: Fraction) -> int:
    """Decimal digits (upper estimate) of the larger of numerator/denominator."""
    bits = max(abs(x.numerator).bit_length(), x.denominator.bit_length())
    return int(bits * _LOG10_2) + 1


@dataclass
class Budget:
    """Caps on evaluated words and on the size of any exact number produced.

    ``max_digits`` is additionally clamped by the ``ORBITLINE_BUDGET_DIGITS``
    environment variable, which acts as a hard safety limit.
    """

    max_words: int = 1_000_000
    max_digits: int = 2_000_000
    words_used: int = field(default=0, init=False)
    digits_peak: int = field(default=0, init=False)

    def __post_init__(self):
        env = os.environ.get(ENV_DIGITS)
        if env:
            try:
                cap = int(env)
            except ValueError:
                raise ValueError(f"{ENV_DIGITS} must be an integer, got {env!r}") from None
            self.max_digits = min(self.max_digits, cap)

    def charge_words(self, n: int = 1, partial=None):
        self.words_used += n
        if self.words_used > self.max_words:
            raise BudgetExceeded(
                f"word budget of {self.max_words} exhausted", partial=partial, usage=self.usage()
            )

    def check_point(self, *values: Fraction, partial=None):
        for v in values:
            dg = digits_of(v)
            if dg > self.digits_peak:
                self.digits_peak = dg
            if dg > self.max_digits:
                raise BudgetExceeded(
                    f"number with ~{dg} digits exceeds the digit budget of {self.max_digits}",
                    partial=partial,
                    usage=self.usage(),
                )

    def usage(self) -> dict:
        return {
            "words_used": self.words_used,
            "max_words": self.max_words,
            "digits_peak": self.digits_peak,
            "max_digits": self.max_digits,
        }
