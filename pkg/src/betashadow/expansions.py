"""Digit coding of ``T_{beta,alpha}`` orbits and value reconstruction."""

from __future__ import annotations

from dataclasses import dataclass

from .maps import BetaParams, beta_map, check_points
from .numeric import format_number, is_exact


@dataclass(frozen=True)
class DigitString:
    digits: str
    params: BetaParams
    origin: object

    def __len__(self):
        return len(self.digits)

    def to_json(self) -> dict:
        return {
            **self.params.to_json(),
            "x": format_number(self.origin),
            "digits": self.digits,
        }


def coding(params: BetaParams, x, N: int) -> DigitString:
    """First ``N`` digits: digit ``i`` is 1 iff ``T^{i-1}(x)`` uses the right branch."""
    if N < 1:
        raise ValueError("N must be at least 1")
    check_points([x])
    fmap = beta_map(params)
    digits = []
    y = x
    for _ in range(N):
        digits.append(str(fmap.branch_index(y)))
        y = fmap(y)
    return DigitString("".join(digits), params, x)


def reconstruct(word: DigitString):
    """``sum_n digit_n * beta^-n``.

    Approximates ``x + alpha/(beta-1)`` within ``beta^-N (1 + alpha/(beta-1))``.
    """
    if not word.digits:
        raise ValueError("empty digit string")
    beta = word.params.beta
    value = 0 if is_exact(beta) else 0.0
    for d in reversed(word.digits):
        value = (value + int(d)) / beta
    return value


def truncation_bound(params: BetaParams, N: int):
    beta, alpha = params.beta, params.alpha
    return beta ** (-N) * (1 + alpha / (beta - 1))


def expansion_target(params: BetaParams, x):
    return x + params.alpha / (params.beta - 1)
