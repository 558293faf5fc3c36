"""Validated ``N = K*p^n + 1`` triples and exact threshold arithmetic.

Every comparison involving ``log_p`` is done with integer powers of ``p``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd

from .errors import FormError
from .oracle import is_prime_u64

_FORM_RE = re.compile(
    r"^\s*(?:(\d+)\s*\*\s*)?(\d+)\s*(?:\^|\*\*)\s*(\d+)\s*\+\s*1\s*$"
)


@dataclass(frozen=True)
class ProthForm:
    """An integer ``N = K*p^n + 1`` with ``p`` prime, ``gcd(K, p) = 1``,
    ``K >= 1`` and ``n >= 1``.  Construction validates all of these.
    """

    K: int
    p: int
    n: int
    N: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        K, p, n = self.K, self.p, self.n
        if K < 1:
            raise FormError("K", f"K must be >= 1, got {K}")
        if n < 1:
            raise FormError("n", f"n must be >= 1, got {n}")
        if p >= 2**64:
            raise FormError("p-size", "p must be below 2**64")
        if not is_prime_u64(p):
            raise FormError("p-prime", f"p = {p} is not prime")
        if gcd(K, p) != 1:
            raise FormError("gcd", f"gcd(K, p) = {gcd(K, p)}, must be 1")
        object.__setattr__(self, "N", K * p**n + 1)

    @cached_property
    def generalized(self) -> bool:
        """``K < p^n``."""
        return _ilog(self.K, self.p) < self.n

    @cached_property
    def proth_classic(self) -> bool:
        return self.p == 2 and self.K % 2 == 1 and self.generalized

    def __str__(self) -> str:
        return f"{self.K}*{self.p}^{self.n}+1"


def make_form(K: int, p: int, n: int) -> ProthForm:
    return ProthForm(K, p, n)


def parse_form(text: str) -> ProthForm:
    """Parse ``"K*p^n+1"`` (``K*`` optional, ``**`` accepted for ``^``)."""
    m = _FORM_RE.match(text)
    if not m:
        raise FormError("syntax", f"cannot parse {text!r}; expected K*p^n+1")
    K = int(m.group(1)) if m.group(1) else 1
    return ProthForm(K, int(m.group(2)), int(m.group(3)))


def _ilog(x: int, b: int) -> int:
    """Largest ``e`` with ``b**e <= x`` (``x >= 1``)."""
    e = max(0, (x.bit_length() - 1) // b.bit_length())
    power = b**e
    while power * b <= x:
        power *= b
        e += 1
    return e


def compute_J(form: ProthForm) -> int:
    """Largest ``J >= 0`` with ``p^(2J) <= K*p^n``."""
    return (form.n + _ilog(form.K, form.p)) // 2


def threshold_ok(form: ProthForm, j: int) -> bool:
    """Strict test ``p^(2j) > K*p^n``; equality fails."""
    if j < 0:
        raise ValueError(f"index must be >= 0, got {j}")
    excess = 2 * j - form.n
    if excess <= 0:
        return False
    return form.p**excess > form.K
