"""Modular arithmetic kernel with operation counting.

Every routine that takes a ``counter`` records the modular products it
performs.  Passing ``None`` skips the bookkeeping; :func:`mod_pow` then
delegates to the builtin three-argument ``pow``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, lru_cache
from math import gcd
from typing import Optional

from .errors import NotInvertible

#: Default cost of one modular division measured in modular products.
DEFAULT_INVERSION_COST = 4.0


@dataclass
class OpCounter:
    squarings: int = 0
    multiplications: int = 0
    inversions: int = 0
    reductions: int = 0

    @property
    def products(self) -> int:
        return self.squarings + self.multiplications

    def weighted(self, inversion_cost: float = DEFAULT_INVERSION_COST) -> float:
        return self.products + inversion_cost * self.inversions

    def add(self, other: "OpCounter") -> None:
        self.squarings += other.squarings
        self.multiplications += other.multiplications
        self.inversions += other.inversions
        self.reductions += other.reductions

    def as_dict(self) -> dict:
        return {
            "squarings": self.squarings,
            "multiplications": self.multiplications,
            "inversions": self.inversions,
            "reductions": self.reductions,
        }


def _check_modulus(modulus: int) -> None:
    if modulus < 2:
        raise ValueError(f"modulus must be >= 2, got {modulus}")


def mod_pow(base: int, exponent: int, modulus: int,
            counter: Optional[OpCounter] = None) -> int:
    """Return ``base**exponent % modulus``.

    With a counter, uses left-to-right square-and-multiply so that the
    recorded counts are ``bit_length - 1`` squarings and ``popcount - 1``
    multiplications.
    """
    _check_modulus(modulus)
    if exponent < 0:
        raise ValueError("negative exponent")
    if counter is None:
        return pow(base, exponent, modulus)
    if exponent == 0:
        return 1
    b = base % modulus
    acc = b
    for bit in bin(exponent)[3:]:
        acc = acc * acc % modulus
        counter.squarings += 1
        counter.reductions += 1
        if bit == "1":
            acc = acc * b % modulus
            counter.multiplications += 1
            counter.reductions += 1
    return acc


def mod_inverse(x: int, modulus: int) -> int:
    """Inverse of ``x`` modulo ``modulus``.

    Raises :class:`NotInvertible` carrying ``gcd(x, modulus)`` when it is not 1.
    """
    _check_modulus(modulus)
    g = gcd(x, modulus)
    if g != 1:
        raise NotInvertible(g, modulus)
    return pow(x, -1, modulus)


class Step(str, Enum):
    SQUARE = "square"
    MULTIPLY = "multiply"
    MULTIPLY_INVERSE = "multiply-inverse"


@dataclass(frozen=True)
class PowerSchedule:
    """A straight-line plan computing ``x**exponent`` from ``x``.

    Execution starts with the accumulator equal to ``x``; each step squares
    it, multiplies by ``x`` or multiplies by ``x**-1``.
    """

    exponent: int
    steps: tuple = field(default=())
    label: str = "binary"

    @cached_property
    def predicted_squarings(self) -> int:
        return sum(1 for s in self.steps if s is Step.SQUARE)

    @cached_property
    def predicted_multiplications(self) -> int:
        return sum(1 for s in self.steps if s is Step.MULTIPLY)

    @cached_property
    def predicted_inversions(self) -> int:
        return sum(1 for s in self.steps if s is Step.MULTIPLY_INVERSE)

    @property
    def total_ops(self) -> int:
        return len(self.steps)

    def cost(self, inversion_cost: float = DEFAULT_INVERSION_COST) -> float:
        return (self.predicted_squarings + self.predicted_multiplications
                + inversion_cost * self.predicted_inversions)


def replay_exponent(schedule: PowerSchedule) -> int:
    """Run the schedule on exponents instead of residues."""
    e = 1
    for step in schedule.steps:
        if step is Step.SQUARE:
            e *= 2
        elif step is Step.MULTIPLY:
            e += 1
        else:
            e -= 1
    return e


def naf_digits(k: int) -> list[int]:
    """Non-adjacent form of ``k``, most significant digit first."""
    digits = []
    while k > 0:
        if k & 1:
            d = 2 - (k & 3)
            k -= d
        else:
            d = 0
        digits.append(d)
        k >>= 1
    return digits[::-1]


def _steps_from_digits(digits) -> tuple:
    steps = []
    for d in digits[1:]:
        steps.append(Step.SQUARE)
        if d == 1:
            steps.append(Step.MULTIPLY)
        elif d == -1:
            steps.append(Step.MULTIPLY_INVERSE)
    return tuple(steps)


@lru_cache(maxsize=256)
def binary_schedule(p: int) -> PowerSchedule:
    """Plain left-to-right square-and-multiply plan for ``x**p``."""
    if p < 2:
        raise ValueError(f"exponent must be >= 2, got {p}")
    return PowerSchedule(p, _steps_from_digits([int(b) for b in bin(p)[2:]]), "binary")


@lru_cache(maxsize=256)
def build_schedule(p: int) -> PowerSchedule:
    """Signed-digit plan for ``x**p``.

    For ``p = 2**s - 1`` this is ``s`` squarings and one division, for
    ``p = 2**s + 1`` it is ``s`` squarings and one multiplication.
    """
    if p < 2:
        raise ValueError(f"exponent must be >= 2, got {p}")
    return PowerSchedule(p, _steps_from_digits(naf_digits(p)), "naf")


@lru_cache(maxsize=256)
def choose_schedule(p: int, inversion_cost: float = DEFAULT_INVERSION_COST) -> PowerSchedule:
    """Cheaper of the binary and signed-digit plans; ties go to binary."""
    binary = binary_schedule(p)
    signed = build_schedule(p)
    if signed.cost(inversion_cost) < binary.cost(inversion_cost):
        return signed
    return binary


def pow_p_scheduled(x: int, schedule: PowerSchedule, modulus: int,
                    counter: Optional[OpCounter] = None) -> int:
    """Evaluate ``x**schedule.exponent % modulus`` step by step.

    A schedule with division steps needs ``x**-1``; if ``x`` shares a
    nontrivial factor with the modulus, :class:`NotInvertible` is raised with
    that factor.
    """
    _check_modulus(modulus)
    x %= modulus
    if x == 0:
        return 0
    inverse = None
    if schedule.predicted_inversions:
        inverse = mod_inverse(x, modulus)
    acc = x
    for step in schedule.steps:
        if step is Step.SQUARE:
            acc = acc * acc % modulus
            if counter is not None:
                counter.squarings += 1
        elif step is Step.MULTIPLY:
            acc = acc * x % modulus
            if counter is not None:
                counter.multiplications += 1
        else:
            acc = acc * inverse % modulus
            if counter is not None:
                counter.inversions += 1
        if counter is not None:
            counter.reductions += 1
    return acc


def phi_p_eval(x: int, p: int, modulus: int,
               counter: Optional[OpCounter] = None) -> int:
    """``1 + x + ... + x**(p-1)`` modulo ``modulus``.

    Binary splitting over the bits of ``p``: with ``S(m)`` the first ``m``
    terms, ``S(2m) = S(m) * (1 + x**m)`` and ``S(2m+1) = S(2m) + x**(2m)``.
    Costs at most ``3 * (bit_length(p) - 1)`` products.
    """
    _check_modulus(modulus)
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    x %= modulus
    bits = bin(p)[3:]
    total = 1 % modulus
    power = x
    trivial = True  # total is still exactly 1, so the first doubling is free
    last = len(bits) - 1
    for i, bit in enumerate(bits):
        if trivial:
            total = (1 + power) % modulus
            trivial = False
        else:
            total = total * (1 + power) % modulus
            _bump(counter, "multiplications")
        if bit == "1" or i < last:
            power = power * power % modulus
            _bump(counter, "squarings")
        if bit == "1":
            total = (total + power) % modulus
            if i < last:
                power = power * x % modulus
                _bump(counter, "multiplications")
    return total


def _bump(counter: Optional[OpCounter], name: str) -> None:
    if counter is not None:
        setattr(counter, name, getattr(counter, name) + 1)
        counter.reductions += 1
