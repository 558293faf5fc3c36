"""Operation-count and timing harness for the certifier."""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass
from typing import Iterable

from .arith import DEFAULT_INVERSION_COST, OpCounter, binary_schedule, choose_schedule
from .errors import ResourceError
from .forms import ProthForm
from .primality import certify_alg1, certify_alg2

DEFAULT_DIGIT_CAP = 100_000
MODES = ("binary", "scheduled")


@dataclass(frozen=True)
class OpCountReport:
    form: str
    algorithm: str
    mode: str
    squarings: int
    multiplications: int
    inversions: int
    reductions: int
    products: int
    weighted_cost: float
    step_ops: int
    outcome: str
    digits: int
    seconds: float

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def decimal_digits(K: int, p: int, n: int) -> int:
    """Number of decimal digits of ``K*p^n + 1`` without building the string."""
    N = K * p**n + 1
    d = int(N.bit_length() * math.log10(2)) + 1
    while 10 ** (d - 1) > N:
        d -= 1
    while 10**d <= N:
        d += 1
    return d


def estimated_digits(K: int, p: int, n: int) -> int:
    return int(math.log10(K) + n * math.log10(p)) + 1


def count_certify(form: ProthForm, a: int = 2, schedule_mode: str = "scheduled",
                  inversion_cost: float = DEFAULT_INVERSION_COST,
                  digit_cap: int = DEFAULT_DIGIT_CAP) -> OpCountReport:
    """Run the certifier with instrumented arithmetic and report the counts.

    ``schedule_mode`` is ``"binary"`` (square-and-multiply for every p-th
    power) or ``"scheduled"`` (the cheaper plan under ``inversion_cost``).
    The jump-start certifier is used when ``K < p^n``.
    """
    if schedule_mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {schedule_mode!r}")
    if estimated_digits(form.K, form.p, form.n) > digit_cap:
        raise ResourceError(f"{form} has more than {digit_cap} digits")
    counter = OpCounter()
    run = certify_alg2 if form.generalized else certify_alg1
    start = time.perf_counter()
    verdict = run(form, a, counter=counter, schedule_mode=schedule_mode,
                  inversion_cost=inversion_cost)
    elapsed = time.perf_counter() - start
    if schedule_mode == "binary":
        schedule = binary_schedule(form.p)
    else:
        schedule = choose_schedule(form.p, inversion_cost)
    return OpCountReport(
        form=str(form),
        algorithm=run.__name__,
        mode=schedule_mode,
        squarings=counter.squarings,
        multiplications=counter.multiplications,
        inversions=counter.inversions,
        reductions=counter.reductions,
        products=counter.products,
        weighted_cost=counter.weighted(inversion_cost),
        step_ops=schedule.total_ops,
        outcome=verdict.outcome.value,
        digits=decimal_digits(form.K, form.p, form.n),
        seconds=elapsed,
    )


def scaling_run(K: int, p: int, n_list: Iterable[int], a: int = 2,
                schedule_mode: str = "scheduled", **kwargs) -> list[OpCountReport]:
    n_list = list(n_list)
    if not n_list:
        raise ValueError("n_list is empty")
    cap = kwargs.get("digit_cap", DEFAULT_DIGIT_CAP)
    for n in n_list:
        if estimated_digits(K, p, n) > cap:
            raise ResourceError(f"{K}*{p}^{n}+1 has more than {cap} digits")
    return [count_certify(ProthForm(K, p, n), a, schedule_mode, **kwargs) for n in n_list]


def affine_slope(reports: list[OpCountReport], n_values: list[int]) -> float | None:
    """Per-step product count if the counts are exactly affine in ``n``."""
    if len(reports) < 2:
        return None
    pairs = sorted(zip(n_values, (r.products for r in reports)))
    (n0, c0), (n1, c1) = pairs[0], pairs[1]
    if n1 == n0:
        return None
    slope = (c1 - c0) / (n1 - n0)
    for n, c in pairs:
        if c - c0 != slope * (n - n0):
            return None
    return slope


def format_table(reports: list[OpCountReport]) -> str:
    header = ("form", "mode", "sq", "mul", "inv", "products", "weighted", "digits", "seconds")
    rows = [header] + [
        (r.form, r.mode, str(r.squarings), str(r.multiplications), str(r.inversions),
         str(r.products), f"{r.weighted_cost:g}", str(r.digits), f"{r.seconds:.4f}")
        for r in reports
    ]
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows)
