"""Primality tests and certifiers for ``N = K*p^n + 1``.

Every test returns a :class:`Verdict`.  ``PRIME`` verdicts carry a
:class:`Certificate` that :func:`verify_certificate` re-checks from scratch;
``COMPOSITE`` verdicts carry a :class:`Witness` that :func:`verify_witness`
re-checks.
"""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional

from .arith import (
    DEFAULT_INVERSION_COST,
    OpCounter,
    PowerSchedule,
    binary_schedule,
    choose_schedule,
    mod_pow,
    phi_p_eval,
    pow_p_scheduled,
)
from .errors import FormError, NotInvertible, ResourceError
from .forms import ProthForm, compute_J, threshold_ok
from .oracle import factorize, is_prime_u64

DEFAULT_BASES = (2, 3, 5, 7)
DEFAULT_MAX_TRIES = 4
PEPIN_MAX_N = 16


class Outcome(str, Enum):
    PRIME = "prime"
    COMPOSITE = "composite"
    PROBABLE_PRIME = "probable-prime"
    INCONCLUSIVE = "inconclusive"


class Reason(str, Enum):
    FERMAT_FAIL = "fermat-fail"
    CHAIN_BREAK = "chain-break"
    FACTOR_FOUND = "factor-found"
    POCKLINGTON_GCD = "pocklington-gcd"
    EULER_FAIL = "euler-fail"


@dataclass(frozen=True)
class Witness:
    """Why ``N`` is composite.

    ``value`` is the residue that failed (``a^(N-1)`` for a Fermat failure,
    ``S_(i-1)`` for a chain break, ``a^((N-1)/2)`` for an Euler failure) or the
    factor found.  ``index`` is the chain position ``i`` where relevant.
    """

    reason: Reason
    base: int
    N: int
    p: int
    value: int
    index: Optional[int] = None

    def as_dict(self) -> dict:
        d = asdict(self)
        d["reason"] = self.reason.value
        d["value"] = str(self.value)
        d["N"] = str(self.N)
        return d


@dataclass(frozen=True)
class Certificate:
    """Data proving ``N = K*p^n + 1`` prime.

    For every method except ``pocklington`` the proof is: with
    ``S_i = base^(K*p^i) mod N``, ``S_(j-1) != 1``, ``S_j == 1``,
    ``Phi_p(S_(j-1)) == 0 (mod N)`` and ``p^(2j) > K*p^n``.  For
    ``pocklington``, ``j == n``, ``S_n == 1`` and ``gcd(S_(n-1) - 1, N) == 1``.
    Fields are plain integers so tampered records can be loaded and rejected.
    """

    K: int
    p: int
    n: int
    N: int
    base: int
    j: int
    s_start: int
    s_prev: int
    s_j: int
    method: str = "alg1"

    @property
    def form(self) -> ProthForm:
        return ProthForm(self.K, self.p, self.n)

    def as_dict(self) -> dict:
        return {k: (v if isinstance(v, str) else str(v)) for k, v in asdict(self).items()}

    def to_text(self) -> str:
        lines = ["# generalized Proth primality certificate"]
        lines += [f"{key}={value}" for key, value in self.as_dict().items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_mapping(cls, data: dict) -> "Certificate":
        kwargs = {}
        for name in cls.__dataclass_fields__:
            if name not in data:
                raise ValueError(f"certificate is missing {name!r}")
            raw = data[name]
            kwargs[name] = str(raw) if name == "method" else int(raw)
        return cls(**kwargs)

    @classmethod
    def from_text(cls, text: str) -> "Certificate":
        data = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"malformed certificate line {line!r}")
            data[key.strip()] = value.strip()
        return cls.from_mapping(data)


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    kind: str
    N: int
    base: Optional[int] = None
    certificate: Optional[Certificate] = None
    witness: Optional[Witness] = None
    note: str = ""
    tried: tuple = field(default=())

    @property
    def is_prime(self) -> bool:
        return self.outcome is Outcome.PRIME

    def as_dict(self) -> dict:
        return {
            "outcome": self.outcome.value,
            "kind": self.kind,
            "N": str(self.N),
            "base": self.base,
            "certificate": self.certificate.as_dict() if self.certificate else None,
            "witness": self.witness.as_dict() if self.witness else None,
            "note": self.note,
            "tried": list(self.tried),
        }


def _prime(kind, form, base, j, s_start, s_prev, s_j, note=""):
    cert = Certificate(form.K, form.p, form.n, form.N, base, j, s_start, s_prev, s_j, kind)
    return Verdict(Outcome.PRIME, kind, form.N, base, certificate=cert, note=note)


def _composite(kind, N, p, base, reason, value, index=None):
    return Verdict(Outcome.COMPOSITE, kind, N, base,
                   witness=Witness(reason, base, N, p, value, index))


def _screen_base(kind: str, N: int, p: int, a: int) -> Optional[Verdict]:
    """Verdict forced by the base alone, or ``None`` to run the test."""
    g = gcd(a, N)
    if g == 1:
        return None
    if g == N:
        return Verdict(Outcome.INCONCLUSIVE, kind, N, a, note="base is 0 mod N")
    return _composite(kind, N, p, a, Reason.FACTOR_FOUND, g)


# ----------------------------------------------------------------------------
# classical criteria


def jacobi(a: int, N: int) -> int:
    """Jacobi symbol ``(a / N)`` for odd ``N >= 3``."""
    if N < 3 or N % 2 == 0:
        raise ValueError(f"Jacobi symbol needs odd N >= 3, got {N}")
    a %= N
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if N % 8 in (3, 5):
                result = -result
        a, N = N, a
        if a % 4 == 3 and N % 4 == 3:
            result = -result
        a %= N
    return result if N == 1 else 0


def pepin(n: int, max_n: int = PEPIN_MAX_N, counter: Optional[OpCounter] = None) -> Verdict:
    """Pepin's test on the Fermat number ``F_n = 2^(2^n) + 1``.

    A prime verdict carries a certificate for ``F_n = 1*2^(2^n) + 1`` with
    base 3 and ``j = 2^n``.
    """
    if n < 1:
        raise ValueError(f"Pepin's test needs n >= 1, got {n}")
    if n > max_n:
        raise ResourceError(f"F_{n} exceeds the configured cap n <= {max_n}")
    e = 2**n
    F = 2**e + 1
    form = ProthForm(1, 2, e)
    x = 3
    for _ in range(e - 1):
        x = x * x % F
        if counter is not None:
            counter.squarings += 1
            counter.reductions += 1
    if x == F - 1:
        return _prime("pepin", form, 3, e, 3, x, 1)
    return _composite("pepin", F, 2, 3, Reason.EULER_FAIL, x)


def proth_classic(form: ProthForm, a: int, counter: Optional[OpCounter] = None) -> Verdict:
    """Proth's criterion for ``N = K*2^n + 1`` with odd ``K < 2^n``.

    When ``(a / N) = -1`` the verdict is iff-strength; otherwise a failed
    congruence is only inconclusive.
    """
    if not form.proth_classic:
        raise FormError("proth", f"{form} is not a Proth number (need p = 2, odd K < 2^n)")
    N = form.N
    forced = _screen_base("proth", N, 2, a)
    if forced:
        return forced
    s_start = mod_pow(a, form.K, N, counter)
    x = mod_pow(s_start, 2 ** (form.n - 1), N, counter)
    if x == N - 1:
        return _prime("proth", form, a, form.n, s_start, x, 1)
    if jacobi(a, N) == -1:
        return _composite("proth", N, 2, a, Reason.EULER_FAIL, x)
    return Verdict(Outcome.INCONCLUSIVE, "proth", N, a,
                   note="congruence failed and (a/N) != -1")


def generalized_proth(form: ProthForm, a: int, counter: Optional[OpCounter] = None) -> Verdict:
    """Prime iff ``Phi_p(a^((N-1)/p)) == 0 (mod N)``, given ``K < p^n``.

    A failed congruence is inconclusive: either ``N`` is composite or ``a``
    is a ``p``-th power residue.
    """
    if not form.generalized:
        raise FormError("generalized", f"{form} needs K < p^n")
    N, p = form.N, form.p
    forced = _screen_base("gproth", N, p, a)
    if forced:
        return forced
    # one exponentiation chain straight to a^((N-1)/p)
    y = mod_pow(a, (N - 1) // p, N, counter)
    if phi_p_eval(y, p, N, counter) == 0:
        return _prime("gproth", form, a, form.n, pow(a, form.K, N), y, 1,
                      note="base is a p-th power non-residue")
    return Verdict(Outcome.INCONCLUSIVE, "gproth", N, a,
                   note="Phi_p(a^((N-1)/p)) != 0: N composite or a is a p-th power residue")


def pocklington(form: ProthForm, a: int, counter: Optional[OpCounter] = None) -> Verdict:
    """Pocklington: ``a^(N-1) == 1`` and ``gcd(a^((N-1)/p) - 1, N) == 1``.

    The two powers are computed independently, as the criterion states them.
    """
    if not form.generalized:
        raise FormError("generalized", f"{form} needs K < p^n")
    N, p = form.N, form.p
    forced = _screen_base("pocklington", N, p, a)
    if forced:
        return forced
    fermat = mod_pow(a, N - 1, N, counter)
    if fermat != 1:
        return _composite("pocklington", N, p, a, Reason.FERMAT_FAIL, fermat)
    y = mod_pow(a, (N - 1) // p, N, counter)
    g = gcd(y - 1, N)
    if g == 1:
        s_start = pow(a, form.K, N)
        return _prime("pocklington", form, a, form.n, s_start, y, fermat)
    if g == N:
        return Verdict(Outcome.INCONCLUSIVE, "pocklington", N, a,
                       note="a^((N-1)/p) == 1 (mod N)")
    return _composite("pocklington", N, p, a, Reason.POCKLINGTON_GCD, g)


# ----------------------------------------------------------------------------
# p-Miller-Rabin


def split_p_part(m: int, p: int) -> tuple[int, int]:
    """Write ``m = K * p^n`` with ``p`` not dividing ``K``."""
    n = 0
    while m % p == 0:
        m //= p
        n += 1
    return m, n


def _p_chain(N: int, p: int, K: int, n: int, a: int):
    """Walk ``S_0 = a^K``, ``S_i = S_(i-1)^p`` to the first ``S_i == 1``.

    Returns ``(True, None, None)`` when ``S_0 == 1``; ``(passed, i, S_(i-1))``
    at the first ``S_i == 1``; ``(False, None, S_n)`` when none is reached.
    """
    s = pow(a, K, N)
    if s == 1:
        return True, None, None
    for i in range(1, n + 1):
        nxt = pow(s, p, N)
        if nxt == 1:
            return phi_p_eval(s, p, N) == 0, i, s
        s = nxt
    return False, None, s


def p_miller_rabin(N: int, p: int, a: int) -> Verdict:
    """``p``-strong probable prime test to base ``a``.

    ``N - 1 = K*p^n`` with ``p`` not dividing ``K`` is derived internally.
    Passing means ``a^K == 1`` or ``Phi_p(a^(K*p^j)) == 0`` for some
    ``0 <= j < n``; only the ``j`` just before the chain first reaches 1 can
    satisfy the second condition, so the walk stops there.
    """
    if p >= 2**64 or not is_prime_u64(p):
        raise ValueError(f"p = {p} must be a prime below 2**64")
    if N < 3 or (N - 1) % p:
        raise ValueError(f"p = {p} does not divide N - 1 = {N - 1}")
    kind = f"{p}-strong"
    forced = _screen_base(kind, N, p, a)
    if forced:
        return forced
    K, n = split_p_part(N - 1, p)
    passed, i, s = _p_chain(N, p, K, n, a)
    if passed:
        return Verdict(Outcome.PROBABLE_PRIME, kind, N, a)
    if i is None:
        return _composite(kind, N, p, a, Reason.FERMAT_FAIL, s)
    return _composite(kind, N, p, a, Reason.CHAIN_BREAK, s, i)


def is_p_strong(N: int, p: int, a: int) -> bool:
    """Boolean core of :func:`p_miller_rabin` without validation."""
    if gcd(a, N) != 1:
        return False
    K, n = split_p_part(N - 1, p)
    return _p_chain(N, p, K, n, a)[0]


def complete_strong(N: int, a: int, budget: int = 10**6) -> Verdict:
    """``q``-strong to base ``a`` for every prime ``q`` dividing ``N - 1``.

    Raises :class:`~genproth.errors.IncompleteFactorization` when ``N - 1``
    cannot be factored within ``budget``.
    """
    if N < 3 or N % 2 == 0:
        raise ValueError(f"complete strong test needs odd N >= 3, got {N}")
    for q, _ in factorize(N - 1, budget):
        v = p_miller_rabin(N, q, a)
        if v.outcome is not Outcome.PROBABLE_PRIME:
            return replace(v, kind="complete-strong", note=f"fails for q = {q}")
    return Verdict(Outcome.PROBABLE_PRIME, "complete-strong", N, a)


# ----------------------------------------------------------------------------
# certification


class _Powerer:
    def __init__(self, p: int, mode: str, inversion_cost: float):
        if mode == "binary":
            self.schedule: PowerSchedule = binary_schedule(p)
        elif mode in ("scheduled", "auto"):
            self.schedule = choose_schedule(p, inversion_cost)
        else:
            raise ValueError(f"unknown schedule mode {mode!r}")
        self.p = p

    def __call__(self, x: int, N: int, counter: Optional[OpCounter]) -> int:
        if counter is None and self.schedule.label == "binary":
            return pow(x, self.p, N)
        return pow_p_scheduled(x, self.schedule, N, counter)


def certify_alg1(form: ProthForm, a: int, counter: Optional[OpCounter] = None,
                 schedule_mode: str = "auto",
                 inversion_cost: float = DEFAULT_INVERSION_COST) -> Verdict:
    """Walk the whole chain from ``S_0 = a^K``.

    At the first ``S_j == 1``: ``Phi_p(S_(j-1)) == 0`` gives PRIME when
    ``p^(2j) > K*p^n`` and PROBABLE_PRIME otherwise; a nonzero value proves
    compositeness.  No ``S_j == 1`` at all is a Fermat failure.
    """
    N, p = form.N, form.p
    forced = _screen_base("alg1", N, p, a)
    if forced:
        return forced
    power = _Powerer(p, schedule_mode, inversion_cost)
    s_start = mod_pow(a, form.K, N, counter)
    if s_start == 1:
        return Verdict(Outcome.PROBABLE_PRIME, "alg1", N, a, note="a^K == 1")
    s = s_start
    try:
        for i in range(1, form.n + 1):
            nxt = power(s, N, counter)
            if nxt == 1:
                if phi_p_eval(s, p, N, counter) != 0:
                    return _composite("alg1", N, p, a, Reason.CHAIN_BREAK, s, i)
                if threshold_ok(form, i):
                    return _prime("alg1", form, a, i, s_start, s, nxt)
                return Verdict(Outcome.PROBABLE_PRIME, "alg1", N, a,
                               note=f"chain closes at j = {i}, below the threshold")
            s = nxt
    except NotInvertible as exc:
        return _composite("alg1", N, p, a, Reason.FACTOR_FOUND, exc.gcd)
    return _composite("alg1", N, p, a, Reason.FERMAT_FAIL, s)


def certify_alg2(form: ProthForm, a: int, counter: Optional[OpCounter] = None,
                 schedule_mode: str = "auto",
                 inversion_cost: float = DEFAULT_INVERSION_COST) -> Verdict:
    """Jump to ``S_J`` with ``J`` the largest index failing the threshold.

    ``S_J == 1`` is the only inconclusive exit (PROBABLE_PRIME); otherwise
    the verdict is PRIME or COMPOSITE.  Needs ``K < p^n``.
    """
    if not form.generalized:
        raise FormError("generalized", f"{form} needs K < p^n")
    N, p = form.N, form.p
    forced = _screen_base("alg2", N, p, a)
    if forced:
        return forced
    power = _Powerer(p, schedule_mode, inversion_cost)
    J = compute_J(form)
    s_start = mod_pow(a, form.K, N, counter)
    s = s_start
    try:
        for _ in range(J):
            s = power(s, N, counter)
        if s == 1:
            return Verdict(Outcome.PROBABLE_PRIME, "alg2", N, a, note=f"S_J == 1 with J = {J}")
        for i in range(J + 1, form.n + 1):
            nxt = power(s, N, counter)
            if nxt == 1:
                if phi_p_eval(s, p, N, counter) == 0:
                    return _prime("alg2", form, a, i, s_start, s, nxt)
                return _composite("alg2", N, p, a, Reason.CHAIN_BREAK, s, i)
            s = nxt
    except NotInvertible as exc:
        return _composite("alg2", N, p, a, Reason.FACTOR_FOUND, exc.gcd)
    return _composite("alg2", N, p, a, Reason.FERMAT_FAIL, s)


def certify(form: ProthForm, bases: Iterable[int] = DEFAULT_BASES, algorithm: Optional[int] = None,
            max_tries: int = DEFAULT_MAX_TRIES, **kwargs) -> Verdict:
    """Run a certifier, moving to the next base after PROBABLE_PRIME.

    ``algorithm`` defaults to 2 for ``K < p^n`` and 1 otherwise.  The returned
    verdict lists every base tried.
    """
    if algorithm is None:
        algorithm = 2 if form.generalized else 1
    run = {1: certify_alg1, 2: certify_alg2}[algorithm]
    tried = []
    verdict = None
    for a in list(bases)[:max_tries]:
        tried.append(a)
        verdict = run(form, a, **kwargs)
        if verdict.outcome in (Outcome.PRIME, Outcome.COMPOSITE):
            break
    if verdict is None:
        raise ValueError("no bases to try")
    return replace(verdict, tried=tuple(tried))


def inconclusive_probability(form: ProthForm) -> Fraction:
    """Share of bases ``2 <= a <= N-1`` for which ``certify_alg2`` stops at
    ``S_J == 1`` when ``N`` is prime: ``(K*p^J - 1) / (K*p^n - 1)``.

    Emits a ``RuntimeWarning`` when ``N < 2**64`` is composite.
    """
    if not form.generalized:
        raise FormError("generalized", f"{form} needs K < p^n")
    if form.N < 2**64 and not is_prime_u64(form.N):
        warnings.warn(f"{form} is composite; the probability formula assumes N prime",
                      RuntimeWarning, stacklevel=2)
    J = compute_J(form)
    return Fraction(form.K * form.p**J - 1, form.K * form.p**form.n - 1)


# ----------------------------------------------------------------------------
# independent re-checks


def verify_certificate(cert: Certificate) -> bool:
    """Re-derive every checkpoint of ``cert`` and re-check the proof."""
    try:
        form = cert.form
    except FormError:
        return False
    N, p, K = form.N, form.p, form.K
    if cert.N != N or not 1 <= cert.j <= form.n:
        return False
    if gcd(cert.base, N) != 1:
        return False
    s_start = pow(cert.base, K, N)
    s_prev = pow(s_start, p ** (cert.j - 1), N)
    s_j = pow(s_prev, p, N)
    if (cert.s_start, cert.s_prev, cert.s_j) != (s_start, s_prev, s_j):
        return False
    if s_j != 1 or s_prev == 1:
        return False
    if cert.method == "pocklington":
        return cert.j == form.n and form.generalized and gcd(s_prev - 1, N) == 1
    return phi_p_eval(s_prev, p, N) == 0 and threshold_ok(form, cert.j)


def verify_witness(w: Witness) -> bool:
    """Check in one computation that ``w`` really proves ``w.N`` composite."""
    N, p, a = w.N, w.p, w.base
    if w.reason in (Reason.FACTOR_FOUND, Reason.POCKLINGTON_GCD):
        return 1 < w.value < N and N % w.value == 0
    if gcd(a, N) != 1:
        return 1 < gcd(a, N) < N
    if w.reason is Reason.FERMAT_FAIL:
        x = pow(a, N - 1, N)
        return x == w.value and x != 1
    if w.reason is Reason.EULER_FAIL:
        # Euler's criterion: a prime N has a^((N-1)/2) == (a/N)
        x = pow(a, (N - 1) // 2, N)
        return x == w.value and x != jacobi(a, N) % N
    # chain break: x != 1, x^p == 1, Phi_p(x) != 0 exhibits zero divisors mod N
    x = w.value % N
    return x != 1 and pow(x, p, N) == 1 and phi_p_eval(x, p, N) != 0
