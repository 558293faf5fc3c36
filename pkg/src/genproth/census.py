"""Pseudoprime census and family search."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import FormError, IncompleteFactorization, ResourceError
from .forms import ProthForm
from .oracle import SieveOracle, build_sieve, factorize, is_prime_u64
from .primality import Outcome, Verdict, certify, is_p_strong

log = logging.getLogger(__name__)

P_STRONG = "p-strong"
COMPLETE_STRONG = "complete-strong"
KINDS = (P_STRONG, COMPLETE_STRONG)


@dataclass(frozen=True)
class CensusRecord:
    N: int
    kind: str
    bases: tuple
    factors: tuple
    p: Optional[int] = None

    def as_dict(self) -> dict:
        return {
            "n": self.N,
            "kind": self.kind,
            "p": self.p,
            "bases": list(self.bases),
            "factors": [list(f) for f in self.factors],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict())


def passes(kind: str, N: int, bases: Sequence[int], p: Optional[int] = None,
           factors: Optional[Sequence[tuple[int, int]]] = None) -> bool:
    """Whether odd ``N`` passes the census test to every base in ``bases``."""
    if kind == P_STRONG:
        return all(is_p_strong(N, p, a) for a in bases)
    if factors is None:
        factors = factorize(N - 1)
    return all(is_p_strong(N, q, a) for a in bases for q, _ in factors)


def _scan(kind: str, p: Optional[int], bases: tuple, start: int, stop: int,
          sieve: SieveOracle) -> list[CensusRecord]:
    out = []
    for N in sieve.odd_composites(start, stop):
        if kind == P_STRONG:
            if (N - 1) % p or not passes(P_STRONG, N, bases, p):
                continue
            factors = factorize(N - 1)
        else:
            # 2 divides N - 1, so the 2-strong test filters almost everything
            if not all(is_p_strong(N, 2, a) for a in bases):
                continue
            try:
                factors = factorize(N - 1)
            except IncompleteFactorization as exc:
                log.warning("skipping %d: N - 1 has unfactored cofactor %d", N, exc.cofactor)
                continue
            if not passes(COMPLETE_STRONG, N, bases, factors=factors):
                continue
        out.append(CensusRecord(N, kind, bases, tuple(factors), p if kind == P_STRONG else None))
    return out


_worker_sieve: Optional[SieveOracle] = None


def _scan_chunk(args):
    global _worker_sieve
    kind, p, bases, start, stop, limit = args
    if _worker_sieve is None or _worker_sieve.limit != limit:
        _worker_sieve = build_sieve(limit, check_samples=0)
    return _scan(kind, p, bases, start, stop, _worker_sieve)


def enumerate_pseudoprimes(kind: str, bases: Iterable[int], limit: int, p: Optional[int] = None,
                           sieve: Optional[SieveOracle] = None, workers: int = 1,
                           chunk: int = 250_000) -> list[CensusRecord]:
    """All odd composites ``N < limit`` passing the ``kind`` test to every base.

    ``kind`` is ``"p-strong"`` (needs ``p``; only ``N = 1 mod p`` are scanned)
    or ``"complete-strong"``.  With ``workers > 1`` the range is split into
    chunks scanned in separate processes; records come back in ascending
    order either way.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    bases = tuple(bases)
    if not bases:
        raise ValueError("at least one base is required")
    if kind == P_STRONG:
        if p is None or p >= 2**64 or not is_prime_u64(p):
            raise ValueError(f"p-strong census needs a prime p, got {p}")
    if limit <= 9:
        return []
    if workers <= 1:
        if sieve is None or sieve.limit < limit:
            sieve = build_sieve(limit)
        return _scan(kind, p, bases, 9, limit, sieve)
    bounds = list(range(9, limit, chunk)) + [limit]
    tasks = [(kind, p, bases, lo, hi, limit) for lo, hi in zip(bounds, bounds[1:])]
    with ProcessPoolExecutor(workers) as pool:
        parts = list(pool.map(_scan_chunk, tasks))
    return [rec for part in parts for rec in part]


@dataclass(frozen=True)
class SearchHit:
    n: int
    N: int
    verdict: Optional[Verdict]
    error: str = ""
    oracle: Optional[bool] = field(default=None)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "N": str(self.N),
            "verdict": self.verdict.as_dict() if self.verdict else None,
            "error": self.error,
            "oracle_prime": self.oracle,
        }


def search_family(K: int, p: int, n_from: int, n_to: int, base: int = 2,
                  sieve: Optional[SieveOracle] = None,
                  retry_bases: Sequence[int] = (3, 5, 7)) -> list[SearchHit]:
    """Certify ``K*p^n + 1`` for ``n_from <= n <= n_to``.

    Uses the jump-start certifier when ``K < p^n`` and the full-chain one
    otherwise, retrying ``retry_bases`` after an inconclusive result.  Invalid
    forms are recorded, not raised.  Verdicts for ``N`` below the sieve limit
    are checked against the sieve and a disagreement raises ``AssertionError``.
    """
    hits = []
    bases = (base,) + tuple(b for b in retry_bases if b != base)
    for n in range(n_from, n_to + 1):
        try:
            form = ProthForm(K, p, n)
        except FormError as exc:
            hits.append(SearchHit(n, K * p**n + 1 if n >= 0 else 0, None, str(exc)))
            continue
        try:
            verdict = certify(form, bases, max_tries=len(bases))
        except ResourceError as exc:
            hits.append(SearchHit(n, form.N, None, str(exc)))
            continue
        oracle = None
        if sieve is not None and form.N < sieve.limit:
            oracle = sieve.is_prime(form.N)
            decided = verdict.outcome in (Outcome.PRIME, Outcome.COMPOSITE)
            if decided and verdict.is_prime != oracle:
                raise AssertionError(f"verdict {verdict.outcome} disagrees with sieve for {form}")
        hits.append(SearchHit(n, form.N, verdict, oracle=oracle))
    return hits
