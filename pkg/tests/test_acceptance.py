"""Acceptance criteria, checked literally.

Each test records one PASS/FAIL line (printed in the terminal summary) and
then asserts.  Tolerances are exact everywhere: zero mismatches, exact
rationals and exact operation counts.
"""

import io
import json
import math
import random
import time
from dataclasses import fields, replace
from fractions import Fraction

import pytest

from genproth.arith import binary_schedule, build_schedule
from genproth.bench import affine_slope, scaling_run
from genproth.cli import main
from genproth.forms import ProthForm
from genproth.oracle import build_sieve, factorize
from genproth.primality import (
    Certificate,
    Outcome,
    certify_alg1,
    certify_alg2,
    generalized_proth,
    inconclusive_probability,
    pepin,
    pocklington,
    proth_classic,
    verify_certificate,
)

PUBLISHED_TEN = [2047, 3277, 4033, 8321, 65281, 80581, 85489, 88357, 104653, 130561]
GRID_PRIMES = (2, 3, 5, 7, 13)
GRID_BASES = (2, 3, 5, 7)
SWEEP_LIMIT = 10**7
EXACT_LIMIT = 10**5
PROTH_LIMIT = 10**6
MIN_MUTATIONS = 5000

pytestmark = pytest.mark.slow


def generalized_forms(limit, primes=GRID_PRIMES):
    for p in primes:
        n = 1
        while p**n + 1 < limit:
            for K in range(1, min(p**n, (limit - 2) // p**n + 1)):
                if K % p:
                    yield ProthForm(K, p, n)
            n += 1


def cli(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, [json.loads(line) for line in out.getvalue().splitlines()]


@pytest.fixture(scope="module")
def big_sieve():
    return build_sieve(SWEEP_LIMIT)


@pytest.fixture(scope="module")
def sweep(big_sieve):
    """Run both certifiers over the whole grid once; later criteria reuse the results."""
    forms = list(generalized_forms(SWEEP_LIMIT))
    bad, certificates, counts = [], [], {o: 0 for o in Outcome}
    for form in forms:
        prime = big_sieve.is_prime(form.N)
        for a in GRID_BASES:
            for run in (certify_alg1, certify_alg2):
                v = run(form, a)
                counts[v.outcome] += 1
                if v.outcome is Outcome.PRIME and not prime:
                    bad.append((run.__name__, str(form), a, "prime on composite"))
                if v.outcome is Outcome.COMPOSITE and prime:
                    bad.append((run.__name__, str(form), a, "composite on prime"))
                if v.certificate is not None:
                    certificates.append(v.certificate)
    return forms, bad, certificates, counts


def test_ac1_complete_strong_census(criterion):
    start = time.perf_counter()
    code, records = cli("census", "--kind", "complete", "--bases", "2", "--limit", "1373653")
    elapsed = time.perf_counter() - start
    got = [r["n"] for r in records]
    ok = code == 0 and got == PUBLISHED_TEN
    criterion("AC1", ok, f"{len(got)} records (expected 10), first ten match: "
                         f"{got[:10] == PUBLISHED_TEN}, 11th: {got[10] if len(got) > 10 else None}, "
                         f"{elapsed:.1f}s")
    assert ok


def test_ac2_smallest_two_strong_pseudoprime(criterion):
    code, records = cli("census", "--kind", "pstrong", "--p", "2", "--bases", "2,3",
                        "--limit", "1500000")
    first = records[0]["n"] if records else None
    ok = code == 0 and first == 1373653
    criterion("AC2", ok, f"first record {first}")
    assert ok


def test_ac3_soundness_sweep(sweep, criterion):
    forms, bad, _, counts = sweep
    tally = ", ".join(f"{o.value}={c}" for o, c in counts.items())
    ok = not bad
    criterion("AC3", ok, f"{len(forms)} forms x {len(GRID_BASES)} bases x 2 certifiers, "
                         f"{len(bad)} unsound verdicts ({tally})")
    assert ok, bad[:5]


@pytest.fixture(scope="module")
def inconclusive_counts():
    sieve = build_sieve(EXACT_LIMIT)
    rows = []
    for form in generalized_forms(EXACT_LIMIT):
        if not sieve.is_prime(form.N):
            continue
        N = form.N
        hits = sum(certify_alg2(form, a).outcome is Outcome.PROBABLE_PRIME for a in range(2, N - 1))
        last = certify_alg2(form, N - 1).outcome is Outcome.PROBABLE_PRIME
        rows.append((form, hits, last))
    return rows


def test_ac4_inconclusive_fraction_exact(inconclusive_counts, criterion):
    """Bases 2 <= a <= N-2, as the criterion states them."""
    mismatches = []
    checked = 0
    for form, hits, _ in inconclusive_counts:
        N = form.N
        if N - 3 <= 0:  # N = 3 has no base in [2, N-2]
            continue
        checked += 1
        if Fraction(hits, N - 3) != inconclusive_probability(form):
            mismatches.append(str(form))
    ok = checked > 0 and not mismatches
    criterion("AC4", ok, f"{checked} primes, {len(mismatches)} mismatches over [2, N-2]"
                         f" (first: {mismatches[:3]})")
    assert ok


def test_ac4_companion_full_base_range(inconclusive_counts, criterion):
    """The same count over 2 <= a <= N-1, the range the N-2 denominator counts."""
    mismatches = [str(form) for form, hits, last in inconclusive_counts
                  if Fraction(hits + last, form.N - 2) != inconclusive_probability(form)]
    ok = not mismatches
    criterion("AC4-companion", ok, f"{len(inconclusive_counts)} primes, {len(mismatches)} "
                                   "mismatches over [2, N-1]")
    assert ok


def test_ac5_schedule_counts(criterion):
    problems = []
    s = build_schedule(127)
    if (s.predicted_squarings, s.predicted_multiplications, s.predicted_inversions) != (7, 0, 1):
        problems.append("127 scheduled")
    if binary_schedule(127).total_ops != 12:
        problems.append("127 binary")
    for k in (3, 5, 7):
        p = 2**k - 1
        if build_schedule(p).total_ops != k + 1:
            problems.append(f"2^{k}-1 scheduled")
        if binary_schedule(p).total_ops != 2 * (k - 1):
            problems.append(f"2^{k}-1 binary")
    ok = not problems
    criterion("AC5", ok, "127: 7 squarings + 1 division vs 12; s in {3,5,7}: s+1 vs 2(s-1)"
              if ok else f"wrong: {problems}")
    assert ok


def test_ac6_affine_scaling(criterion):
    ns = [100, 200, 400]
    reports = scaling_run(2, 3, ns)
    counts = [r.products for r in reports]
    c = (counts[1] - counts[0]) / 100
    ok = counts[1] - counts[0] == 100 * c and counts[2] - counts[1] == 200 * c
    ok = ok and affine_slope(reports, ns) == c
    seconds = ", ".join(f"{r.seconds * 1e3:.2f}ms" for r in reports)
    criterion("AC6", ok, f"products {counts}, c = {c:g} per step, wall time {seconds}")
    assert ok


def minus_one_certifies(K, n, a):
    """Proth-style check: the first S_m = a^(K*2^m) that is -1 must satisfy 4^(m+1) > K*2^n."""
    N = K * 2**n + 1
    s = pow(a, K, N)
    for m in range(n):
        if s == N - 1:
            return 4 ** (m + 1) > K * 2**n
        s = s * s % N
    return False


def minus_one_literal(K, n, a):
    """Same check with the index taken at the -1 itself: S_j == -1 and 4^j > K*2^n."""
    N = K * 2**n + 1
    return any(pow(a, K * 2**j, N) == N - 1 and 4**j > K * 2**n for j in range(n))


def test_ac7_specializations(criterion):
    mismatches, literal_gaps, forms = [], [], 0
    for n in range(1, 20):
        for K in range(1, min(2**n, (PROTH_LIMIT - 2) // 2**n + 1), 2):
            form = ProthForm(K, 2, n)
            forms += 1
            for a in GRID_BASES:
                if math.gcd(a, form.N) != 1:
                    continue
                direct = minus_one_certifies(K, n, a)
                one = certify_alg1(form, a).outcome is Outcome.PRIME
                two = certify_alg2(form, a).outcome is Outcome.PRIME
                if not one == two == direct:
                    mismatches.append((str(form), a))
                if minus_one_literal(K, n, a) and not one:
                    literal_gaps.append((str(form), a))
    pepin_ok = all(pepin(k).outcome is Outcome.PRIME for k in range(1, 5))
    f5 = pepin(5)
    pepin_ok = pepin_ok and f5.outcome is Outcome.COMPOSITE and factorize(2**32 + 1)[0] == (641, 1)
    ok = not mismatches and not literal_gaps and pepin_ok
    criterion("AC7", ok, f"{forms} Proth forms, {len(mismatches)} mismatches, "
                         f"Pepin F1-F4 prime and F5 composite (641): {pepin_ok}")
    assert ok, (mismatches[:5], literal_gaps[:5])


def mutate(cert, name, rng):
    value = getattr(cert, name)
    delta = 0
    while delta == 0:
        delta = rng.randint(-1000, 1000)
    return replace(cert, **{name: value + delta})


def test_ac8_certificates(sweep, criterion):
    _, _, certificates, _ = sweep
    extra = [pepin(k).certificate for k in range(1, 5)]
    for form in generalized_forms(20_000):
        for run in (generalized_proth, pocklington):
            v = run(form, 3)
            if v.certificate:
                extra.append(v.certificate)
        if form.proth_classic:
            v = proth_classic(form, 3)
            if v.certificate:
                extra.append(v.certificate)
    emitted = certificates + extra
    rejected = [c for c in emitted if not verify_certificate(c)]
    text_ok = all(Certificate.from_text(c.to_text()) == c for c in emitted[::50])

    rng = random.Random(20261016)
    pool = [c for c in certificates if c.N >= 10**5]
    names = [f.name for f in fields(Certificate) if f.name != "method"]
    survivors, total = [], 0
    while total < MIN_MUTATIONS:
        cert = rng.choice(pool)
        for name in names:
            total += 1
            bad = mutate(cert, name, rng)
            if verify_certificate(bad):
                survivors.append((name, bad))
    ok = not rejected and text_ok and not survivors
    criterion("AC8", ok, f"{len(emitted) - len(rejected)}/{len(emitted)} certificates verify, "
                         f"{total - len(survivors)}/{total} mutations rejected")
    assert ok, (rejected[:3], survivors[:3])
