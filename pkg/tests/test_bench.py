import json

import pytest

from genproth.bench import (
    DEFAULT_DIGIT_CAP,
    affine_slope,
    count_certify,
    decimal_digits,
    estimated_digits,
    format_table,
    scaling_run,
)
from genproth.errors import ResourceError
from genproth.forms import ProthForm


def step_delta(K, p, n, mode, **kw):
    """Counts added by one more chain step (both runs must walk the full chain)."""
    a = count_certify(ProthForm(K, p, n), 2, mode, **kw)
    b = count_certify(ProthForm(K, p, n + 1), 2, mode, **kw)
    assert a.outcome == b.outcome == "composite"
    return (b.squarings - a.squarings, b.multiplications - a.multiplications,
            b.inversions - a.inversions)


def test_mersenne_127_per_step():
    assert step_delta(2, 127, 50, "binary") == (6, 6, 0)
    assert step_delta(2, 127, 50, "scheduled") == (7, 0, 1)


def test_p_two_is_one_squaring():
    for mode in ("binary", "scheduled"):
        assert step_delta(3, 2, 50, mode) == (1, 0, 0)


@pytest.mark.parametrize("s", [3, 5, 7])
def test_mersenne_step_ops(s):
    p = 2**s - 1
    binary = count_certify(ProthForm(2, p, 20), 2, "binary")
    assert binary.step_ops == 2 * (s - 1)
    # a division counted as one product, as in the s + 1 count
    sched = count_certify(ProthForm(2, p, 20), 2, "scheduled", inversion_cost=1.0)
    assert sched.step_ops == s + 1


@pytest.mark.parametrize("p", [3, 7, 31, 127, 257])
def test_scheduled_never_costs_more(p):
    form = ProthForm(2, p, 30)
    binary = count_certify(form, 2, "binary")
    sched = count_certify(form, 2, "scheduled")
    assert sched.weighted_cost <= binary.weighted_cost
    assert sched.outcome == binary.outcome


def test_scaling_is_affine():
    ns = [100, 200, 400]
    reports = scaling_run(2, 3, ns)
    counts = [r.products for r in reports]
    slope = affine_slope(reports, ns)
    assert slope is not None and slope > 0
    assert counts[1] - counts[0] == 100 * slope
    assert counts[2] - counts[1] == 200 * slope
    # ratio close to 1 : 2 : 4
    for r, want in zip(counts, (1, 2, 4)):
        assert abs(r / counts[0] - want) <= 0.1 * want


def test_singleton_list():
    reports = scaling_run(2, 3, [10])
    assert len(reports) == 1
    assert affine_slope(reports, [10]) is None


def test_empty_list():
    with pytest.raises(ValueError):
        scaling_run(2, 3, [])


def test_refuses_record_size():
    with pytest.raises(ResourceError):
        scaling_run(2, 3, [1175232])
    assert estimated_digits(2, 3, 1175232) > DEFAULT_DIGIT_CAP


def test_digits():
    for K, p, n in [(2, 3, 2), (1, 2, 4), (9, 7, 5), (4, 5, 30)]:
        assert decimal_digits(K, p, n) == len(str(K * p**n + 1))


def test_report_json_and_table():
    r = count_certify(ProthForm(2, 127, 5), 2, "scheduled")
    d = json.loads(r.to_json())
    assert d["form"] == "2*127^5+1" and d["mode"] == "scheduled"
    assert d["products"] == d["squarings"] + d["multiplications"]
    table = format_table([r])
    assert "2*127^5+1" in table and len(table.splitlines()) == 2


def test_unknown_mode():
    with pytest.raises(ValueError):
        count_certify(ProthForm(2, 3, 3), 2, "fast")
