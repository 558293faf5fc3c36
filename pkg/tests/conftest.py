import pytest

CRITERIA = {
    "AC1": "census of complete strong pseudoprimes to base 2 below 1373653",
    "AC2": "smallest 2-strong pseudoprime to bases 2 and 3",
    "AC3": "certifier soundness on generalized forms below 10^7",
    "AC4": "inconclusive fraction is exact over bases [2, N-2]",
    "AC5": "scheduled p-th power operation counts",
    "AC6": "product counts are affine in n",
    "AC7": "Proth and Pepin specializations",
    "AC8": "certificates verify and single-field mutations fail",
}

_results: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record the outcome of an acceptance criterion: ``criterion(key, ok, detail)``."""
    def record(key, ok, detail=""):
        _results[key] = (bool(ok), detail)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for key, title in CRITERIA.items():
        if key in _results:
            ok, detail = _results[key]
            status = "PASS" if ok else "FAIL"
        else:
            status, detail = "NOT RUN", ""
        tr.write_line(f"{status:7} {key} {title}" + (f" | {detail}" if detail else ""))
    extras = sorted(k for k in _results if k not in CRITERIA)
    for key in extras:
        ok, detail = _results[key]
        tr.write_line(f"{'PASS' if ok else 'FAIL':7} {key} | {detail}")
