"""Acceptance suite: every criterion at its stated tolerance and time budget.

Run directly (``python3 tests/test_acceptance.py``) or through pytest; either
way one PASS/FAIL line is printed per criterion, preceded by the individual
checks that make it up.
"""

import sys

import pytest

from kuramoto_sync import selfcheck

# criterion -> (title, check functions, runtime budget in seconds or None)
CRITERIA = {
    1: ("reference constants", [selfcheck.check_constants], 10.0),
    2: ("exhaustive counting", [selfcheck.check_counting], 60.0),
    3: ("stability cross-validation", [selfcheck.check_stability], 60.0),
    4: ("figure data", [selfcheck.check_figures], None),
    5: ("dynamics", [selfcheck.check_dynamics], 120.0),
    6: ("convergence and properties", [selfcheck.check_convergence_properties], None),
}


def evaluate(criterion):
    title, fns, budget = CRITERIA[criterion]
    results = [r for fn in fns for r in fn()]
    seconds = sum(r.seconds for r in results)
    in_budget = budget is None or seconds < budget
    ok = bool(results) and all(r.passed for r in results) and in_budget
    limit = f" (limit {budget:g} s)" if budget is not None else ""
    summary = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion} {title}: " \
              f"{sum(r.passed for r in results)}/{len(results)} checks, {seconds:.1f} s{limit}"
    return ok, results, summary


def report(results, summary, out):
    for r in results:
        print("    " + r.line(), file=out)
    print(summary, file=out, flush=True)


@pytest.mark.slow
@pytest.mark.parametrize("criterion", sorted(CRITERIA))
def test_criterion(criterion, capsys):
    ok, results, summary = evaluate(criterion)
    with capsys.disabled():
        print()
        report(results, summary, sys.stdout)
    failed = [r.line() for r in results if not r.passed]
    assert ok, summary + ("\n" + "\n".join(failed) if failed else "")


if __name__ == "__main__":
    all_ok = True
    for c in sorted(CRITERIA):
        ok, results, summary = evaluate(c)
        report(results, summary, sys.stdout)
        all_ok &= ok
    sys.exit(0 if all_ok else 1)
