import os
import re
import sys
from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def rationals(max_num=10**6, max_den=10**3, nonzero=False):
    fr = st.builds(
        Fraction,
        st.integers(-max_num, max_num),
        st.integers(1, max_den),
    )
    return fr.filter(lambda q: q != 0) if nonzero else fr


def coeff_lists(min_degree=1, max_degree=5, max_num=50, max_den=6):
    """Ascending coefficient lists with a nonzero leading coefficient."""
    return st.integers(min_degree, max_degree).flatmap(
        lambda d: st.tuples(
            st.lists(rationals(max_num, max_den), min_size=d, max_size=d),
            rationals(max_num, max_den, nonzero=True),
        ).map(lambda t: t[0] + [t[1]])
    )


_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")


def pytest_terminal_summary(terminalreporter):
    rows = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = _CRITERION.search(getattr(rep, "nodeid", ""))
            if m and rep.when in ("call", "setup"):
                n = int(m.group(1))
                ok = outcome == "passed"
                if n not in rows or not ok:
                    rows[n] = (ok, m.group(2).replace("_", " "))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(rows):
        ok, name = rows[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {name}")
