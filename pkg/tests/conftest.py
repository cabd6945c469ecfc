import re

import numpy as np
import pytest
from hypothesis import HealthCheck, settings


settings.register_profile(
    "default",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")

# criterion id -> list of (outcome, detail) from every test tagged with it
_CRITERIA: dict[str, list] = {}


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="also run long benchmarks")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(cid): acceptance criterion reported in the terminal summary")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="slow benchmark; run with --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "setup" and not rep.skipped and not rep.failed:
        return
    if rep.when == "teardown" and not rep.failed:
        return
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    if hasattr(rep, "wasxfail"):
        status = "FAIL (known shortfall: " + rep.wasxfail + ")" if rep.skipped else "PASS (unexpected)"
    elif rep.skipped:
        reason = rep.longrepr[2] if isinstance(rep.longrepr, tuple) else str(rep.longrepr)
        status = "NOT RUN (" + reason.removeprefix("Skipped: ") + ")"
    else:
        status = "PASS" if rep.passed else "FAIL"
    _CRITERIA.setdefault(marker.args[0], []).append((status, item.name, detail))


def _order(cid):
    return int(re.sub(r"\D", "", cid) or 0)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for cid in sorted(_CRITERIA, key=_order):
        rows = _CRITERIA[cid]
        worst = next((s for s, _, _ in rows if not s.startswith("PASS")), "PASS")
        details = " | ".join(d for _, _, d in rows if d)
        terminalreporter.write_line(f"{cid:<5} {worst:<8} {details}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
