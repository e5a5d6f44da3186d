import sys
import time
from contextlib import contextmanager
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nacelle_tmd.tmd_core import TmdAxisParams, TmdConfig  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def axis(mass=1.0, k=100.0, c=0.0, **kw) -> TmdAxisParams:
    kw.setdefault("stop_max", 10.0)
    kw.setdefault("stop_min", -10.0)
    return TmdAxisParams(mass=mass, k=k, c=c, **kw)


def x_only(**kw) -> TmdConfig:
    g = kw.pop("gravity", 9.81)
    return TmdConfig(axis(**kw), TmdAxisParams.disabled(), gravity=g)


@pytest.fixture
def two_mass_config() -> TmdConfig:
    return TmdConfig(axis(mass=2.0, k=50.0, c=1.0), axis(mass=3.0, k=108.0, c=1.5))


@contextmanager
def criterion(number: int, title: str):
    """Record one PASS/FAIL line for an acceptance criterion.

    The body fills ``info["detail"]`` with the measured values; any exception
    (including a failed assert) marks the criterion as failed.
    """
    info = {"detail": ""}
    start = time.perf_counter()
    try:
        yield info
    except BaseException as exc:
        reason = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        ACCEPTANCE_LINES.append(f"[FAIL] {number:2d}. {title}: {info['detail']} ({reason})")
        raise
    else:
        elapsed = time.perf_counter() - start
        ACCEPTANCE_LINES.append(f"[PASS] {number:2d}. {title}: {info['detail']} [{elapsed:.1f} s]")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
