"""Shared fixtures; collects the acceptance results for a one-line-per-criterion summary."""

from __future__ import annotations

import pytest

# criterion number -> list of (part, ok, detail)
ACCEPTANCE: dict[int, list[tuple[str, bool, str]]] = {}

TITLES = {
    1: "tangent spheres",
    2: "Grace spheres",
    3: "Euler cones",
    4: "Laguerre relation vs closure",
    5: "Euler-Chapple",
    6: "Thebault conic",
    7: "cosine product",
    8: "Grace radii",
    9: "bicentric rotation",
    10: "Durrande refutation",
    11: "Feuerbach lift chain",
    12: "up-in-ex touch",
    13: "determinism and run time",
}


class Recorder:
    def __init__(self, criterion: int):
        self.criterion = criterion

    def check(self, part: str, value: float, tol: float) -> bool:
        ok = bool(value <= tol)
        detail = f"{value:.3e} <= {tol:.0e}" if ok else f"{value:.3e} > {tol:.0e}"
        return self.flag(part, ok, detail)

    def flag(self, part: str, ok: bool, detail: str = "") -> bool:
        ACCEPTANCE.setdefault(self.criterion, []).append((part, bool(ok), detail))
        print(f"{'PASS' if ok else 'FAIL'} criterion {self.criterion} [{part}] {detail}")
        return ok


@pytest.fixture
def criterion(request):
    marker = request.node.get_closest_marker("criterion")
    return Recorder(marker.args[0])


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[n]
        bad = [p for p in parts if not p[1]]
        status = "FAIL" if bad else "PASS"
        line = f"{status} criterion {n:2d}: {TITLES[n]} ({len(parts) - len(bad)}/{len(parts)} parts)"
        if bad:
            line += "; failing: " + ", ".join(f"{p} ({d})" for p, _, d in bad)
        tr.write_line(line)
