"""Shared fixtures: seeded random graphs and the acceptance report hook."""

from __future__ import annotations

import numpy as np
import pytest

from netsom import build_graph

_ACCEPTANCE_LINES: list[str] = []


def random_connected_graph(rng: np.random.Generator, n: int,
                           extra_edges: int | None = None):
    """Random connected graph: a random attachment tree plus extra edges."""
    edges = set()
    for v in range(1, n):
        u = int(rng.integers(v))
        edges.add((u, v))
    if extra_edges is None:
        extra_edges = int(rng.integers(0, max(1, n)))
    for _ in range(extra_edges):
        u, v = int(rng.integers(n)), int(rng.integers(n))
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return build_graph(n, sorted(edges))


@pytest.fixture(scope="session")
def criterion_report():
    """Collects one line per acceptance criterion for the terminal summary."""
    def record(cid: str, passed: bool, detail: str = "") -> None:
        status = "PASS" if passed else "FAIL"
        suffix = f" — {detail}" if detail else ""
        _ACCEPTANCE_LINES.append(f"ACCEPTANCE {cid}: {status}{suffix}")
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
