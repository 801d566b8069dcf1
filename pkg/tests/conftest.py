import os

import pytest
from hypothesis import HealthCheck, settings

from mbnetsim.topology import load_topology, nsfnet

settings.register_profile("ci", max_examples=200, deadline=None)
settings.register_profile("dev", max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "dev"))


def make_net(edges, n_nodes=None, availability=None):
    """Network from (u, v, length) triples; edge ids follow list order."""
    if n_nodes is None:
        n_nodes = 1 + max(max(u, v) for u, v, _ in edges)
    doc = {
        "nodes": [{"id": i, "name": chr(ord("A") + i) if i < 26 else str(i)} for i in range(n_nodes)],
        "edges": [],
    }
    for i, (u, v, length) in enumerate(edges):
        e = {"id": i, "u": u, "v": v, "length_km": length}
        if availability is not None:
            e["availability"] = availability[i] if isinstance(availability, (list, tuple)) else availability
        doc["edges"].append(e)
    return load_topology(doc)


@pytest.fixture
def line3():
    # A-B-C, 100 km each
    return make_net([(0, 1, 100.0), (1, 2, 100.0)])


@pytest.fixture
def triangle():
    # A-B 300, A-C 100, C-B 100
    return make_net([(0, 1, 300.0), (0, 2, 100.0), (2, 1, 100.0)])


@pytest.fixture
def ring4():
    # 0-1-2-3-0, 100 km each
    return make_net([(0, 1, 100.0), (1, 2, 100.0), (2, 3, 100.0), (3, 0, 100.0)])


@pytest.fixture
def nsf():
    return nsfnet()


_ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion; shown in the terminal summary."""

    def record(number: int, title: str, ok: bool, detail: str = "") -> bool:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}" + (f" ({detail})" if detail else "")
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
