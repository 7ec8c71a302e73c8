import functools
import re
import time
from importlib import resources

import numpy as np
import pytest

from symsemi.classify import classify
from symsemi.formats import parse_fixture
from symsemi.geom import det_rows, span
from symsemi.gf import make_field
from symsemi.group import all_point_rows
from symsemi.verify import verify_representatives

# acceptance criterion id -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


# wall-clock seconds of the first (uncached) classification per (q, max_dim)
CLASSIFY_SECONDS: dict[tuple[int, int], float] = {}


@functools.lru_cache(maxsize=None)
def classification(q: int, max_dim: int = 3):
    t0 = time.monotonic()
    res = classify(q, max_dim=max_dim)
    CLASSIFY_SECONDS[(q, max_dim)] = time.monotonic() - t0
    return res


def builtin(name: str):
    """A shipped fixture, parsed."""
    text = resources.files("symsemi.data").joinpath(name + ".txt").read_text()
    return parse_fixture(text, name)


@functools.lru_cache(maxsize=None)
def builtin_report(name: str):
    return verify_representatives(builtin(name))


@functools.lru_cache(maxsize=None)
def q2_semifield_subspaces():
    """Every semifield line and plane of PG(9,2), enumerated without the group.

    Over GF(2) a point is a 10-bit vector and addition is XOR, so a subspace is
    semifield iff each XOR combination of its basis is a nonsingular matrix.
    """
    F = make_field(2)
    rows = all_point_rows(2)
    ints = (rows.astype(np.int64) << np.arange(9, -1, -1)).sum(1)
    ns = np.zeros(1024, dtype=bool)
    ns[ints] = det_rows(F, rows) != 0
    N = np.nonzero(ns)[0]
    i, j = np.triu_indices(len(N), 1)
    a, b = N[i], N[j]
    keep = ns[a ^ b]
    a, b = a[keep], b[keep]

    def bits(v):
        return [(int(v) >> (9 - t)) & 1 for t in range(10)]

    lines = {frozenset((int(x), int(y), int(x ^ y))): (x, y) for x, y in zip(a, b)}
    c = N[None, :]
    ok = ns[a[:, None] ^ c] & ns[b[:, None] ^ c] & ns[(a ^ b)[:, None] ^ c]
    planes = {}
    for u, v in zip(*np.nonzero(ok)):
        x, y, z = int(a[u]), int(b[u]), int(N[v])
        planes.setdefault(frozenset((x, y, z, x ^ y, x ^ z, y ^ z, x ^ y ^ z)), (x, y, z))
    lines = [span(F, [bits(v) for v in vs]) for vs in lines.values()]
    planes = [span(F, [bits(v) for v in vs]) for vs in planes.values()]
    return sorted(lines, key=lambda W: W.encoding()), sorted(planes, key=lambda W: W.encoding())


@pytest.fixture(scope="session")
def classified():
    return classification


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE, key=lambda c: (int(re.match(r"\d+", c).group()), c)):
        ok, detail = ACCEPTANCE[cid]
        tr.write_line(f"criterion {cid}: {'PASS' if ok else 'FAIL'}  {detail}")
