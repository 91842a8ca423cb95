"""Acceptance criteria, one test each; the summary prints a PASS/FAIL line per criterion."""
import json
import os
import subprocess
import sys

import pytest

import acceptance
from conftest import ACCEPTANCE_LINES

HERE = os.path.dirname(os.path.abspath(__file__))
_outcomes: dict = {}


def _run(n):
    o = acceptance.CRITERIA[n - 1]()
    _outcomes[n] = o
    ACCEPTANCE_LINES.append(o.line())
    print(o.line())
    return o


@pytest.mark.parametrize("n", range(1, 8))
def test_criterion(n):
    o = _run(n)
    assert o.ok, f"{o.detail}; first failures: {o.failures[:3]}"
    assert o.seconds < o.limit, f"took {o.seconds:.2f}s, limit {o.limit}s"


def _spawn(seed):
    env = dict(os.environ, PYTHONHASHSEED=str(seed))
    return subprocess.Popen([sys.executable, os.path.join(HERE, "acceptance.py"), "--digest"],
                            stdout=subprocess.PIPE, text=True, env=env, cwd=HERE)


def test_criterion_8_determinism():
    procs = [_spawn(seed) for seed in (1, 987654)]
    runs = []
    for p in procs:
        out, _ = p.communicate(timeout=1800)
        assert p.returncode == 0
        runs.append(json.loads(out.strip().splitlines()[-1]))
    local = {str(n): (_outcomes[n] if n in _outcomes else _run(n)).digest for n in range(1, 8)}
    ok = runs[0] == runs[1] == local
    differing = sorted(k for k in local if not (runs[0][k] == runs[1][k] == local[k]))
    line = (f"criterion 8: {'PASS' if ok else 'FAIL'} 3 runs of criteria 1-7 under different hash seeds, "
            f"digests {'identical' if ok else 'differ for ' + ', '.join(differing)}")
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line
