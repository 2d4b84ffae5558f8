import importlib
import os
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from muforge import _pykernels, kernels

try:
    from muforge import _ckernels
except ImportError:  # the extension was not built
    _ckernels = None

BACKENDS = [pytest.param(_pykernels, id="python"),
            pytest.param(_ckernels, id="cython",
                         marks=pytest.mark.skipif(_ckernels is None, reason="extension not built"))]

masks = st.integers(0, 255)


def matrices(n, m=None):
    m = n if m is None else m
    return st.tuples(*[st.tuples(*[masks] * m)] * n)


def naive_maxcomb(x, y):
    out = 0
    for a in range(9):
        for b in range(9):
            if x >> a & 1 and y >> b & 1:
                out |= 1 << max(a, b)
    return out


def naive_compose(a, b):
    return tuple(tuple(_or(naive_maxcomb(a[i][k], b[k][j]) for k in range(len(b)))
                       for j in range(len(b[0]))) for i in range(len(a)))


def _or(xs):
    out = 0
    for x in xs:
        out |= x
    return out


def naive_mu_trace(support, loop):
    n = len(loop)
    reach, frontier = support, support
    for _ in range(n + 1):
        frontier = _pykernels.step(frontier, loop)
        reach |= frontier
    power = loop
    for _ in range(2 ** n * 9 + 2):
        if any(reach >> h & 1 and power[h][h] & _pykernels.ODD for h in range(n)):
            return True
        power = naive_compose(power, loop)
    return False


@pytest.mark.parametrize("k", BACKENDS)
@settings(max_examples=300, deadline=None)
@given(masks, masks)
def test_maxcomb(k, x, y):
    assert k.maxcomb(x, y) == naive_maxcomb(x, y)


@pytest.mark.parametrize("k", BACKENDS)
@settings(max_examples=200, deadline=None)
@given(matrices(3, 2), matrices(2, 4))
def test_compose(k, a, b):
    assert k.compose(a, b) == naive_compose(a, b)


@pytest.mark.parametrize("k", BACKENDS)
@settings(max_examples=200, deadline=None)
@given(matrices(3), matrices(3))
def test_union_and_identity(k, a, b):
    assert k.union(a, b) == tuple(tuple(x | y for x, y in zip(r, s)) for r, s in zip(a, b))
    assert k.compose(k.identity(3), a) == naive_compose(_pykernels.identity(3), a)


@pytest.mark.parametrize("k", BACKENDS)
@settings(max_examples=150, deadline=None)
@given(st.integers(0, 7), st.tuples(*[st.tuples(*[st.integers(0, 15)] * 3)] * 3))
def test_has_mu_trace(k, support, loop):
    assert k.has_mu_trace(support, loop) == naive_mu_trace(support, loop)
    assert k.step(support, loop) == _pykernels.step(support, loop)


def test_backend_selection_respects_environment():
    env = dict(os.environ, MUFORGE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from muforge import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
    expected = "cython" if _ckernels is not None else "python"
    if os.environ.get("MUFORGE_PURE_PYTHON", "") not in ("1", "true", "yes"):
        assert importlib.reload(kernels).BACKEND == expected
