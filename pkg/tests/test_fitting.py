from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phasedsssp.fitting import fit_curves, fit_logarithmic, fit_power

NS = np.geomspace(100, 16384, 20)


def test_exact_power_data():
    res = fit_curves([(n, 2.0 * n**0.5) for n in NS])
    assert res.power.b == pytest.approx(2.0, rel=1e-9)
    assert res.power.c == pytest.approx(0.5, rel=1e-9)
    assert res.power.residual < 1e-9
    assert res.best is res.power


def test_exact_log_data():
    res = fit_curves([(n, 1.69 * np.log2(n)) for n in NS])
    assert res.logarithmic.b == pytest.approx(1.69, rel=1e-12)
    assert res.logarithmic.residual < 1e-9
    assert res.best is res.logarithmic


def test_noisy_power_data_recovers_exponent():
    rng = np.random.default_rng(7)
    y = 3.97 * NS**0.34 * (1 + 0.05 * rng.standard_normal(NS.size))
    c = fit_power(list(zip(NS, y))).c
    assert 0.30 <= c <= 0.38


def test_predict_and_formula():
    res = fit_curves([(n, 2.0 * n**0.5) for n in NS])
    assert res.power.predict([100.0])[0] == pytest.approx(20.0)
    assert "n^0.5" in res.power.formula()
    assert "log2(n)" in res.logarithmic.formula()


@pytest.mark.parametrize("points", [[(10, 1), (20, 2)], [(1, 1), (2, 2), (3, 3)], [(10, 0), (20, 1), (30, 2)]])
def test_rejects_bad_points(points):
    with pytest.raises(ValueError):
        fit_curves(points)


@given(
    b=st.floats(0.1, 50),
    c=st.floats(-1, 2),
    k=st.floats(0.01, 100),
    seed=st.integers(0, 2**32 - 1),
)
def test_scale_equivariance(b, c, k, seed):
    rng = np.random.default_rng(seed)
    y = b * NS**c * np.exp(0.1 * rng.standard_normal(NS.size))
    base = fit_curves(list(zip(NS, y)))
    scaled = fit_curves(list(zip(NS, k * y)))
    assert scaled.power.c == pytest.approx(base.power.c, abs=1e-9)
    assert scaled.power.b == pytest.approx(k * base.power.b, rel=1e-9)
    assert scaled.logarithmic.b == pytest.approx(k * base.logarithmic.b, rel=1e-9)
    assert scaled.power.residual == pytest.approx(base.power.residual, rel=1e-6, abs=1e-12)
