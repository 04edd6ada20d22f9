import inspect
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from zetalab import stats as zstats
from zetalab.dirichlet import PolyConfig
from zetalab.errors import DomainError, PathThroughZeroError
from zetalab.stats import (
    clt_report,
    empirical_cdf,
    gaussian_cdf,
    interval_mass,
    ks_distance,
    normalize_statistic,
    s_of_t,
    statistic_values,
)
from zetalab.zeros import rv_mangoldt_count
from zetalab.zeta import Shift


def test_gaussian_cdf():
    assert gaussian_cdf(0.0) == 0.5
    assert gaussian_cdf(1.959964) == pytest.approx(0.975, abs=1e-7)
    xs = np.linspace(-8, 8, 161)
    assert np.allclose(gaussian_cdf(xs) + gaussian_cdf(-xs), 1.0, atol=1e-12)
    assert np.allclose(gaussian_cdf(xs), sps.norm.cdf(xs), atol=1e-14)


def test_normalize_statistic():
    T = math.exp(math.exp(2.0))
    assert np.allclose(normalize_statistic([1.0, -2.0], T), [1.0, -2.0])
    assert np.array_equal(normalize_statistic(np.zeros(3), 1e4), np.zeros(3))
    with pytest.raises(DomainError):
        normalize_statistic([1.0], 10.0)


def test_ks_matches_scipy():
    rng = np.random.default_rng(1)
    x = rng.normal(0.1, 1.1, 5000)
    assert ks_distance(x) == pytest.approx(sps.kstest(x, "norm").statistic, abs=1e-14)


def test_ks_examples():
    assert ks_distance([0.0]) == 0.5
    assert ks_distance([1e6, 1e6 + 1]) == pytest.approx(1.0)
    rng = np.random.default_rng(7)
    x = rng.standard_normal(10**6)
    assert ks_distance(x) <= 1.63 / math.sqrt(x.size)
    with pytest.raises(DomainError):
        ks_distance([])


@given(st.lists(st.floats(-50, 50), min_size=1, max_size=200))
def test_empirical_cdf_structure(values):
    x, f = empirical_cdf(values)
    assert np.all(np.diff(x) >= 0)
    assert np.all(np.diff(f) > 0)
    assert f[-1] == 1.0 and f[0] > 0


@given(
    st.lists(st.floats(-5, 5), min_size=1, max_size=100),
    st.sampled_from([0.25, 0.5, 2.0, 4.0, 8.0]),
    st.floats(-3, 0),
    st.floats(0, 3),
)
def test_interval_count_scale_invariance(values, c, a, b):
    # powers of two scale exactly, so the comparison is exact
    v = np.array(values)
    assert interval_mass(v, a, b) == interval_mass(c * v, c * a, c * b)


def test_clt_report_full_line():
    rng = np.random.default_rng(3)
    v = rng.standard_normal(1000)
    rep = clt_report(v, "x", 1e6, intervals=((-math.inf, math.inf), (-1.0, 1.0)))
    a, b, emp, gau, diff = rep.interval(-math.inf, math.inf)
    assert emp == 1.0 and gau == 1.0 and diff == 0.0
    assert sum(rep.histogram["mass"]) + rep.histogram["outside_mass"] == pytest.approx(1.0)
    assert rep.normalization["scale"] == pytest.approx(math.sqrt(0.5 * math.log(math.log(1e6))))


def test_clt_report_scales():
    v = np.ones(4)
    rep = clt_report(v, "x", 1e6, psi=2.0, scale="psi")
    assert rep.normalization["scale"] == 1.0
    assert rep.normalization["scale_loglog"] == pytest.approx(math.sqrt(0.5 * math.log(math.log(1e6))))
    with pytest.raises(DomainError):
        clt_report(v, "x", 1e6, scale="psi")
    centered = clt_report(np.array([1.0, 3.0]), "x", 1e6, center=True)
    assert centered.normalization["mean"] == 0.0


def test_statistic_values(zeros_1000, table_small):
    cfg = PolyConfig(10.0, table_small)
    re, psi = statistic_values("re-poly", zeros_1000, cfg)
    assert re.size == 649
    assert psi == pytest.approx(sum(1 / p for p in cfg.primes.tolist()))
    lz, _ = statistic_values("log-zeta", zeros_1000, cfg, Shift(0.2, 0.0, 10.0), subset=5)
    assert lz.size == 5
    zp, _ = statistic_values("log-zeta-prime", zeros_1000, cfg, subset=3)
    assert zp[0] == pytest.approx(math.log(0.79316043335650612 / math.log(1000.0)), abs=1e-7)
    with pytest.raises(DomainError):
        statistic_values("nope", zeros_1000, cfg)


def test_arg_statistic_does_not_use_pair_correlation():
    src = inspect.getsource(zstats)
    assert "pair_correlation" not in src and "gap_fraction" not in src


def test_s_of_t_count_consistency(zeros_1e4):
    rng = np.random.default_rng(42)
    g = zeros_1e4.ordinates
    bad = 0
    for T in rng.uniform(20, 9990, 100):
        i = np.searchsorted(g, T)
        # keep T away from ordinates so the count is unambiguous
        if min(abs(g[i - 1] - T), abs(g[min(i, g.size - 1)] - T)) < 1e-3:
            T += 2e-3
        d = zeros_1e4.count_upto(T) - rv_mangoldt_count(T) - s_of_t(T)
        bad += not (-0.01 < d < 0.01)
    assert bad == 0


def test_s_of_t_continuity_and_mean(zeros_1000):
    g = zeros_1000.ordinates
    a, b = g[100], g[101]
    ts = np.linspace(a + 1e-3, b - 1e-3, 5)
    s = [s_of_t(t) + rv_mangoldt_count(t) for t in ts]
    assert np.allclose(s, s[0], atol=1e-6)  # N(t) is constant between two zeros
    mean = np.mean([s_of_t(t) for t in np.linspace(100.05, 999.05, 200)])
    assert abs(mean) < 0.1


def test_s_of_t_at_zero():
    with pytest.raises(PathThroughZeroError, match="perturb"):
        s_of_t(14.134725141734694)
