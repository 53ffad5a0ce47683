import math

import numpy as np
import pytest

from faplab.capacity import (
    ConstraintSpec,
    CustomDensity,
    DispersionLevel,
    GaussianSpec,
    InfeasibleError,
    capacity_closed_form,
    capacity_table,
    dispersion_of,
    entropy_estimate,
    feasibility,
    log_moment,
    maxent_profile,
    mutual_information,
)
from faplab.cauchy import (
    Degenerate,
    MultivariateCauchy,
    UnivariateCauchy,
    entropy_univariate,
    sample_univariate,
)
from faplab.fap import ChannelGeometry

SPEC1 = ConstraintSpec(1)
SPEC2 = ConstraintSpec(2)
LN_4PI = math.log(4.0 * math.pi)


def iso2(gamma: float) -> MultivariateCauchy:
    return MultivariateCauchy([0.0, 0.0], gamma**2 * np.eye(2))


# constraint constants ---------------------------------------------------------


def test_constraint_constants():
    assert SPEC1.c == pytest.approx(2.0 * math.log(2.0), abs=1e-12)
    assert SPEC2.c == pytest.approx(2.0, abs=1e-12)


# log moment ---------------------------------------------------------------------


def test_log_moment_at_own_scale():
    assert log_moment(UnivariateCauchy(0.0, 1.3), 1.3) == pytest.approx(
        2.0 * math.log(2.0), abs=1e-9
    )
    assert log_moment(iso2(2.5), 2.5) == pytest.approx(2.0, abs=1e-9)


def test_log_moment_degenerate():
    assert log_moment(Degenerate(0.0), 1.0) == 0.0


def test_log_moment_general_k_closed_form():
    # For Cauchy(0, g): E ln(1 + (Y/k)^2) = 2 ln((k + g)/k).
    g = 2.0
    for k in (0.25, 1.0, 8.0):
        assert log_moment(UnivariateCauchy(0.0, g), k) == pytest.approx(
            2.0 * math.log((k + g) / k), abs=1e-6
        )


def test_log_moment_bivariate_closed_form():
    # Radial integration gives (2g/b) atan(b/g) with b = sqrt(k^2 - g^2).
    g = 1.0
    for k in (2.0, 5.0):
        b = math.sqrt(k * k - g * g)
        expected = 2.0 * g / b * math.atan(b / g)
        assert log_moment(iso2(g), k) == pytest.approx(expected, abs=1e-9)


def test_log_moment_samples_path():
    x = sample_univariate(UnivariateCauchy(0.0, 1.0), 400_000, seed=1)
    assert log_moment(x, 1.0) == pytest.approx(2.0 * math.log(2.0), abs=0.02)


def test_log_moment_monotone_in_k():
    d = UnivariateCauchy(0.0, 1.0)
    ks = np.geomspace(1e-2, 1e2, 17)
    vals = [log_moment(d, k) for k in ks]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[0] > 8.0 and vals[-1] < 0.03


def test_log_moment_rejects_bad_k():
    with pytest.raises(ValueError):
        log_moment(UnivariateCauchy(0.0, 1.0), 0.0)


# dispersion ---------------------------------------------------------------------


def test_dispersion_recovers_cauchy_scale():
    for gamma in (0.3, 1.0, 5.0):
        assert dispersion_of(UnivariateCauchy(0.0, gamma), SPEC1) == pytest.approx(
            gamma, abs=1e-10 * max(gamma, 1.0)
        )
    assert dispersion_of(iso2(2.4), SPEC2) == pytest.approx(2.4, abs=1e-9)


def test_dispersion_homogeneity():
    base = 0.7
    d0 = dispersion_of(UnivariateCauchy(0.0, base), SPEC1)
    for c in (0.5, 2.0, 10.0):
        dc = dispersion_of(UnivariateCauchy(0.0, c * base), SPEC1)
        assert abs(dc - c * d0) <= 1e-8 * c


def test_dispersion_degenerate_is_zero():
    assert dispersion_of(Degenerate(0.0), SPEC1) == 0.0


def test_dispersion_on_samples():
    x = sample_univariate(UnivariateCauchy(0.0, 1.5), 200_000, seed=5)
    d = dispersion_of(x, SPEC1)
    assert d == pytest.approx(1.5, rel=0.02)
    assert dispersion_of(3.0 * x, SPEC1) == pytest.approx(3.0 * d, rel=1e-10)


# feasibility ---------------------------------------------------------------------


def test_feasibility_window():
    g = ChannelGeometry(2, 1.0, 1.0)
    assert feasibility(UnivariateCauchy(0.0, 2.0), 2.0, g, SPEC1)
    assert feasibility(UnivariateCauchy(0.0, 1.0), 2.0, g, SPEC1)  # at the floor
    assert not feasibility(UnivariateCauchy(0.0, 2.001), 2.0, g, SPEC1)
    assert feasibility(UnivariateCauchy(0.0, 1.4), DispersionLevel(2.0), g, SPEC1)


def test_feasibility_below_floor_errors():
    g = ChannelGeometry(2, 1.0, 1.0)
    with pytest.raises(InfeasibleError):
        feasibility(UnivariateCauchy(0.0, 1.0), 0.5, g, SPEC1)


# entropy estimation ---------------------------------------------------------------


def test_entropy_quadrature_values():
    assert entropy_estimate(UnivariateCauchy(0.0, 1.0)).value == pytest.approx(
        LN_4PI, abs=1e-8
    )
    est = entropy_estimate(iso2(1.0))
    assert est.value == pytest.approx(math.log(2.0 * math.pi) + 3.0, abs=1e-4)
    assert est.std_error == 0.0 and est.method == "quadrature"


def test_entropy_knn_on_exact_samples():
    d = UnivariateCauchy(0.0, 1.0)
    est = entropy_estimate(sample_univariate(d, 200_000, seed=11), "knn")
    assert est.method == "knn" and est.std_error > 0.0
    assert abs(est.value - LN_4PI) <= 3.0 * est.std_error + 0.005


def test_entropy_histogram_transformed():
    d = UnivariateCauchy(0.0, 2.0)
    est = entropy_estimate(sample_univariate(d, 200_000, seed=12), "histogram_transformed")
    assert abs(est.value - entropy_univariate(d)) <= 0.02


def test_entropy_requires_enough_samples():
    with pytest.raises(ValueError):
        entropy_estimate(np.zeros(10), "knn")


def test_entropy_unnormalized_pdf_rejected():
    bad = CustomDensity(pdf=lambda y: 2.0 / (math.pi * (1.0 + y * y)), dim=1)
    with pytest.raises(ValueError, match="not normalized"):
        entropy_estimate(bad, "quadrature")


def test_entropy_custom_density_ok():
    good = CustomDensity(pdf=lambda y: 1.0 / (math.pi * (1.0 + y * y)), dim=1)
    assert entropy_estimate(good).value == pytest.approx(LN_4PI, abs=1e-8)


def test_entropy_unknown_method():
    with pytest.raises(ValueError):
        entropy_estimate(np.zeros(2000), "parzen")


# mutual information ----------------------------------------------------------------


def test_mutual_information_2d():
    g = ChannelGeometry(2, 1.0, 1.0)
    a_over_lam = 2.0
    mi = mutual_information(UnivariateCauchy(0.0, a_over_lam - 1.0), g)
    assert mi == pytest.approx(math.log(a_over_lam), abs=1e-12)


def test_mutual_information_degenerate_input():
    assert mutual_information(Degenerate(0.0), ChannelGeometry(2, 1.0, 1.0)) == 0.0


def test_mutual_information_3d():
    g = ChannelGeometry(3, 1.0, 1.0)
    mi = mutual_information(iso2(1.0), g)  # A = 2 lam
    assert mi == pytest.approx(2.0 * math.log(2.0), abs=1e-12)


def test_mutual_information_rejects_mismatched_family():
    g = ChannelGeometry(3, 1.0, 1.0)
    with pytest.raises(ValueError):
        mutual_information(UnivariateCauchy(0.0, 1.0), g)


# closed-form capacities ---------------------------------------------------------------


def test_capacity_closed_form_2d():
    r = capacity_closed_form("fap2d", 2.0, 1.0)
    assert r.capacity == pytest.approx(0.6931471805599453, abs=1e-12)
    assert isinstance(r.achieving_output, UnivariateCauchy) and r.achieving_output.scale == 2.0
    assert isinstance(r.achieving_input, UnivariateCauchy) and r.achieving_input.scale == 1.0


def test_capacity_closed_form_3d():
    r = capacity_closed_form("fap3d", 2.0, 1.0)
    assert r.capacity == pytest.approx(1.3862943611198906, abs=1e-12)
    assert isinstance(r.achieving_output, MultivariateCauchy)
    assert np.allclose(r.achieving_output.scale_matrix, 4.0 * np.eye(2))
    assert "sum closure" in r.note


def test_capacity_closed_form_gaussian():
    r = capacity_closed_form("gaussian", 2.0, 1.0)
    assert r.capacity == pytest.approx(math.log(2.0), abs=1e-14)
    assert isinstance(r.achieving_output, GaussianSpec) and r.achieving_output.variance == 4.0
    assert r.achieving_input.variance == pytest.approx(3.0)


def test_capacity_zero_at_floor_and_infeasible_below():
    r = capacity_closed_form("fap2d", 1.0, 1.0)
    assert r.capacity == 0.0
    assert isinstance(r.achieving_input, Degenerate)
    with pytest.raises(InfeasibleError):
        capacity_closed_form("fap2d", 0.99, 1.0)


def test_capacity_strictly_increasing():
    caps = [capacity_closed_form("fap3d", a, 1.0).capacity for a in np.linspace(1.0, 5.0, 9)]
    assert all(b > a for a, b in zip(caps, caps[1:]))


# max-entropy profiles -------------------------------------------------------------------


def test_maxent_profile_recovers_cauchy_exponents():
    p1 = maxent_profile(SPEC1, 1.0)
    assert p1.mu == pytest.approx(1.0, abs=1e-6)
    p2 = maxent_profile(SPEC2, 1.0)
    assert p2.mu == pytest.approx(1.5, abs=1e-6)


def test_maxent_profile_matches_cauchy_shape():
    p1 = maxent_profile(SPEC1, 2.0)
    d = UnivariateCauchy(0.0, 2.0)
    from faplab.cauchy import pdf_univariate

    for y in (-5.0, 0.0, 1.1, 14.0):
        assert float(p1.pdf(y)) == pytest.approx(float(pdf_univariate(d, y)), rel=1e-6)


def test_maxent_exponent_monotone_in_target():
    mus = [maxent_profile(ConstraintSpec(1, target=c), 1.0).mu for c in (0.9, 1.39, 2.1)]
    assert mus[0] > mus[1] > mus[2]


def test_maxent_rejects_bad_target():
    with pytest.raises(ValueError):
        maxent_profile(ConstraintSpec(1, target=-1.0), 1.0)
    with pytest.raises(ValueError):
        maxent_profile(SPEC1, 0.0)


def test_maxent_profile_entropy_and_dispersion():
    prof = maxent_profile(SPEC1, 1.7)
    assert entropy_estimate(prof).value == pytest.approx(math.log(4.0 * math.pi * 1.7), abs=1e-8)
    assert dispersion_of(prof, SPEC1) == pytest.approx(1.7, abs=1e-9)
    assert prof.entropy_closed_form() == pytest.approx(math.log(4.0 * math.pi * 1.7), abs=1e-10)


def test_maxent_grid_normalized_shape():
    prof = maxent_profile(SPEC2, 1.0)
    r, f = prof.grid(num=33)
    assert r[0] == 0.0 and f[0] == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-6)
    assert np.all(np.diff(f) < 0.0)


# capacity table ------------------------------------------------------------------------


def test_capacity_table_values_and_identities():
    rows = capacity_table([1.0, math.e, 4.0], lam=1.0, sigma=1.0)
    assert rows[0]["C_gauss"] == 0.0 and rows[0]["C_2d"] == 0.0 and rows[0]["C_3d"] == 0.0
    assert rows[1]["C_2d"] == pytest.approx(1.0, abs=1e-15)
    assert rows[1]["C_3d"] == pytest.approx(2.0, abs=1e-15)
    for r in rows:
        assert r["C_3d"] == 2.0 * r["C_2d"]
        assert r["C_gauss"] == r["C_2d"]  # sigma = lam


def test_capacity_table_marks_infeasible():
    rows = capacity_table([0.5, 2.0], lam=1.0, sigma=1.0)
    assert math.isnan(rows[0]["C_2d"]) and math.isnan(rows[0]["C_gauss"])
    assert not math.isnan(rows[1]["C_2d"])
