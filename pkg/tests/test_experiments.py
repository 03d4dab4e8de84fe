"""Scenario drivers: report plumbing, unit facts, and cheap end-to-end smokes."""

import json

import numpy as np
import pytest

from diracbox.experiments import (
    SCENARIOS,
    Check,
    Report,
    ScenarioConfig,
    check_leq,
    check_monotone,
    config_dict,
    heisenberg_scan_profile,
    profile_square_integral,
    random_drive,
    run_free_baseline,
    run_heisenberg_energy_scan,
    run_heisenberg_gauge,
    run_picture_equivalence,
    run_schrodinger_gauge_scan,
    schrodinger_scan_profile,
)
from diracbox.gaussian import excitation_correlation, omega0_correlation, vacuum_correlation


# ---------------------------------------------------------------------------
# report / check plumbing


def test_check_helpers():
    assert check_leq("a", 1e-9, 1e-6).passed
    assert not check_leq("a", 1e-3, 1e-6).passed
    good = check_monotone("dec", [3.0, 2.0, 1.0], decreasing=True)
    assert good.passed
    flat = check_monotone("dec", [3.0, 3.0, 1.0], decreasing=True)
    assert not flat.passed
    assert check_monotone("flat_ok", [3.0, 3.0, 1.0], decreasing=True, strict=False).passed
    # None entries are treated as +inf, which a nondecreasing chain tolerates
    assert check_monotone("nondec", [1.0, None, None], decreasing=False, strict=False).passed


def test_report_json_and_csv_shape():
    rep = Report(
        scenario="demo",
        params={"x": 1},
        seed=7,
        metrics={"m": 0.5, "opt": None},
        checks=[Check("c", 0.0, 1.0, "<=", True)],
        tables={"series": (["a", "b"], [[1.0, 2.0], [0.1, 1e-17]])},
    )
    assert rep.passed
    data = json.loads(rep.to_json())
    assert data["scenario"] == "demo"
    assert data["metrics"]["opt"] is None
    assert data["pass"] is True
    csv_text = rep.series_csv()
    lines = csv_text.split("\n")
    assert lines[0] == "a,b"
    assert "\r" not in csv_text
    # 17 significant digits survive a text round trip exactly
    assert float(lines[2].split(",")[1]) == 1e-17


def test_failed_check_fails_report():
    rep = Report("demo", {}, 0, {}, [Check("c", 2.0, 1.0, "<=", False)], {})
    assert not rep.passed
    assert json.loads(rep.to_json())["pass"] is False


def test_config_dict_is_json_safe():
    cfg = ScenarioConfig(chi_modes=(((0, 0, 1), 0.001 + 0.002j),))
    text = json.dumps(config_dict(cfg), allow_nan=False)
    back = json.loads(text)
    assert back["backend"] == "gaussian"
    assert back["chi_modes"] == [[[0, 0, 1], [0.001, 0.002]]]


def test_config_rejects_bad_backend_and_negative_cutoff():
    with pytest.raises(ValueError):
        ScenarioConfig(backend="laplace")
    with pytest.raises(ValueError, match="n_max"):
        ScenarioConfig(n_max=-1)


# ---------------------------------------------------------------------------
# scan profiles: two-harmonic Fourier data of the analytic wavepacket fields


def make_catalog(n_max=2):
    return ScenarioConfig().catalog(n_max)


def test_scan_profiles_satisfy_continuity():
    """On-shell spinor identity: (E2-E1) u1.u2 = (p2-p1).(u1,alpha u2).

    It forces d(rho)/dt = -div J for the cross term, i.e. the two profiles
    are exact negatives of each other, mode by mode.
    """
    cat = make_catalog()
    cfg = ScenarioConfig()
    schro = schrodinger_scan_profile(cat, cfg)
    heis = heisenberg_scan_profile(cat, cfg)
    assert set(schro) == set(heis) == {(0, 0, 1), (0, 0, -1)}
    for k in schro:
        assert schro[k] == pytest.approx(-heis[k], abs=1e-15)
        # reality pairing: c(-k) = conj(c(k))
        assert schro[(-k[0], -k[1], -k[2])] == pytest.approx(np.conj(schro[k]), abs=1e-16)


def test_profile_square_integral_is_phase_invariant():
    cat = make_catalog()
    base = profile_square_integral(schrodinger_scan_profile(cat, ScenarioConfig()), cat.volume)
    late = profile_square_integral(
        schrodinger_scan_profile(cat, ScenarioConfig(t_final=17.3)), cat.volume
    )
    assert base == pytest.approx(late, rel=1e-12)
    # independent closed form: V * 2 * (e/2V)^2 * dE^2 * |u1.u2|^2
    m1 = cat.modes[cat.index_of(ScenarioConfig().mode1)]
    m2 = cat.modes[cat.index_of(ScenarioConfig().mode2)]
    de = m2.energy - m1.energy
    ov = abs(np.vdot(m1.u, m2.u)) ** 2
    want = cat.volume * 2.0 * (1.0 / (2.0 * cat.volume)) ** 2 * de**2 * ov
    assert base == pytest.approx(want, rel=1e-13)


def test_random_drive_reality_pairing():
    rng = np.random.default_rng(5)
    pot = random_drive(rng, band=2, amplitude=0.1, envelope=ScenarioConfig().envelope(), d=1)
    (term,) = pot.terms
    for k, c in term.a0.items():
        assert term.a0[(-k[0], -k[1], -k[2])] == pytest.approx(np.conj(c), abs=1e-16)
    assert term.a0[(0, 0, 0)].imag == 0.0
    for k, vec in term.a.items():
        np.testing.assert_allclose(term.a[(-k[0], -k[1], -k[2])], np.conj(vec), atol=1e-16)
    with pytest.raises(NotImplementedError):
        random_drive(rng, band=1, amplitude=0.1, envelope=ScenarioConfig().envelope(), d=3)


def test_excitation_correlation_is_state_minus_sea():
    cat = make_catalog(1)
    cfg = ScenarioConfig()
    W = excitation_correlation(cat, cfg.mode1, cfg.mode2)
    full = omega0_correlation(cat, cfg.mode1, cfg.mode2).matrix
    sea = vacuum_correlation(cat).matrix
    np.testing.assert_allclose(W.matrix, full - sea, atol=1e-15)
    # one particle in the superposed orbital (u1+u2)/sqrt(2): rank one, eigenvalue 1
    eig = np.linalg.eigvalsh(W.matrix)
    assert np.sum(np.abs(eig) > 1e-12) == 1
    assert eig[-1] == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------------------------------
# end-to-end smokes (cheapened where the defaults are slow)


def checks_by_name(report):
    return {c.name: c for c in report.checks}


def test_scenarios_registry_complete():
    assert set(SCENARIOS) == {
        "baseline",
        "gauge-heisenberg",
        "gauge-schrodinger",
        "energy-heisenberg",
        "equivalence",
    }


def test_baseline_gaussian_passes_and_is_deterministic():
    cfg = ScenarioConfig(backend="gaussian")
    rep1 = run_free_baseline(cfg)
    rep2 = run_free_baseline(cfg)
    assert rep1.passed
    assert rep1.to_json() == rep2.to_json()
    assert rep1.series_csv() == rep2.series_csv()
    header = rep1.series_csv().split("\n", 1)[0]
    assert header == "backend,time,x,y,z,rho,jx,jy,jz"


def test_baseline_both_backends_agree():
    rep = run_free_baseline(ScenarioConfig(backend="both"))
    assert rep.passed
    assert rep.metrics["backend_disagreement"] <= 1e-8


def test_equivalence_passes_quickly():
    rep = run_picture_equivalence(ScenarioConfig(n_drives=2, n_steps=150))
    assert rep.passed
    assert rep.metrics["max_deviation"] <= 1e-8
    assert rep.metrics["step_doubling_ratio"] >= 3.5
    assert rep.metrics["max_matched_deviation"] <= 1e-10


def test_gauge_heisenberg_two_cutoffs():
    rep = run_heisenberg_gauge(ScenarioConfig(cutoffs=(2, 3), n_steps=3000))
    assert rep.passed
    assert rep.metrics["n3_rho_dev"] < rep.metrics["n2_rho_dev"]
    assert rep.metrics["n3_j_dev"] < rep.metrics["n2_j_dev"]


def test_energy_scan_slope_and_intercept():
    rep = run_heisenberg_energy_scan(ScenarioConfig(n_steps=2000))
    assert rep.passed
    by_name = checks_by_name(rep)
    assert by_name["slope_rel_err"].value <= 0.02
    assert by_name["intercept_rel_err"].value <= 0.01
    header = rep.series_csv().split("\n", 1)[0]
    assert header == "f,measured_minus_vac,predicted_minus_vac,rel_dev"


def test_schrodinger_scan_single_subset():
    cfg = ScenarioConfig(
        scan_subsets=((0, 1),), f_list=(0.0, 0.05, 0.1, 0.2), n_steps=300
    )
    rep = run_schrodinger_gauge_scan(cfg)
    assert rep.passed
    by_name = checks_by_name(rep)
    assert by_name["M8_slope_rel_err"].value <= 0.05
    # the lower bound is checked for every f, including f = 0
    for f in cfg.f_list:
        assert by_name[f"M8_bound_f{f}"].value >= -1e-9
