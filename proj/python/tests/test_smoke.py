import math
import warnings

import numpy as np
import pytest

import optoforce as of


def baseline(eta=0.02):
    return of.SystemParams(g0=0.8, eta=eta, gamma_c=0.01, gamma_d=0.01)


def test_derived_params():
    d = of.derived_params(baseline())
    assert d.beta == pytest.approx(0.8)
    assert d.lambda_ == pytest.approx(0.64 + 2 * 0.8 * 0.02)
    assert d.gamma == pytest.approx(0.02)


def test_min_measurable_force():
    phys = of.PhysicalParams(2 * math.pi * 1e8, 0.4e-14)
    p = of.SystemParams(g0=1.0, gamma_c=0.005, gamma_d=0.005)
    assert of.min_measurable_force(phys, p) == pytest.approx(8.25e-14, rel=0.01)


def test_resolvability():
    assert not of.resolvability(baseline(0.01))
    assert of.resolvability(baseline(0.04))


def test_emission_spectrum_arrays_and_normalization():
    p = baseline()
    sp = of.emission_spectrum(p, of.MechanicalState.number(0))
    x, y = sp.detunings, sp.values
    assert isinstance(y, np.ndarray)
    assert x.shape == y.shape == (len(sp.grid),)
    assert np.all(y >= 0)
    assert of.emission_total_probability(p) == pytest.approx(0.5, abs=1e-3)
    peaks = of.find_peaks(sp).peaks
    lam = of.derived_params(p).lambda_
    assert any(abs(pk.position + lam) <= sp.grid.step for pk in peaks)


def test_fc_matrix_is_orthogonal():
    f = of.fc_matrix(0.5, 80)
    block = (f @ f.T)[:40, :40]
    assert np.allclose(block, np.eye(40), atol=1e-10)
    assert f[0, 1] == pytest.approx(of.displaced_overlap(0, 1, 0.5))


def test_scattering_unitarity():
    p = baseline()
    wp = of.resonant_wavepacket(p, 0.01)
    det, und = of.scattering_channel_probabilities(p, of.MechanicalState.number(0), wp)
    assert det + und == pytest.approx(1.0, abs=1e-3)
    d_sp, u_sp = of.scattering_spectra(p, of.MechanicalState.number(0), wp)
    assert d_sp.kind == "scattering-detected"
    assert u_sp.values.shape == d_sp.values.shape


def test_zpl_inference_round_trip():
    sp = of.emission_spectrum(baseline(0.03), of.MechanicalState.number(0), of.SpectralGrid(-5.0, 3.0, 0.001))
    est = of.estimate_force_zpl(of.find_peaks(sp), baseline(0.0), of.Interval(0.0, 0.1))
    assert est.eta_hat == pytest.approx(0.03, abs=0.01)
    assert est.method == "zpl"


def test_disambiguation_picks_true_branch():
    truth = 0.02 + 0.625
    model = of.ForwardModel(baseline(0.0))
    grid = of.SpectralGrid(-3.0, 1.0, 0.001)
    measured = of.Spectrum(grid, model.spectrum(truth, grid))
    est = of.estimate_force_zpl(of.find_peaks(measured), baseline(0.0), of.Interval(-0.7, 0.7))
    assert len(est.candidates) == 3
    picked = of.disambiguate(measured, est, model)
    assert picked.eta_hat == pytest.approx(truth, abs=1e-3)


def test_errors_map_to_exceptions():
    with pytest.raises(of.InputError):
        of.MechanicalState.number(-1)
    with pytest.raises(of.InferenceError):
        of.estimate_force_zpl(of.PeakSet(), baseline(0.0), of.Interval(0.0, 0.1))
    assert issubclass(of.InferenceError, of.Error)


def test_warnings_are_python_warnings():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        of.emission_spectrum(baseline(), of.MechanicalState.number(0), of.SpectralGrid(-1.0, 0.0, 0.01))
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)


def test_bare_scattering_oracle():
    p = of.SystemParams(gamma_c=0.01, gamma_d=0.01)
    report = of.run_scattering_oracle(p, of.MechanicalState.number(0), of.WavePacket(0.3, 0.05))
    assert report.relative_l2 < 0.02
    assert report.norm_drift < 1e-6
