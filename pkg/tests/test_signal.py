import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_aggregate
from oracle import brute_force_grid, brute_force_signal
from dqc_sim.bath import BathSpec, resonance_table, uniform_resonance_table
from dqc_sim.model import AggregateSpec, ValidationError, diagonalize_manifolds
from dqc_sim.photonics import ClassicalPulseSet, SpdcSource
from dqc_sim.signal import (Axis, SpectrumJob, correlator_tensors, pathway_weights, resonance_denominator,
                            signal_point, spectrum_2d, weight_tensor)

BATH = BathSpec(10.0, 100.0)


def make_job(spec, source=None, res=None, n2=16, n3=16, **kw):
    basis = diagonalize_manifolds(spec)
    res = res if res is not None else resonance_table(basis, BATH)
    source = source if source is not None else ClassicalPulseSet.identical(15100.0, 10.0)
    ef, ee = basis.two_exciton_energies, basis.one_exciton_energies
    o2 = Axis(ef.min() - 400.0, ef.max() + 400.0, n2)
    o3 = Axis(ee.min() - 400.0, ee.max() + 400.0, n3)
    return SpectrumJob(o2, o3, source, basis, res, **{"normalize": False, **kw})


def spdc_for(spec):
    return SpdcSource(pump_center=2 * spec.site_energies.mean(), pump_width=50.0, t1=0.0, t2=10.0,
                      center1=spec.site_energies.min(), center2=spec.site_energies.max())


@pytest.mark.parametrize("seed", range(6))
def test_grid_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    spec = random_aggregate(rng, 2 + seed % 2)
    source = spdc_for(spec) if seed % 3 == 0 else ClassicalPulseSet.identical(15050.0, 8.0, chirp=-300.0)
    job = make_job(spec, source)
    grid = spectrum_2d(job)
    oracle = brute_force_grid(grid.omega3, grid.omega2, grid.omega1, job.basis, job.resonances, source)
    np.testing.assert_allclose(grid.values, oracle, rtol=1e-10, atol=0)


def test_signal_point_matches_grid(dimer_spec):
    job = make_job(dimer_spec, n2=2, n3=2)
    grid = spectrum_2d(job)
    for i, o2 in enumerate(grid.omega2):
        for k, o3 in enumerate(grid.omega3):
            assert signal_point(o3, o2, grid.omega1, job) == pytest.approx(grid.values[i, k], rel=1e-12)


def test_signal_point_matches_oracle(dimer_spec):
    job = make_job(dimer_spec)
    for o3, o2 in [(15000.0, 30000.0), (15321.0, 29876.5)]:
        expected = brute_force_signal(o3, o2, 15050.0, job.basis, job.resonances, job.source)
        assert signal_point(o3, o2, 15050.0, job) == pytest.approx(expected, rel=1e-12)


def test_pathway_filters_add_up(dimer_spec):
    both = spectrum_2d(make_job(dimer_spec)).values
    p1 = spectrum_2d(make_job(dimer_spec, pathway_filter="pathway1")).values
    p2 = spectrum_2d(make_job(dimer_spec, pathway_filter="pathway2")).values
    np.testing.assert_allclose(p1 + p2, both, rtol=1e-12, atol=1e-12 * np.abs(both).max())
    assert np.abs(p1).max() > 0 and np.abs(p2).max() > 0


def test_pathway_filter_validation(dimer_spec):
    with pytest.raises(ValidationError):
        make_job(dimer_spec, pathway_filter="pathway3")


def test_s0_is_linear(dimer_spec):
    a = spectrum_2d(make_job(dimer_spec)).values
    b = spectrum_2d(make_job(dimer_spec, s0=-2.5)).values
    np.testing.assert_allclose(b, -2.5 * a, rtol=1e-14)


def test_monomer_without_overtone_dipole_is_silent():
    spec = AggregateSpec.from_arrays([15000.0], overtone_dipole_scale=0.0)
    grid = spectrum_2d(make_job(spec))
    assert np.all(grid.values == 0)
    assert grid.metadata["raw_peak_magnitude"] == 0.0


def test_normalization(dimer_spec):
    grid = spectrum_2d(make_job(dimer_spec, normalize=True))
    assert grid.magnitude.max() == 1.0
    raw = spectrum_2d(make_job(dimer_spec))
    np.testing.assert_allclose(grid.values * grid.metadata["raw_peak_magnitude"], raw.values, rtol=1e-14)


@pytest.mark.parametrize("threads,block", [(1, 1), (3, 5), (4, 16), (8, 64)])
def test_deterministic_across_threads_and_blocks(threads, block):
    spec = random_aggregate(np.random.default_rng(5), 4)
    job = make_job(spec, n2=37, n3=23)
    ref = spectrum_2d(job, threads=1, block=16).values
    np.testing.assert_array_equal(spectrum_2d(job, threads=threads, block=block).values, ref)


def test_weights():
    spec = AggregateSpec.from_arrays([15000.0, 15300.0], couplings=[[0, 100.0], [100.0, 0]], dipoles=[1.0, 0.0])
    basis = diagonalize_manifolds(spec)
    w1, w2 = pathway_weights(1, 0, 1, basis)
    assert w1 == w2
    np.testing.assert_allclose(weight_tensor(basis)[1, 0, 1], w1, rtol=1e-15)
    decoupled = diagonalize_manifolds(AggregateSpec.from_arrays([15000.0, 15300.0], dipoles=[1.0, 0.0]))
    # e_2 is dark
    assert pathway_weights(0, 1, 0, decoupled) == (0.0, 0.0)
    with pytest.raises(IndexError):
        pathway_weights(3, 0, 0, decoupled)


def test_resonance_denominator():
    za, zb, zc = 100 + 3j, 200 + 5j, 300 + 7j
    # each on-resonance factor is (omega - z) = -i Gamma
    assert resonance_denominator(300.0, 200.0, 100.0, zc, zb, za) == pytest.approx(1j * 3 * 5 * 7)
    mixed = resonance_denominator(310.0, 190.0, 104.0, zc, zb, za)
    assert mixed == pytest.approx((310.0 - zc) * (190.0 - zb) * (104.0 - za), rel=1e-15)
    far = [abs(resonance_denominator(300.0 + d, 200.0, 100.0, zc, zb, za)) for d in (1e6, 2e6)]
    assert far[1] / far[0] == pytest.approx(2.0, rel=1e-5)
    with pytest.raises(ValueError):
        resonance_denominator(0.0, 0.0, 0.0, zc, 200 + 0j, za)


def test_literal_negative_gaps_suppress_signal(dimer_spec):
    job = make_job(dimer_spec)
    lit1, lit2 = correlator_tensors(job.source, job.resonances, abs_gap_frequencies=False)
    c1, c2 = correlator_tensors(job.source, job.resonances, abs_gap_frequencies=True)
    assert np.abs(lit1).max() < 1e-200 * np.abs(c1).max()
    assert np.abs(lit2).max() < 1e-200 * np.abs(c2).max()


def harmonic_ray_peak(scale, dephasing=40.0):
    spec = AggregateSpec.from_arrays([15000.0, 15300.0], couplings=[[0, 100.0], [100.0, 0]],
                                     overtone=[-150.0 * scale] * 2, combination=[[0, -50.0 * scale], [-50.0 * scale, 0]],
                                     dipoles=[1.0, 0.5])
    basis = diagonalize_manifolds(spec)
    job = make_job(spec, res=uniform_resonance_table(basis, dephasing), n2=61, n3=61)
    return spectrum_2d(job).magnitude.max()


def test_harmonic_cancellation_with_equal_dephasing():
    assert harmonic_ray_peak(0.0) < 1e-10 * harmonic_ray_peak(1.0)


def test_residual_decreases_along_nonlinearity_ray():
    peaks = [harmonic_ray_peak(s) for s in (1.0, 0.5, 0.25, 0.1, 0.01)]
    assert all(a > b for a, b in zip(peaks, peaks[1:]))


def test_harmonic_residual_with_phonon_dephasing(dimer_spec):
    # unequal Gamma_fe' and Gamma_e'g leave a finite residual
    spec = dimer_spec.with_changes(overtone_nonlinearity=np.zeros(2), combination_nonlinearity=np.zeros((2, 2)))
    residual = spectrum_2d(make_job(spec, n2=61, n3=61)).magnitude.max()
    full = spectrum_2d(make_job(dimer_spec, n2=61, n3=61)).magnitude.max()
    assert 0 < residual < full


@given(seed=st.integers(0, 2 ** 32 - 1))
def test_peak_sits_on_two_exciton_resonance(seed):
    spec = random_aggregate(np.random.default_rng(seed), 2)
    basis = diagonalize_manifolds(spec)
    res = uniform_resonance_table(basis, 10.0)
    job = make_job(spec, ClassicalPulseSet.identical(spec.site_energies.mean(), 3.0), res=res, n2=201, n3=101)
    grid = spectrum_2d(job)
    i2 = np.unravel_index(np.argmax(grid.magnitude), grid.magnitude.shape)[0]
    step = job.omega2_axis.step
    assert np.min(np.abs(res.z_fg.real - grid.omega2[i2])) <= step


def test_default_omega1_is_brightest_state(dimer_spec):
    job = make_job(dimer_spec)
    bright = np.argmax(job.basis.dip_ge ** 2)
    assert job.resolved_omega1 == job.resonances.z_eg[bright].real
    assert make_job(dimer_spec, omega1=15111.0).resolved_omega1 == 15111.0


def test_axis_validation():
    with pytest.raises(ValidationError, match="count"):
        Axis(0.0, 1.0, 1)
    with pytest.raises(ValidationError, match="max"):
        Axis(2.0, 1.0, 5)
    assert Axis(0.0, 1.0, 5).step == 0.25


def test_weights_exhaustive_dimer(dimer_spec):
    basis = diagonalize_manifolds(dimer_spec)
    d_fe, d_eg = np.array(basis.dip_ef), np.array(basis.dip_ge)
    for f in range(3):
        for ep in range(2):
            for e in range(2):
                direct = d_fe[f, ep] * d_eg[ep] * d_fe[f, e] * d_eg[e]
                assert pathway_weights(f, ep, e, basis) == (pytest.approx(direct, rel=1e-15),) * 2
