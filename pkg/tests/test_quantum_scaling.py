import math

import numpy as np
import pytest

from scalegauge import (
    ConfigError,
    DomainError,
    Lattice,
    Observable,
    ThetaField,
    WavePacket,
    canonical_momentum_apply,
    energy_equation_check,
    equation_invariance_check,
    expectation,
    expectation_external,
    expectation_internal,
    expectation_unscaled,
    momentum_eigenstate,
    region_L_analysis,
    transfer_internal,
)
from scalegauge.quantum_scaling import (
    externally_scaled_state,
    pack_external,
    scaled_identity_operator,
)
from scalegauge.lattice_field import scale_factor

LAT = Lattice((256,), 0.1)
PSI = WavePacket.gaussian(LAT, 3.2, 0.5)
POS = Observable.position(LAT)
MOM = Observable.momentum(LAT)


def brute_position(psi, x, theta):
    total = 0j
    for y in psi.lattice.sites():
        a = psi.amplitudes[y.index]
        total += math.exp(theta.difference(y, x)) * abs(a) ** 2 * y.position[0] * psi.lattice.spacing
    return total


def test_packet_normalised_and_validated():
    assert PSI.norm_sq == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        WavePacket(LAT, np.ones(256))
    with pytest.raises(DomainError):
        WavePacket.from_array(LAT, np.zeros(256))


def test_delta_packet():
    w = LAT.site(40)
    d = WavePacket.delta(w)
    st = pack_external(d, LAT.site(0))
    assert np.count_nonzero(st.amplitudes) == 1 and st.amplitudes[40] != 0
    assert expectation_unscaled(d, POS, LAT.site(0)).value == pytest.approx(4.0, rel=1e-14)


def test_pack_external_sites_agree():
    a, b = pack_external(PSI, LAT.site(0)), pack_external(PSI, LAT.site(100))
    assert np.array_equal(a.amplitudes, b.amplitudes)
    assert np.sum(np.abs(a.amplitudes) ** 2) * LAT.spacing == pytest.approx(1.0, abs=1e-10)


def test_unscaled_position_mean():
    assert expectation_unscaled(PSI, POS, LAT.site(0)).value.real == pytest.approx(3.2, abs=1e-6)


def test_symmetric_packet_position_zero():
    lat = Lattice((201,), 0.1, origin=-10.0)
    psi = WavePacket.gaussian(lat, 0.0, 0.7)
    pos = Observable.position(lat)
    assert abs(expectation_unscaled(psi, pos, lat.site(0)).value) < 1e-10
    bump = ThetaField.gaussian_bump(lat, 0.0, 2.0, 0.5)
    assert abs(expectation_internal(psi, pos, lat.site(100), bump).value) < 1e-10


def test_external_doubles():
    lat = Lattice((64,), 1.0)
    th = ThetaField.linear(lat, math.log(2) / 10)
    psi = WavePacket.gaussian(lat, 30.0, 3.0)
    y, x = lat.site(20), lat.site(10)
    pos = Observable.position(lat)
    ext = expectation_external(psi, pos, y, x, th).value
    assert ext == pytest.approx(2 * expectation_unscaled(psi, pos, x).value, rel=1e-14)
    st = externally_scaled_state(pack_external(psi, y), x, th)
    assert st.norm() == pytest.approx(2 * pack_external(psi, y).norm(), rel=1e-14)


def test_constant_theta_coincidence():
    th = ThetaField.constant(LAT, 1.7)
    x, y = LAT.site(0), LAT.site(50)
    for obs in (POS, MOM):
        u = expectation_unscaled(PSI, obs, x).value
        assert abs(expectation_internal(PSI, obs, x, th).value - u) <= 1e-12
        assert abs(expectation_external(PSI, obs, y, x, th).value - u) <= 1e-12


def test_internal_matches_brute_force():
    th = ThetaField.linear(LAT, 0.05)
    x = LAT.site(0)
    got = expectation_internal(PSI, POS, x, th).value
    assert got == pytest.approx(brute_position(PSI, x, th), rel=1e-10)


def test_internal_rejects_hamiltonian():
    with pytest.raises(ConfigError):
        expectation_internal(PSI, Observable.hamiltonian(LAT), LAT.site(0), ThetaField.constant(LAT))


def test_transfer_internal():
    th = ThetaField.gaussian_bump(LAT, 5.0, 2.0, 0.9)
    x, z = LAT.site(10), LAT.site(180)
    val = expectation_internal(PSI, MOM, x, th)
    assert transfer_internal(val, x, th) == val
    moved = transfer_internal(val, z, th).value
    direct = expectation_internal(PSI, MOM, z, th).value
    assert abs(moved - direct) <= 1e-12 * abs(direct)
    flat = ThetaField.constant(LAT, 2.0)
    assert transfer_internal(val, z, flat).value == val.value


def test_expectation_dispatch():
    th = ThetaField.linear(LAT, 0.05)
    rep = expectation(PSI, POS, "external", LAT.site(0), th, LAT.site(32))
    assert rep.to_dict()["mode"] == "external"
    with pytest.raises(ConfigError):
        expectation(PSI, POS, "external", LAT.site(0), th)
    with pytest.raises(ConfigError):
        expectation(PSI, POS, "sideways", LAT.site(0), th)


def test_ordering_invariance():
    th = ThetaField.linear(LAT, 0.05)
    pk = [WavePacket.gaussian(LAT, c, 0.5) for c in (4.0, 9.0, 6.5)]
    x, y = LAT.site(0), LAT.site(80)
    plain = [abs(expectation_unscaled(p, POS, x).value) for p in pk]
    ext = [abs(expectation_external(p, POS, y, x, th).value) for p in pk]
    assert np.argmax(plain) == np.argmax(ext) == 1


def test_scaled_identity_operator():
    lat = Lattice((16,), 1.0)
    assert np.array_equal(scaled_identity_operator(lat.site(3), ThetaField.constant(lat, 4.0)), np.eye(16))
    th = ThetaField.linear(lat, 0.2)
    m = scaled_identity_operator(lat.site(3), th)
    assert np.all(np.diag(m) > 0)
    assert not np.array_equal(m, np.eye(16))


def test_momentum_eigenstates():
    lat = Lattice((32,), 0.5, "periodic")
    flat = ThetaField.constant(lat)
    x = lat.site(0)
    k1 = 2 * np.pi / (32 * 0.5)
    e0 = momentum_eigenstate(0.0, x, flat).amplitudes
    assert np.allclose(e0, e0[0])
    a, b = momentum_eigenstate(k1, x, flat), momentum_eigenstate(3 * k1, x, flat)
    assert abs(np.vdot(a.amplitudes, b.amplitudes)) < 1e-12
    th = ThetaField.gaussian_bump(lat, 8.0, 2.0, 0.5)
    amps = momentum_eigenstate(2 * k1, x, th).amplitudes
    r = np.exp(th.base.ravel() - th.base.ravel()[0])
    assert np.allclose(np.abs(amps), r * 0.5, rtol=1e-14)
    with pytest.raises(ConfigError):
        momentum_eigenstate(0.1, x, flat)
    with pytest.raises(ConfigError):
        momentum_eigenstate(0.0, LAT.site(0), ThetaField.constant(LAT))


def test_canonical_momentum_plane_wave():
    lat = Lattice((64,), 0.1, "periodic")
    k = 2 * np.pi * 3 / (64 * 0.1)
    y = lat.coordinates()[:, 0]
    psi = np.exp(1j * k * y)
    out = canonical_momentum_apply(psi, 0, ThetaField.constant(lat, 0.3), hbar=1.0)
    expected = 1j * (np.exp(1j * k * 0.1) - 1) / 0.1 * psi
    assert np.allclose(out.discrete, expected, atol=1e-12)
    assert out.valid.all()


def test_canonical_momentum_open_edge_excluded():
    out = canonical_momentum_apply(PSI, 0, ThetaField.linear(LAT, 0.05))
    assert not out.valid[-1] and out.valid[:-1].all()
    assert np.isnan(out.discrete[-1])


def test_canonical_momentum_first_order():
    bump = dict(center=12.8, width=2.0, height=1.0)
    d = []
    for f in (1, 2, 4):
        lat = Lattice((256 * f,), 0.1 / f)
        psi = WavePacket.gaussian(lat, 12.8, 1.0, 2.0)
        th = ThetaField.gaussian_bump(lat, **bump)
        d.append(canonical_momentum_apply(psi, 0, th).max_discrepancy())
    assert 1.5 <= d[0] / d[1] <= 2.5
    assert 1.5 <= d[1] / d[2] <= 2.5


def test_momentum_observable_schemes():
    assert not MOM.is_hermitian()
    assert Observable.momentum(LAT, scheme="central").is_hermitian()
    assert POS.is_hermitian()
    with pytest.raises(ConfigError):
        Observable.momentum(LAT, scheme="backward")


def small_h(seed=3):
    lat = Lattice((64,), 0.1)
    v = 5.0 * np.random.default_rng(seed).uniform(-1, 1, 64)
    return lat, Observable.hamiltonian(lat, v)


def test_energy_equation_random_theta():
    lat, H = small_h()
    th = ThetaField(lat, 0.3 * np.random.default_rng(9).standard_normal(64))
    rep = energy_equation_check(H, lat.site(0), th, lat.site(40))
    assert rep.unscaled_residual < 1e-10
    assert rep.transfer_vs_direct_residual < 1e-10
    assert rep.energy_basis_residual < 1e-10
    assert rep.position_basis_residual > 1e-3
    assert rep.transferred_gap == pytest.approx(rep.position_basis_residual, rel=1e-10)


def test_energy_equation_constant_theta():
    lat, H = small_h()
    rep = energy_equation_check(H, lat.site(0), ThetaField.constant(lat, 5.0), lat.site(40))
    assert rep.position_basis_residual < 1e-10


def test_energy_equation_rejects_non_hermitian():
    with pytest.raises(ConfigError):
        energy_equation_check(MOM, LAT.site(0), ThetaField.constant(LAT))


def test_equation_invariance_examples():
    assert equation_invariance_check(2, 3, 18, 5)
    assert not equation_invariance_check(2, 3, 17, 5)
    assert not equation_invariance_check(2, 3, 17, 1)
    assert equation_invariance_check(2, 3, 18, 1)


def test_region_constant_theta():
    rep = region_L_analysis(PSI, LAT.site(0), ThetaField.constant(LAT, 3.0), 1e-9)
    assert rep.theta_spread == 0 and rep.max_internal_deviation == 0
    assert rep.r_zx.value == 1.0 and rep.within_L


def test_region_linear_deviation_uses_support_width():
    alpha = 0.05
    rep = region_L_analysis(PSI, LAT.site(0), ThetaField.linear(LAT, alpha), 1.0)
    pos = LAT.coordinates()[rep.region, 0]
    width = pos.max() - pos.min()
    assert rep.z.position[0] == pos.min()
    assert rep.max_internal_deviation == pytest.approx(math.expm1(alpha * width), rel=1e-12)


def test_region_distant_x():
    # theta(x) - theta(z) = 0.1
    lat = Lattice((256,), 0.1)
    psi = WavePacket.gaussian(lat, 20.0, 0.5)
    z0 = region_L_analysis(psi, lat.site(0), ThetaField.constant(lat), 1.0).z
    th = ThetaField(lat, np.where(np.arange(256) < z0.index - 20, 0.1, 0.0))
    rep = region_L_analysis(psi, lat.site(0), th, 1e-3)
    assert rep.z == z0
    assert not rep.within_L
    assert rep.r_zx.value == pytest.approx(math.exp(-0.1), rel=1e-12)


def test_region_errors():
    with pytest.raises(ConfigError):
        region_L_analysis(PSI, LAT.site(0), ThetaField.constant(LAT), 0.0)


def test_scale_factor_consistency_with_region_split():
    th = ThetaField.linear(LAT, 0.02)
    x = LAT.site(0)
    rep = region_L_analysis(PSI, x, th, 0.1)
    y = LAT.site_at(int(rep.region[-1]))
    lhs = scale_factor(th, y, x).value
    rhs = scale_factor(th, y, rep.z).value * rep.r_zx.value
    assert lhs == pytest.approx(rhs, rel=1e-13)
