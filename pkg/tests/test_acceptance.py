"""Acceptance criteria, each run at its stated tolerance.

Every test prints one ``PASS``/``FAIL`` line; the lines are repeated in the
terminal summary.
"""
import math

import numpy as np
import pytest

from scalegauge import (
    Lattice,
    LinkExponentField,
    LocalNumber,
    LocalState,
    Observable,
    ScaledStructure,
    StructureMismatch,
    ThetaField,
    WavePacket,
    canonical_momentum_apply,
    check_field_axioms,
    combine,
    energy_equation_check,
    equation_invariance_check,
    expectation_external,
    expectation_internal,
    expectation_unscaled,
    inner_product,
    lift_polynomial,
    lift_term,
    parallel_transport,
    path_product,
    region_L_analysis,
    transfer_internal,
)
from scalegauge.harness import EXPERIMENTS, default_config, dumps, run_experiment, table_csv
from scalegauge.harness.experiments import monotone_path, random_loop
from scalegauge.scaled_numbers import RationalTerm, broken_ops, correspond_to_base, lift_exponent

from .conftest import ACCEPTANCE_LINES


def report(name: str, passed: bool, detail: str):
    line = f"{'PASS' if passed else 'FAIL'}  {name}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert passed, line


def log_uniform(rng, lo, hi, n=None):
    return np.exp(rng.uniform(math.log(lo), math.log(hi), n))


def test_axiom_equivalence():
    rng = np.random.default_rng(2024)
    base = check_field_axioms(ScaledStructure(1.0), 10_000, seed=0, tol=1e-9)
    flags = {k: v.passed for k, v in base.results.items()}
    ok, worst, min_fail = base.passed, 0.0, 1.0
    for i, r in enumerate(log_uniform(rng, 1e-6, 1e6, 20)):
        s = ScaledStructure(r)
        good = check_field_axioms(s, 10_000, seed=i + 1, tol=1e-9)
        ok &= good.passed and {k: v.passed for k, v in good.results.items()} == flags
        worst = max(worst, *(v.max_residual for v in good.results.values()))
        bad = check_field_axioms(s, 10_000, seed=i + 1, tol=1e-9, ops=broken_ops(s))
        min_fail = min(min_fail, bad.results["mul_identity"].fail_fraction)
    report("axiom equivalence", ok and min_fail >= 0.99,
           f"worst scaled residual {worst:.2e} <= 1e-9, broken mul_identity fail fraction {min_fail:.4f} >= 0.99")


def test_function_lifting():
    rng = np.random.default_rng(11)
    worst_poly = 0.0
    for _ in range(1000):
        deg = int(rng.integers(0, 9))
        c = rng.standard_normal(deg + 1) + 1j * rng.standard_normal(deg + 1)
        a = complex(rng.standard_normal(), rng.standard_normal())
        s = ScaledStructure(float(log_uniform(rng, 1e-6, 1e6)))
        plain = 0j
        for k, ck in enumerate(c):
            plain += ck * a**k
        got = lift_polynomial(c, correspond_to_base(a, s), s)
        scale = s.r * sum(abs(ck) * abs(a) ** k for k, ck in enumerate(c))
        worst_poly = max(worst_poly, abs(got - correspond_to_base(plain, s)) / scale)
    worst_term, exps = 0.0, set()
    for _ in range(1000):
        m, n = (int(v) for v in rng.integers(1, 17, 2))
        a, b = rng.uniform(0.5, 2.0, 2) * np.exp(1j * rng.uniform(0, 2 * np.pi, 2))
        s = ScaledStructure(float(log_uniform(rng, 1e-6, 1e6)))
        t = RationalTerm(m, n, complex(a), complex(b))
        exps.add(lift_exponent(m, n))
        want = s.r * t.plain()
        worst_term = max(worst_term, abs(lift_term(t, s) - want) / abs(want))
    report("function lifting", worst_poly <= 1e-9 and exps == {1} and worst_term <= 1e-12,
           f"polynomial rel {worst_poly:.2e} <= 1e-9, net r-power {sorted(exps)}, term rel {worst_term:.2e} <= 1e-12")


def test_gradient_theorem():
    lat = Lattice((16, 16), 1.0)
    rng = np.random.default_rng(3)
    pair_worst = loop_worst = 0.0
    for _ in range(20):
        f = LinkExponentField.from_theta(ThetaField(lat, 2.0 * rng.standard_normal(lat.extent)))
        for _ in range(100):
            corners = [rng.integers(0, 16, 2) for _ in range(2)]
            a = lat.site(tuple(int(min(c)) for c in corners))
            b = lat.site(tuple(int(max(c)) for c in corners))
            p1 = path_product(f, monotone_path(lat, a, b, rng))
            p2 = path_product(f, monotone_path(lat, a, b, rng))
            pair_worst = max(pair_worst, abs(p1 - p2) / max(p1, p2))
        for _ in range(100):
            loop = random_loop(lat, lat.site_at(int(rng.integers(0, 256))), 12, rng)
            loop_worst = max(loop_worst, abs(path_product(f, loop) - 1.0))
    ex = np.zeros((16, 16, 2))
    ex[5, 5, 0] = 0.3
    curled = LinkExponentField(lat, ex)
    plaq = [lat.site(5, 5), lat.site(6, 5), lat.site(6, 6), lat.site(5, 6), lat.site(5, 5)]
    curl_err = abs(path_product(curled, plaq) - math.exp(0.3))
    report("gradient theorem",
           pair_worst <= 1e-10 and loop_worst <= 1e-10 and curl_err <= 1e-10,
           f"path pairs {pair_worst:.2e}, loops {loop_worst:.2e}, curled loop vs exp(0.3) {curl_err:.2e}")


def random_theta(lat, rng):
    kind = rng.integers(0, 3)
    if kind == 0:
        return ThetaField.linear(lat, rng.uniform(-0.2, 0.2))
    if kind == 1:
        return ThetaField.gaussian_bump(lat, rng.uniform(0, 25), rng.uniform(0.5, 4), rng.uniform(-1, 1))
    return ThetaField(lat, np.cumsum(0.02 * rng.standard_normal(lat.n_sites)))


def test_cocycle_transfer():
    lat = Lattice((256,), 0.1)
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(50):
        th = random_theta(lat, rng)
        psi = WavePacket.gaussian(lat, rng.uniform(5, 20), rng.uniform(0.3, 2), rng.uniform(-3, 3))
        x, z = (lat.site_at(int(i)) for i in rng.integers(0, 256, 2))
        for obs in (Observable.position(lat), Observable.momentum(lat)):
            moved = transfer_internal(expectation_internal(psi, obs, x, th), z, th).value
            direct = expectation_internal(psi, obs, z, th).value
            worst = max(worst, abs(moved - direct) / abs(direct))
    report("cocycle and transfer", worst <= 1e-12, f"max rel {worst:.2e} <= 1e-12 over 50 cases")


def test_coincidence():
    lat = Lattice((256,), 0.1)
    psi = WavePacket.gaussian(lat, 3.2, 0.5, 1.5)
    obs = [Observable.position(lat), Observable.momentum(lat), Observable.momentum(lat, scheme="central")]
    worst = 0.0
    for c in (0.0, -4.0, 7.3, 120.0):
        th = ThetaField.constant(lat, c)
        for x, y in ((lat.site(0), lat.site(32)), (lat.site(200), lat.site(7))):
            for o in obs:
                u = expectation_unscaled(psi, o, x).value
                worst = max(worst, abs(expectation_internal(psi, o, x, th).value - u),
                            abs(expectation_external(psi, o, y, x, th).value - u))
    report("coincidence", worst <= 1e-12, f"max |scaled - unscaled| {worst:.2e} <= 1e-12")


def test_internal_position_oracle():
    lat = Lattice((256,), 0.1)
    th = ThetaField.linear(lat, 0.05)
    psi = WavePacket.gaussian(lat, 3.2, 0.5)
    x = lat.site(0)
    # brute force: site by site, plain Python arithmetic
    oracle = 0.0
    for y in lat.sites():
        amp = complex(psi.amplitudes[y.index])
        w = math.exp(0.05 * (y.coords[0] - x.coords[0]) * 0.1)
        oracle += w * (amp.real**2 + amp.imag**2) * (y.coords[0] * 0.1) * 0.1
    got = expectation_internal(psi, Observable.position(lat), x, th).value
    rel = abs(got - oracle) / abs(oracle)
    report("internal position oracle", rel <= 1e-10, f"rel {rel:.2e} <= 1e-10 (value {got.real:.12f})")


def test_canonical_momentum():
    d = []
    for f in (1, 2, 4):
        lat = Lattice((256 * f,), 0.1 / f)
        th = ThetaField.gaussian_bump(lat, 12.8, 2.0, 1.0)
        psi = WavePacket.gaussian(lat, 12.8, 1.0, 2.0)
        d.append(canonical_momentum_apply(psi, 0, th).max_discrepancy())
    ratios = [d[0] / d[1], d[1] / d[2]]
    lat = Lattice((256,), 0.1)
    psi = WavePacket.gaussian(lat, 12.8, 1.0, 2.0)
    flat = canonical_momentum_apply(psi, 0, ThetaField.constant(lat, 0.4))
    amps = psi.amplitudes
    plain = 1j * (amps[1:] - amps[:-1]) / 0.1
    exact = np.array_equal(flat.discrete[:-1], plain)
    report("canonical momentum", all(1.5 <= r <= 2.5 for r in ratios) and exact,
           f"halving ratios {ratios[0]:.4f}, {ratios[1]:.4f} in 2 +/- 25%, A=0 equals forward difference: {exact}")


def test_energy_equation():
    lat = Lattice((64,), 0.1)
    rng = np.random.default_rng(21)
    H = Observable.hamiltonian(lat, 5.0 * rng.uniform(-1, 1, 64))
    th = ThetaField(lat, 0.5 * rng.standard_normal(64))
    rep = energy_equation_check(H, lat.site(0), th, lat.site(40))
    ok = rep.unscaled_residual < 1e-10 and rep.transfer_vs_direct_residual < 1e-10
    report("energy equation", ok,
           f"eigen residual {rep.unscaled_residual:.2e}, transfer vs direct {rep.transfer_vs_direct_residual:.2e} < 1e-10")


def test_equation_invariance():
    rng = np.random.default_rng(34)
    mismatches = 0
    for i in range(1000):
        m, c, r = log_uniform(rng, 1e-3, 1e3, 3)
        mc2 = m * c * c
        kind = i % 4
        if kind == 0:
            E = mc2
        elif kind == 1:
            E = mc2 * (1 + rng.choice([-1, 1]) * 1e-14)
        elif kind == 2:
            E = mc2 * (1 + rng.choice([-1, 1]) * 1e-9)
        else:
            E = float(log_uniform(rng, 1e-9, 1e9))
        truth = abs(E - mc2) <= 1e-12 * abs(mc2)
        mismatches += equation_invariance_check(m, c, E, r) != truth
    report("equation invariance", mismatches == 0, f"{mismatches} mismatches in 1000 cases")


def test_region_L():
    lat = Lattice((256,), 0.1)
    psi = WavePacket.gaussian(lat, 15.0, 0.5)
    x = lat.site(0)
    flat = region_L_analysis(psi, x, ThetaField.constant(lat, 2.0), 1e-3)
    ok_flat = flat.theta_spread == 0 and flat.max_internal_deviation == 0 and flat.within_L
    z = flat.z
    # theta(z) - theta(x) = 0.1, theta flat over the packet
    th = ThetaField(lat, np.where(np.arange(256) >= z.index - 10, 0.1, 0.0))
    rep = region_L_analysis(psi, x, th, 1e-3)
    err = abs(rep.r_zx.value - math.exp(0.1))
    ok = ok_flat and rep.z == z and not rep.within_L and err <= 1e-12
    report("region L", ok, f"flat: deviation {flat.max_internal_deviation}, within_L {flat.within_L}; "
           f"offset: within_L {rep.within_L}, |r_zx - e^0.1| {err:.1e}")


def theta_specs(dims, n_sites, allow_explicit, rng):
    specs = [
        {"kind": "constant", "c": 0.0},
        {"kind": "constant", "c": -3.0},
        {"kind": "linear", "slope": [0.05] * dims},
        {"kind": "linear", "slope": [-0.2] * dims, "shift": 4.0},
        {"kind": "gaussian_bump", "center": [3.0] * dims, "width": 1.0, "height": 0.5},
        {"kind": "gaussian_bump", "center": [10.0] * dims, "width": 4.0, "height": -1.5},
        {"kind": "gaussian_bump", "center": [1.0] * dims, "width": 0.3, "height": 2.0},
        {"kind": "linear", "slope": [0.3] * dims},
    ]
    if allow_explicit:
        specs += [{"kind": "explicit", "values": rng.standard_normal(n_sites).tolist()} for _ in range(2)]
    else:
        specs += [{"kind": "constant", "c": 9.0}, {"kind": "linear", "slope": [0.01] * dims}]
    return specs


def test_protocol_theta_independence():
    rng = np.random.default_rng(55)
    differing = []
    for name in EXPERIMENTS:
        base = default_config(name)
        lat = base["lattice"]
        n = int(np.prod(lat["extent"]))
        texts = set()
        for spec in theta_specs(len(lat["extent"]), n, name != "momentum_gauge", rng):
            texts.add(dumps(run_experiment(name, {"theta": spec}).tables["protocol"]))
        if len(texts) != 1:
            differing.append(name)
    report("protocol theta-independence", not differing,
           f"protocol tables identical across 10 theta specs for all {len(EXPERIMENTS)} experiments"
           if not differing else f"differ for {differing}")


def test_constant_shift_invariance():
    differing = []
    for name in EXPERIMENTS:
        cfg = default_config(name)
        a = run_experiment(name, cfg)
        cfg["theta"] = dict(cfg["theta"], shift=7.3)
        b = run_experiment(name, cfg)
        same = (dumps([a.invariants, a.tables]) == dumps([b.invariants, b.tables])
                and all(table_csv(a.tables[t]) == table_csv(b.tables[t]) for t in a.tables))
        if not same:
            differing.append(name)
    report("constant-shift invariance", not differing,
           "all reports byte-identical under theta + 7.3 (config echo excluded)"
           if not differing else f"differ for {differing}")


def test_type_safety_gate():
    lat = Lattice((16, 16), 1.0)
    rng = np.random.default_rng(99)
    cross = cross_raised = same = same_raised = 0
    for _ in range(500):
        i, j = rng.integers(0, 256, 2)
        a = LocalNumber(lat.site_at(int(i)), complex(*rng.standard_normal(2)))
        b = LocalNumber(lat.site_at(int(j)), complex(*rng.standard_normal(2)))
        for op in "+-*/":
            for left, right in ((a, b), (a, parallel_transport(b, a.site))):
                is_cross = left.site != right.site
                try:
                    combine(left, right, op)
                    raised = False
                except StructureMismatch:
                    raised = True
                cross += is_cross
                cross_raised += is_cross and raised
                same += not is_cross
                same_raised += (not is_cross) and raised
        sa = LocalState(a.site, rng.standard_normal(4), "abstract")
        sb = LocalState(b.site, rng.standard_normal(4), "abstract")
        for fn in (inner_product, lambda p, q: p + q, lambda p, q: p - q):
            is_cross = sa.site != sb.site
            try:
                fn(sa, sb)
                raised = False
            except StructureMismatch:
                raised = True
            cross += is_cross
            cross_raised += is_cross and raised
            same += not is_cross
            same_raised += (not is_cross) and raised
    report("type-safety gate", cross_raised == cross and same_raised == 0,
           f"{cross_raised}/{cross} cross-site attempts raised, {same_raised}/{same} same-site false positives")
