import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topowalk.continuous import (
    BOUNDARY_CASES,
    BULK_CASES,
    DecoupledField,
    Generator,
    IntegrationError,
    boundary_generator_simple,
    boundary_generator_split,
    bulk_generator_simple,
    bulk_generator_split,
    decoupled_residual,
    decoupled_residual_budget,
    decoupled_rhs,
    discrete_continuous_distance,
    evolve_continuous,
    extract_generator_oracle,
    neville_zero,
    phi_inverse,
    phi_transform,
)
from topowalk.lattice import DomainError, LatticeSpec, WalkerState, make_packet, norm_squared, random_state, region_probability

PERIODIC = LatticeSpec(-16, 15)
OPEN = LatticeSpec(-40, 40, "open")


def bulk(case, lattice=PERIODIC, rates=(1.0, 0.7)):
    if case.startswith("theta"):
        return bulk_generator_simple(case, rates[0], lattice)
    return bulk_generator_split(case, *rates, lattice)


def test_bulk_simple_rows():
    g = bulk_generator_simple("theta_positive", 0.8, PERIODIC)
    assert g.row(3, 0) == [(1, -2, -0.8), (1, 0, 0.8)]
    assert g.row(3, 1) == [(0, 0, -0.8), (0, 2, 0.8)]
    neg = bulk_generator_simple("theta_negative", 0.8, PERIODIC)
    assert neg.row(3, 0) == [(1, 0, 0.8), (1, 2, -0.8)]
    assert not np.any(bulk_generator_simple("theta_positive", 0.0, PERIODIC).to_dense())


def test_bulk_split_rows():
    g = bulk_generator_split("I", 0.6, 0.0, PERIODIC)
    assert g.row(0, 0) == [(1, 0, -1.2)]
    g = bulk_generator_split("III", 0.6, 0.4, PERIODIC)
    assert g.row(0, 0) == [(1, -2, 0.6), (1, -1, 0.8), (1, 0, 0.6)]
    one = bulk_generator_split("I", 0.6, 0.4, PERIODIC).to_dense()
    two = bulk_generator_split("II", 0.6, 0.4, PERIODIC).to_dense()
    assert np.array_equal(one, two)


@pytest.mark.parametrize("case", BULK_CASES)
def test_bulk_generators_anti_hermitian(case):
    assert bulk(case).anti_hermitian_defect() < 1e-12


def test_boundary_simple_rows():
    g = boundary_generator_simple(1.3, OPEN)
    assert g.row(0, 0) == [] and g.row(-1, 0) == []
    assert g.row(1, 1) == [(0, 0, -1.3), (0, 2, 1.3)]
    assert g.row(0, 1) == [(0, 2, 1.3)] and g.row(-1, 1) == [(0, -2, 1.3)]
    assert g.zero_rows() == [(-1, 0), (0, 0)]
    assert g.anti_hermitian_defect() < 1e-12


def test_boundary_split_rows():
    g = boundary_generator_split("III_IV", 1.0, 0.5, OPEN)
    assert g.zero_rows() == [(-1, 0), (0, 0)]
    assert g.anti_hermitian_defect() < 1e-12
    g = boundary_generator_split("I_III", 1.0, 0.5, OPEN)
    assert g.zero_rows() == [(-1, 1)]
    assert g.row(0, 0) == [(1, 1, -0.5)]
    assert g.anti_hermitian_defect() < 1e-12 and g.notes


def test_boundary_errors():
    small = LatticeSpec(-4, 4, "open")
    with pytest.raises(DomainError):
        boundary_generator_simple(1.0, small)
    with pytest.raises(DomainError):
        boundary_generator_split("III_IV", 1.0, 1.0, small)
    with pytest.raises(DomainError):
        boundary_generator_split("II_IV", 1.0, 1.0, OPEN)
    with pytest.raises(DomainError):
        bulk_generator_split("V", 1.0, 1.0, OPEN)
    with pytest.raises(DomainError):
        bulk_generator_simple("theta_positive", np.inf, OPEN)


def test_generator_apply_matches_dense(rng):
    for gen in (bulk("III"), bulk("theta_negative"), boundary_generator_split("I_III", 0.7, 1.1, OPEN)):
        lat = gen.lattice
        s = random_state(lat, rng)
        a, b = gen.apply(s.psi0, s.psi1)
        v = gen.to_dense() @ np.stack([s.psi0, s.psi1], 1).reshape(-1)
        assert np.abs(np.stack([a, b], 1).reshape(-1) - v).max() < 1e-12


def test_evolve_zero_generator_is_constant(rng):
    s = random_state(PERIODIC, rng)
    tr = evolve_continuous(s, Generator(PERIODIC), 1.0, dt=0.1, snapshot_every=0.5)
    assert list(tr.times) == [0.0, 0.5, 1.0]
    assert all(np.array_equal(p, s.psi0) for p in tr.psi0)


def test_evolve_trapped_site_bit_exact():
    s = WalkerState.from_amplitudes(OPEN, {(0, 0): 1.0})
    tr = evolve_continuous(s, boundary_generator_simple(1.0, OPEN), 25.0, dt=0.01, snapshot_every=1.0)
    i = OPEN.index(0)
    assert np.all(tr.psi0[:, i] == 1.0)


def test_bulk_norm_drift_within_budget(rng, thresholds):
    lat = LatticeSpec(-64, 63)
    s = random_state(lat, rng)
    tr = evolve_continuous(s, bulk_generator_simple("theta_positive", 1.0, lat), 10.0, dt=0.01)
    assert abs(norm_squared(tr.final) - 1) < thresholds["bulk_norm_drift"]["threshold"]


def test_evolve_errors(rng):
    s = random_state(PERIODIC, rng)
    g = bulk("III")
    with pytest.raises(DomainError):
        evolve_continuous(s, g, 1.0, dt=0.0)
    with pytest.raises(DomainError):
        evolve_continuous(s, g, -1.0)
    with pytest.raises(DomainError):
        evolve_continuous(random_state(OPEN, rng), g, 1.0)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_blowup_reports_time(rng):
    s = random_state(PERIODIC, rng)
    with pytest.raises(IntegrationError) as err:
        evolve_continuous(s, bulk("III").scaled(1e200), 1.0, dt=1e-3)
    assert err.value.time > 0


def test_iii_iv_region_decoupling():
    lat = LatticeSpec(-60, 60, "open")
    s = make_packet(lat, 12, 2, (1, 1))
    g = boundary_generator_split("III_IV", 1.0, 1.0, lat)
    tr = evolve_continuous(s, g, 25.0, dt=0.005, snapshot_every=1.0)
    assert max(region_probability(snap, -60, -5) for snap in tr) < 1e-6


def test_phi_examples():
    s = WalkerState.from_amplitudes(PERIODIC, {(0, 0): 1.0})
    f = phi_transform(s, "simple")
    i = PERIODIC.index(0)
    assert f.phi_plus[i] == 1 and f.phi_minus[i] == -1
    s = WalkerState.from_amplitudes(PERIODIC, {(-1, 1): 1.0})
    f = phi_transform(s, "split_III")
    assert f.phi_plus[i] == 1 and f.phi_minus[i] == 1
    s = WalkerState.from_amplitudes(PERIODIC, {(0, 1): 1.0})
    f = phi_transform(s, "split_I")
    assert f.phi_plus[i] == 1 and f.phi_minus[i] == 1
    with pytest.raises(DomainError):
        phi_transform(s, "nope")


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), variant=st.sampled_from(["simple", "simple_other", "split_III", "split_IV", "split_I"]))
def test_phi_round_trip(seed, variant):
    s = random_state(PERIODIC, np.random.default_rng(seed))
    back = phi_inverse(phi_transform(s, variant))
    assert max(np.abs(back.psi0 - s.psi0).max(), np.abs(back.psi1 - s.psi1).max()) < 1e-12


DECOUPLE = [
    ("theta_positive", "simple", (1.0,)),
    ("theta_negative", "simple_other", (1.0,)),
    ("III", "split_III", (0.8, 0.5)),
    ("IV", "split_IV", (0.8, 0.5)),
    ("I", "split_I", (0.8, 0.5)),
]


@pytest.mark.parametrize("case,variant,rates", DECOUPLE)
def test_evolution_commutes_with_phi(case, variant, rates):
    lat = LatticeSpec(-32, 31)
    s = make_packet(lat, 0, 3, (1, 0.5j))
    gen = bulk(case, lat, rates + (0.0,) if len(rates) == 1 else rates)
    after = phi_transform(evolve_continuous(s, gen, 2.0, dt=0.005).final, variant)
    f = phi_transform(s, variant)
    plus, minus = f.phi_plus.copy(), f.phi_minus.copy()
    dt = 0.005
    for _ in range(400):
        for sign, arr in ((1, plus), (-1, minus)):
            k1 = decoupled_rhs(arr, sign, rates, variant)
            k2 = decoupled_rhs(arr + dt / 2 * k1, sign, rates, variant)
            k3 = decoupled_rhs(arr + dt / 2 * k2, sign, rates, variant)
            k4 = decoupled_rhs(arr + dt * k3, sign, rates, variant)
            arr += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    assert np.abs(after.phi_plus - plus).max() < 1e-9
    assert np.abs(after.phi_minus - minus).max() < 1e-9


def test_decoupled_residual_budget_and_scaling():
    lat = LatticeSpec(-64, 63)
    s = make_packet(lat, 0, 3, (1, 1))
    gen = bulk_generator_simple("theta_positive", 1.0, lat)
    res = []
    for spacing in (0.04, 0.02):
        tr = evolve_continuous(s, gen, 4.0, dt=0.005, snapshot_every=spacing)
        r = decoupled_residual(tr, 1.0, "simple")
        assert r < decoupled_residual_budget(1.0, "simple", spacing)
        assert r < 1e-3
        res.append(r)
    assert 3.5 < res[0] / res[1] < 4.5


def test_decoupled_residual_zero_field():
    from topowalk.lattice import Trajectory

    z = np.zeros((5, PERIODIC.size), complex)
    tr = Trajectory(PERIODIC, np.arange(5.0), z, z)
    assert decoupled_residual(tr, 1.0, "simple") == 0.0
    with pytest.raises(DomainError):
        decoupled_residual(Trajectory(PERIODIC, np.array([0.0, 1.0, 3.0]), z[:3], z[:3]), 1.0, "simple")


def test_time_reversal_between_branches():
    # real data with Psi0 = 0: Phi_- at +t equals Phi_+ at -t
    lat = LatticeSpec(-48, 47)
    s = make_packet(lat, 0, 3, (0, 1))
    gen = bulk_generator_simple("theta_positive", 1.0, lat)
    fwd = phi_transform(evolve_continuous(s, gen, 3.0, dt=0.005).final, "simple")
    back = phi_transform(evolve_continuous(s, gen.scaled(-1), 3.0, dt=0.005).final, "simple")
    assert np.abs(fwd.phi_minus - back.phi_plus).max() < 1e-10
    assert np.abs(fwd.phi_minus - np.conj(back.phi_plus)).max() < 1e-10


def test_neville_exact_for_polynomials():
    xs = [0.4, 0.2, 0.1]
    assert np.isclose(neville_zero(xs, [3 + 2 * x - x**2 for x in xs]), 3)


@pytest.mark.parametrize("case", BULK_CASES)
def test_oracle_bulk(case):
    rates = (1.0,) if case.startswith("theta") else (1.0, 0.7)
    rep = extract_generator_oracle(case, rates, lattice=LatticeSpec(-8, 7))
    assert rep.ok, rep.summary()
    assert rep.max_deviation < 1e-6 and rep.observed_order > 0.9


@pytest.mark.parametrize("case", BOUNDARY_CASES)
def test_oracle_boundary_zero_rows(case):
    rates = (1.0,) if case == "simple_boundary" else (1.0, 0.7)
    rep = extract_generator_oracle(case, rates)
    zero = {"simple_boundary": [(-1, 0), (0, 0)], "III_IV": [(-1, 0), (0, 0)], "I_III": [(-1, 1)]}[case]
    for x, c in zero:
        assert np.abs(rep.estimated_row(x, c)).max() < 1e-6
    if case == "I_III":
        assert set(rep.flagged_rows) == {(0, 0), (0, 1)}
    else:
        assert rep.ok, rep.summary()


def test_oracle_flags_wrong_generator():
    rep = extract_generator_oracle("III", (1.0, 0.7), lattice=LatticeSpec(-8, 7))
    wrong = bulk_generator_split("IV", 1.0, 0.7, LatticeSpec(-8, 7)).to_dense()
    assert np.abs(rep.estimate - wrong).max() > 0.1


def test_oracle_schedule_validation():
    with pytest.raises(DomainError):
        extract_generator_oracle("III", (1.0, 1.0), dt_schedule=(1e-3, 2e-3, 4e-3))
    with pytest.raises(DomainError):
        extract_generator_oracle("III", (1.0, 1.0), dt_schedule=(2e-3, 1e-3))


@pytest.mark.parametrize("case,rates", [("theta_positive", (1.0,)), ("III", (1.0, 0.5))])
def test_discrete_converges_to_continuous(case, rates):
    lat = LatticeSpec(-32, 31)
    s = make_packet(lat, 0, 3, (1, 1))
    dts = (0.02, 0.01, 0.005)
    dist = [discrete_continuous_distance(case, rates, s, 1.0, dt) for dt in dts]
    orders = [np.log2(a / b) for a, b in zip(dist, dist[1:])]
    assert min(orders) > 0.9, (dist, orders)
