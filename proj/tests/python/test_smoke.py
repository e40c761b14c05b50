import os

import numpy as np
import pytest

import qsemi

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)


def bloch(x, y, z):
    return (np.eye(2) + x * SX + y * SY + z * SZ) / 2


def random_state(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_zero_mean(rng, rho):
    d = rho.shape[0]
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = (a + a.conj().T) / 2
    return h - np.trace(rho @ h).real * np.eye(d)


def weighted_inner(rho, h, g):
    return np.trace(rho @ (h @ g + g @ h)).real / 2


def test_spot_values():
    r = np.diag([0.75, 0.25])
    assert qsemi.ghb_full_dimensional(r, qsemi.purity())["ghb"] == pytest.approx(0.1875, abs=1e-12)
    # (ln 3)^2 * 3/16
    assert qsemi.ghb_full_dimensional(r, qsemi.entropy())["ghb"] == pytest.approx(
        np.log(3) ** 2 * 3 / 16, rel=1e-12)
    assert qsemi.f0_oracle(r, qsemi.purity()) == pytest.approx(0.1875, rel=1e-6)


def test_expectation_bound_is_variance():
    rng = np.random.default_rng(1)
    rho = random_state(rng, 3)
    y = random_zero_mean(rng, np.eye(3) / 3)
    mean = np.trace(rho @ y).real
    var = np.trace(rho @ (y - mean * np.eye(3)) @ (y - mean * np.eye(3))).real
    rep = qsemi.ghb_full_dimensional(rho, qsemi.expectation(y), n_copies=4)
    assert rep["ghb"] == pytest.approx(var / 4, rel=1e-10)
    assert rep["diagnostics"]["range_ok"]


def test_constrained_and_displacement():
    r = bloch(0, 0, 0.6)
    z = (SZ + SX) / np.sqrt(2)
    c = [qsemi.linear_moment(z, np.trace(r @ z).real)]
    want = 0.64 - (0.64 ** 2 / 2) / 0.82
    assert qsemi.ghb_constrained(r, qsemi.expectation(SZ), c)["ghb"] == pytest.approx(want, rel=1e-12)
    assert qsemi.constrained_oracle(r, qsemi.expectation(SZ), c) == pytest.approx(want, rel=1e-6)

    rho0 = bloch(0, 0.8, 0)
    rep = qsemi.ghb_displacement(rho0, SZ / 2, [qsemi.linear_moment(SX, 0.0)])
    assert rep["ghb"] == pytest.approx(1.5625, rel=1e-12)
    assert len(rep["efficient_score"]) == 1


def test_errors_map_to_python_exceptions():
    with pytest.raises(qsemi.InvalidInput):
        qsemi.functional_value(np.diag([0.7, 0.4]), qsemi.purity())
    with pytest.raises(qsemi.InfiniteBound):
        qsemi.ghb_displacement(np.diag([0.7, 0.3]), SZ / 2, [qsemi.linear_moment(SZ, 0.4)])
    with pytest.raises(qsemi.SupportError):
        qsemi.f0_oracle(bloch(0, 0, 1), qsemi.purity())
    assert issubclass(qsemi.RangeConditionError, qsemi.Error)


def test_imaging_separation():
    for delta in (0.05, 0.1, 0.2, 0.4):
        f = qsemi.Source.two_point(delta)
        assert qsemi.spade_error_even(f, 1) == pytest.approx(qsemi.ec_lower_bound(f, 2), abs=1e-9)
        assert qsemi.ec_lower_bound(f, 2) == pytest.approx(delta ** 2, rel=1e-12)
        # Var(Y^2) with Y = +/-delta/2 + N(0, 1)
        assert qsemi.direct_imaging_error(f, 2) == pytest.approx(2 + delta ** 2, rel=1e-12)
    # He_2(x) = x^2 - 1
    assert qsemi.direct_imaging_estimator(2) == pytest.approx([-1.0, 0.0, 1.0])


def test_belavkin():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = rng.integers(1, 6)
        b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        lhs, rhs, holds = qsemi.belavkin_check(b.conj().T @ b)
        assert holds and lhs >= rhs - 1e-10


def holevo_sdp(rho, scores, dbeta, w):
    """min tr W V over V >= Z(X), Z_kl = tr rho X_k X_l, with X_k zero-mean
    Hermitian and <S_j, X_k> = dbeta_jk. V >= R^dagger R is written as a
    Schur complement with R_k = vec(X_k sqrt(rho))."""
    cp = pytest.importorskip("cvxpy")
    d = rho.shape[0]
    q = dbeta.shape[1]
    evals, evecs = np.linalg.eigh(rho)
    sqrt_rho = evecs @ np.diag(np.sqrt(evals)) @ evecs.conj().T
    xs = [cp.Variable((d, d), hermitian=True) for _ in range(q)]
    v = cp.Variable((q, q), symmetric=True)
    cons = []
    for k, x in enumerate(xs):
        cons.append(cp.real(cp.trace(rho @ x)) == 0)
        for j, s in enumerate(scores):
            cons.append(cp.real(cp.trace((rho @ s + s @ rho) @ x)) / 2 == dbeta[j, k])
    r = cp.hstack([cp.reshape(cp.vec(x @ sqrt_rho, order="F"), (d * d, 1), order="F") for x in xs])
    block = cp.bmat([[v, r.H], [r, np.eye(d * d)]])
    cons.append((block + block.H) / 2 >> 0)
    prob = cp.Problem(cp.Minimize(cp.trace(w @ v)), cons)
    prob.solve(solver=cp.SCS, eps=1e-9, max_iters=200000)
    assert prob.status == cp.OPTIMAL
    return prob.value


@pytest.mark.parametrize("seed,d,q", [(0, 2, 2), (1, 3, 2), (2, 3, 3)])
def test_holevo_matches_sdp(seed, d, q):
    rng = np.random.default_rng(seed)
    rho = random_state(rng, d)
    p = 2 if d == 2 else 4
    scores = [random_zero_mean(rng, rho) for _ in range(p)]
    dbeta = rng.normal(size=(p, q))
    a = rng.normal(size=(q, q))
    w = a @ a.T + 0.1 * np.eye(q)

    res = qsemi.holevo_bound(rho, scores, dbeta, w)
    assert res["ghb"] - 1e-9 <= res["holevo"] <= res["d_invariant"] + 1e-9
    assert res["d_invariant"] <= 2 * res["ghb"] + 1e-9
    assert res["holevo"] == pytest.approx(holevo_sdp(rho, scores, dbeta, w), rel=1e-5)

    # the reported minimizer is feasible and attains the value
    deltas = res["minimizer"]
    for k, delta in enumerate(deltas):
        assert abs(np.trace(rho @ delta)) < 1e-10
        for j, s in enumerate(scores):
            assert weighted_inner(rho, s, delta) == pytest.approx(dbeta[j, k], abs=1e-9)
    gamma = qsemi.gamma_matrix(rho, deltas)
    assert qsemi.holevo_objective(gamma, w) == pytest.approx(res["holevo"], rel=1e-10)


def test_run_scenario_payload():
    payload, status = qsemi.run_scenario(
        "kind: imaging-sweep\nsource: {type: two-point}\nmu: 2\ndeltas: [0.1, 0.2]\n", "imaging")
    assert status == 0
    assert payload["command"] == "imaging"
    assert [row["delta"] for row in payload["results"]["sweep"]] == [0.1, 0.2]
    with pytest.raises(qsemi.InvalidInput):
        qsemi.run_scenario("kind: purity\nstate: {diagonal: [0.75, 0.25]}\n", "holevo")


def test_imports_expected_build():
    # under ctest the module must come from the CMake build tree
    root = os.environ.get("QSEMI_BUILD_TREE")
    if root:
        assert os.path.realpath(qsemi._core.__file__).startswith(os.path.realpath(root))
