import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bpexp.analysis import commutator_error_constant, dirichlet_eigenpairs, one_step_error
from bpexp.errors import DenseCapError, SingularStepError
from bpexp.lattice import Domain, Stencil, ThirdKind, dirichlet, neumann
from bpexp.steppers import (
    EvolutionProblem,
    SchemeKind,
    evolve,
    exact_step,
    step,
    step_cn,
    step_euler,
    step_matrix,
    step_s1,
    step_s2,
)

from conftest import random_complex

ALL = list(SchemeKind)


def unit(rng, n):
    g = random_complex(rng, n)
    return g / np.linalg.norm(g)


def slope(ts, errs):
    return np.polyfit(np.log(ts), np.log(errs), 1)[0]


def test_scheme_parse():
    assert SchemeKind.parse("S2") is SchemeKind.S2
    assert SchemeKind.parse("crank_nicolson") is SchemeKind.CN
    assert SchemeKind.parse(SchemeKind.EXACT) is SchemeKind.EXACT
    with pytest.raises(ValueError, match="unknown scheme"):
        SchemeKind.parse("rk4")


def test_problem_operator():
    p = EvolutionProblem.laplacian(6, scale=1j)
    assert p.ext_k == dirichlet()
    np.testing.assert_array_equal(p.matrix(), 1j * EvolutionProblem.laplacian(6).matrix())


@pytest.mark.parametrize("scheme", ALL)
def test_zero_step_is_identity(scheme, rng):
    p = EvolutionProblem.laplacian(9, ThirdKind(0.5, 2j))
    f = random_complex(rng, 9)
    np.testing.assert_allclose(step(p, scheme, 0.0, f), f, atol=1e-15)


def test_s1_commutator_constant():
    rng = np.random.default_rng(3)
    p = EvolutionProblem.laplacian(16)
    g = unit(rng, 16)
    t = 1e-3
    c = commutator_error_constant(p, 1, g)
    assert one_step_error(p, SchemeKind.S1, t, g) / t**2 == pytest.approx(c, rel=0.10)


def test_odd_eigenfunction_exact():
    p = EvolutionProblem.laplacian(8)
    phi = dirichlet_eigenpairs(8).phi[1]
    for fn in (step_s1, step_s2):
        assert np.linalg.norm(fn(p, 0.5, phi) - exact_step(p, 0.5, phi)) <= 1e-12


def test_s2_third_order_local():
    rng = np.random.default_rng(4)
    p = EvolutionProblem.laplacian(16)
    g = unit(rng, 16)
    ts = 2.0 ** -np.arange(4, 11)
    errs = [one_step_error(p, SchemeKind.S2, t, g) for t in ts]
    assert slope(ts, errs) == pytest.approx(3, abs=0.15)


def test_schrodinger_s2_norm():
    rng = np.random.default_rng(5)
    p = EvolutionProblem.laplacian(8, scale=1j)
    g = unit(rng, 8)
    assert np.linalg.norm(step_s2(p, 0.5, g)) == pytest.approx(1, abs=1e-12)


def test_euler_eigenvector_and_order():
    p = EvolutionProblem.laplacian(16)
    ep = dirichlet_eigenpairs(16)
    t = 0.01
    np.testing.assert_allclose(step_euler(p, t, ep.phi[3]), (1 + t * ep.mu[3]) * ep.phi[3], atol=1e-15)

    g = unit(np.random.default_rng(6), 16)
    ts = 2.0 ** -np.arange(4, 11)
    errs = [one_step_error(p, SchemeKind.EULER, t, g) for t in ts]
    assert slope(ts, errs) == pytest.approx(2, abs=0.15)
    a = p.matrix()
    const = np.linalg.norm(a @ a @ g) / 2
    assert errs[-1] / ts[-1] ** 2 == pytest.approx(const, rel=0.10)


def test_cn_two_point_example():
    p = EvolutionProblem.laplacian(2)
    f = np.array([1, 1]) / math.sqrt(2)
    np.testing.assert_allclose(step_cn(p, 0.5, f), f / 3, atol=1e-15)


def test_cn_unitary_for_schrodinger(rng):
    p = EvolutionProblem.laplacian(32, scale=1j)
    f = random_complex(rng, 32)
    assert np.linalg.norm(step_cn(p, 0.7, f)) == pytest.approx(np.linalg.norm(f), rel=1e-12)


def test_cn_dense_path_matches_tridiagonal_definition(rng):
    # a five-point stencil is not tridiagonal, so this goes through the LU path
    s = Stencil(((-2, -0.25), (-1, 1.0), (0, -1.5), (1, 1.0), (2, -0.25)))
    p = EvolutionProblem(s, ThirdKind(0.2, -0.4), Domain(11))
    a = p.matrix()
    f = random_complex(rng, 11)
    t = 0.3
    ref = np.linalg.solve(np.eye(11) - t / 2 * a, (np.eye(11) + t / 2 * a) @ f)
    np.testing.assert_allclose(step_cn(p, t, f), ref, atol=1e-12)


def test_cn_batched_matches_columns(rng):
    p = EvolutionProblem.laplacian(10, neumann())
    f = random_complex(rng, 10, 3)
    out = step_cn(p, 0.4, f)
    for k in range(3):
        np.testing.assert_allclose(out[:, k], step_cn(p, 0.4, f[:, k]), atol=1e-15)


def test_cn_singular():
    # A = 2E: (E - t/2 A) vanishes at t = 1
    p = EvolutionProblem(Stencil(((0, 2.0),)), dirichlet(), Domain(4))
    with pytest.raises(SingularStepError, match="CN resolvent singular at this t"):
        step_cn(p, 1.0, np.ones(4))
    wide = EvolutionProblem(Stencil(((-2, 0.0), (0, 2.0), (2, 0.0))), dirichlet(), Domain(6))
    with pytest.raises(SingularStepError, match="CN resolvent singular at this t"):
        step_cn(wide, 1.0, np.ones(6))


def test_exact_examples(rng):
    p = EvolutionProblem.laplacian(2)
    f = np.array([1, 1]) / math.sqrt(2)
    np.testing.assert_allclose(exact_step(p, 1.0, f), math.exp(-2) * f, atol=1e-15)
    q = EvolutionProblem.laplacian(12, ThirdKind(0.3, -0.7))
    g = random_complex(rng, 12)
    a = exact_step(q, 0.4, exact_step(q, 0.9, g))
    np.testing.assert_allclose(a, exact_step(q, 1.3, g), atol=1e-11)
    with pytest.raises(DenseCapError):
        exact_step(q, 0.1, g, cap=8)


def test_exact_non_hermitian_matches_eig(rng):
    # complex alpha: not symmetric, goes through expm; check against eig
    p = EvolutionProblem.laplacian(9, ThirdKind(0.5 + 1j, -2.0))
    w, v = np.linalg.eig(p.matrix())
    g = random_complex(rng, 9)
    ref = v @ (np.exp(0.6 * w) * np.linalg.solve(v, g))
    np.testing.assert_allclose(exact_step(p, 0.6, g), ref, atol=1e-10)


def test_evolve(rng):
    p = EvolutionProblem.laplacian(12, scale=1j)
    g = random_complex(rng, 12)
    np.testing.assert_array_equal(evolve(p, "s2", 0.5, 0, g), g)
    seen = []
    out = evolve(p, SchemeKind.EXACT, 0.25, 7, g, lambda k, time, f: seen.append((k, time)))
    np.testing.assert_allclose(out, exact_step(p, 7 * 0.25, g), atol=1e-10)
    assert seen == [(k, k * 0.25) for k in range(1, 8)]
    with pytest.raises(ValueError):
        evolve(p, "s1", 0.1, -1, g)


def test_evolve_deterministic(rng):
    p = EvolutionProblem.laplacian(16)
    g = random_complex(rng, 16)
    a = evolve(p, "s2", 0.3, 20, g)
    b = evolve(p, "s2", 0.3, 20, g)
    np.testing.assert_array_equal(a, b)


T_GRID = [0.1, 0.5, 1.0, 5.0]


@pytest.mark.parametrize("t", T_GRID)
def test_dirichlet_contractive(t):
    p = EvolutionProblem.laplacian(32)
    for s in (SchemeKind.S1, SchemeKind.S2):
        assert np.linalg.norm(step_matrix(p, s, t), 2) <= 1 + 1e-12


@pytest.mark.parametrize("t", T_GRID)
def test_schrodinger_unitary(t):
    p = EvolutionProblem.laplacian(32, scale=1j)
    for s in (SchemeKind.S1, SchemeKind.S2, SchemeKind.CN):
        m = step_matrix(p, s, t)
        assert np.max(np.abs(m.conj().T @ m - np.eye(32))) <= 1e-11


@pytest.mark.parametrize("t", [0.5, 1.0, 5.0])
def test_neumann_s1_not_contractive(t):
    p = EvolutionProblem.laplacian(32, neumann())
    assert np.linalg.norm(step_matrix(p, SchemeKind.S1, t), 2) > 1 + 1e-3


def test_neumann_s1_norm_one_for_small_t():
    # the growing boundary mode is damped by the periodic part until t ~ 1/3;
    # the constant vector keeps the norm at exactly one
    p = EvolutionProblem.laplacian(32, neumann())
    for t in (0.05, 0.1, 0.2):
        assert np.linalg.norm(step_matrix(p, SchemeKind.S1, t), 2) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("scheme, order", [("s1", 1), ("euler", 1), ("s2", 2), ("cn", 2)])
def test_global_orders(scheme, order):
    p = EvolutionProblem.laplacian(16)
    g = unit(np.random.default_rng(7), 16)
    horizon = 1.0
    ref = exact_step(p, horizon, g)
    dts = 2.0 ** -np.arange(4, 9)
    errs = [np.linalg.norm(evolve(p, scheme, dt, round(horizon / dt), g) - ref) for dt in dts]
    assert slope(dts, errs) == pytest.approx(order, abs=0.15)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), t=st.floats(1e-4, 5.0))
def test_split_steps_never_grow_dirichlet(seed, t):
    p = EvolutionProblem.laplacian(16)
    g = random_complex(np.random.default_rng(seed), 16)
    for fn in (step_s1, step_s2):
        assert np.linalg.norm(fn(p, t, g)) <= np.linalg.norm(g) * (1 + 1e-12)


def test_small_t_monotone_under_dissipation():
    # Re(A g, g) < 0 for the Dirichlet Laplacian, so norms decrease for small t
    rng = np.random.default_rng(8)
    p = EvolutionProblem.laplacian(16)
    for _ in range(10):
        g = random_complex(rng, 16)
        assert np.real(np.vdot(g, p.apply(g))) < 0
        t = 1e-3
        while t > 1e-9:
            ok = all(np.linalg.norm(fn(p, t, g)) <= np.linalg.norm(g) for fn in (step_s1, step_s2))
            if ok:
                break
            t /= 2
        assert ok
