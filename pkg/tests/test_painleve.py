import math

import numpy as np
import pytest

import watermelon as wm
from watermelon.errors import ConvergenceError, CoverageError, TailClosureError


def test_airy_gamma_representation():
    # Ai(0) = 3^{-2/3}/Gamma(2/3), Ai'(0) = -3^{-1/3}/Gamma(1/3)
    ai, aip = wm.airy_ai(0.0)
    assert abs(ai - 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)) < 1e-14
    assert abs(aip + 3.0 ** (-1.0 / 3.0) / math.gamma(1.0 / 3.0)) < 1e-14


def test_airy_monotone_decay_positive_axis():
    a0 = wm.airy_ai(0.0)[0]
    a5 = wm.airy_ai(5.0)[0]
    a10 = wm.airy_ai(10.0)[0]
    assert a10 < a5 < a0
    assert a10 > 0.0


def test_airy_asymptotic_form():
    # One-term asymptotic at s=8: the deviation is the classical first
    # correction u1/zeta = 5/(72 zeta), about 4.6e-3 here.
    s = 8.0
    zeta = (2.0 / 3.0) * s**1.5
    lead = math.exp(-zeta) / (2.0 * math.sqrt(math.pi) * s**0.25)
    dev = abs(wm.airy_ai(s)[0] / lead - 1.0)
    assert dev < 6e-3
    assert abs(dev / (5.0 / (72.0 * zeta)) - 1.0) < 0.2


def test_airy_range_gate():
    with pytest.raises(CoverageError):
        wm.airy_ai(31.0)


def test_solver_preconditions():
    with pytest.raises(ValueError):
        wm.solve_hastings_mcleod(s_min=1.0)
    with pytest.raises(ValueError):
        wm.solve_hastings_mcleod(s_max=6.0)
    with pytest.raises(ValueError):
        wm.solve_hastings_mcleod(mesh=256)
    with pytest.raises(ValueError):
        wm.solve_hastings_mcleod(tol=1e-13)


def test_residual_and_positivity(grid):
    assert grid.residual_norm <= 1e-10
    assert np.all(grid.q > 0.0)


def test_right_tail_tracks_airy(grid):
    s = grid.s_values
    sel = s >= 7.0
    ai = np.array([wm.airy_ai(v)[0] for v in s[sel]])
    assert np.max(np.abs(grid.q[sel] / ai - 1.0)) <= 1e-4
    assert abs(grid.q_at(8.0) / wm.airy_ai(8.0)[0] - 1.0) <= 1e-5


def test_left_asymptote(grid):
    s = grid.s_values
    r8 = grid.q[np.argmin(np.abs(s + 8.0))] ** 2 / 4.0
    r10 = grid.q[np.argmin(np.abs(s + 10.0))] ** 2 / 5.0
    assert abs(r8 - 1.0) <= 2e-2
    assert abs(r10 - 1.0) < abs(r8 - 1.0)


def test_collocation_matches_shooting(grid, shooting_value):
    i0 = np.argmin(np.abs(grid.s_values))
    assert abs(grid.q[i0] - shooting_value) <= 1e-7


def test_mesh_refinement_order():
    ref = wm.solve_hastings_mcleod(mesh=8192)
    errs = []
    for mesh in (1024, 2048):
        sol = wm.solve_hastings_mcleod(mesh=mesh)
        stride = 8192 // mesh
        errs.append(np.max(np.abs(sol.q - ref.q[::stride])))
    assert errs[1] <= errs[0] / 3.0


def test_tail_quantities(grid):
    assert grid.R[-1] <= 1e-12
    assert np.all(np.diff(grid.R) <= 1e-15)
    for arr in (grid.E, grid.F, grid.f1, grid.f2):
        assert np.all(arr > 0.0) and np.all(arr <= 1.0)
        assert np.all(np.diff(arr) >= -1e-15)
    assert abs(grid.E[-1] - 1.0) <= 1e-10
    assert abs(grid.F[-1] - 1.0) <= 1e-10
    assert np.array_equal(grid.f1, grid.F * grid.E)
    assert np.array_equal(grid.f2, grid.F * grid.F)


def test_derivative_relations(grid):
    # R' = -q^2, E' = q E / 2, F' = R F / 2 under central differences
    s, q = grid.s_values, grid.q
    h = s[1] - s[0]
    dR = (grid.R[2:] - grid.R[:-2]) / (2 * h)
    assert np.max(np.abs(dR + q[1:-1] ** 2)) <= 1e-5
    dE = (grid.E[2:] - grid.E[:-2]) / (2 * h)
    assert np.max(np.abs(dE - 0.5 * q[1:-1] * grid.E[1:-1])) <= 1e-5
    dF = (grid.F[2:] - grid.F[:-2]) / (2 * h)
    assert np.max(np.abs(dF - 0.5 * grid.R[1:-1] * grid.F[1:-1])) <= 1e-5


def test_accumulate_requires_converged_q(grid):
    bad = wm.solve_hastings_mcleod()
    bad.residual_norm = 1e-6
    with pytest.raises(ConvergenceError):
        wm.accumulate_tails(bad)


def test_short_grid_tail_closure_error():
    sol = wm.solve_hastings_mcleod(s_max=8.0, mesh=2048)
    with pytest.raises(TailClosureError):
        wm.accumulate_tails(sol)


def test_tracy_widom_values(grid):
    assert abs(wm.tracy_widom(grid.s_max, "F2", grid) - 1.0) <= 1e-8
    for x in np.linspace(-5.0, 3.0, 17):
        f1 = wm.tracy_widom(x, "F1", grid)
        f2 = wm.tracy_widom(x, "F2", grid)
        assert 0.0 <= f1 <= 1.0 and 0.0 <= f2 <= 1.0
        assert f1 <= math.sqrt(f2) + 1e-12
    with pytest.raises(CoverageError):
        wm.tracy_widom(grid.s_min - 1.0, "F2", grid)
    with pytest.raises(ValueError):
        wm.tracy_widom(0.0, "F3", grid)


def test_tracy_widom_monotone(grid):
    xs = np.linspace(-6.0, 4.0, 41)
    for which in ("F1", "F2"):
        vals = [wm.tracy_widom(x, which, grid) for x in xs]
        assert np.all(np.diff(vals) >= -1e-13)


def test_f2_against_fredholm_oracle(grid):
    from watermelon.oracles import fredholm_f2
    worst = max(abs(wm.tracy_widom(float(x), "F2", grid) - fredholm_f2(float(x)))
                for x in range(-4, 3))
    assert worst <= 1e-5


def test_cache_round_trip(tmp_path):
    g = wm.build_grid(mesh=1024, cache_dir=str(tmp_path))
    files = list(tmp_path.iterdir())
    assert len(files) == 1
    text = files[0].read_text()
    reloaded = wm.load_grid(str(files[0]))
    out = tmp_path / "again.csv"
    wm.save_grid(reloaded, str(out))
    assert out.read_text() == text
    assert reloaded.mesh == g.mesh and reloaded.tol == g.tol


def test_cache_never_recomputes(tmp_path, monkeypatch):
    wm.build_grid(mesh=1024, cache_dir=str(tmp_path))

    def boom(*a, **k):
        raise AssertionError("solver re-ran despite matching cache")

    monkeypatch.setattr(wm.painleve, "solve_hastings_mcleod", boom)
    g = wm.build_grid(mesh=1024, cache_dir=str(tmp_path))
    assert g.f2.size > 0


def test_cache_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("WATERMELON_CACHE", str(tmp_path / "envcache"))
    wm.build_grid(mesh=1024)
    assert (tmp_path / "envcache").exists()
