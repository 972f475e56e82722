import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subplanck.states import (
    displace,
    inner_product,
    make_circular_state,
    rotate,
    vacuum,
)
from subplanck.wigner import (
    PhaseSpaceGrid,
    UnderresolvedGridWarning,
    auto_grid,
    cross_wigner,
    phase_space_overlap,
    quadrature_mass,
    wigner_field,
)

from oracles import parity_wigner_expm, parity_wigner_fock


def _zero_crossings(xs, ys):
    signs = np.sign(ys)
    idx = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    # linear interpolation of each crossing
    return xs[idx] - ys[idx] * (xs[idx + 1] - xs[idx]) / (ys[idx + 1] - ys[idx])


class TestCrossWigner:
    def test_coherent_peak(self):
        a = 1.2 - 0.7j
        assert cross_wigner(a, a, a) == pytest.approx(2.0, abs=1e-12)

    def test_diagonal_gaussian(self):
        a = 0.5 + 0.5j
        assert cross_wigner(a, a, a + 1.0) == pytest.approx(2 * np.exp(-2), abs=1e-12)

    def test_parity_oracle_agreement(self):
        rng = np.random.default_rng(31337)
        for _ in range(25):
            ak, al = (rng.uniform(-4, 4, 2) @ np.array([1, 1j]) for _ in range(2))
            point = rng.uniform(-5, 5) + 1j * rng.uniform(-5, 5)
            assert abs(cross_wigner(ak, al, point) - parity_wigner_fock(ak, al, point)) < 1e-8

    def test_expm_oracle_pins_convention(self):
        # fully independent path: D(p) as a matrix exponential
        cases = [(1.0, -1.0, 0.3 + 0.2j), (1.5j, 0.5, -0.4j), (0.8 + 0.6j, -0.2j, 0.1)]
        for ak, al, p in cases:
            assert abs(cross_wigner(ak, al, p) - parity_wigner_expm(ak, al, p, dim=48)) < 1e-8

    def test_interference_zero_spacing(self):
        # cross term of a +-4i pair oscillates as cos(16 x) on the real axis
        xs = np.linspace(-0.8, 0.8, 4001)
        vals = np.real(cross_wigner(4j, -4j, xs))
        crossings = _zero_crossings(xs, vals)
        spacing = np.diff(crossings)
        assert np.allclose(spacing, np.pi / 16, rtol=1e-6)


class TestGrid:
    def test_validation(self):
        with pytest.raises(ValueError):
            PhaseSpaceGrid(0, 1, 0, 1, 1, 8)
        with pytest.raises(ValueError):
            PhaseSpaceGrid(2, 1, 0, 1, 8, 8)

    def test_fringe_resolution_flag(self):
        g = PhaseSpaceGrid(-8, 8, -8, 8, 65, 65, alpha_max=4.0)
        assert g.fringe_resolved is False
        g2 = PhaseSpaceGrid(-8, 8, -8, 8, 513, 513, alpha_max=4.0)
        assert g2.fringe_resolved is True
        assert PhaseSpaceGrid(-1, 1, -1, 1, 4, 4).fringe_resolved is None

    def test_auto_grid_covers_and_resolves(self):
        cat = make_circular_state(4j, 2, [0.0, 0.0])
        g = auto_grid(cat)
        assert g.re_min <= -4 and g.re_max >= 4
        assert g.im_min <= -8 and g.im_max >= 8
        assert g.fringe_resolved
        assert g.nx % 2 == 1 and g.ny % 2 == 1


class TestWignerField:
    def test_vacuum_peak_and_mass(self):
        g = auto_grid(vacuum())
        f = wigner_field(vacuum(), g)
        assert f.values.max() == pytest.approx(2.0, abs=1e-9)
        assert quadrature_mass(f) == pytest.approx(1.0, abs=1e-6)
        assert not f.underresolved

    def test_cat_central_fringe_period(self):
        cat = make_circular_state(4j, 2, [0.0, 0.0])
        grid = auto_grid(cat)
        field = wigner_field(cat, grid)
        xs = np.linspace(-0.7, 0.7, 2001)
        mid = np.array([sum(
            (cat.weights[k] * np.conj(cat.weights[l]) * cross_wigner(cat.amplitudes[k], cat.amplitudes[l], x)).real
            for k in range(2) for l in range(2)) for x in xs])
        crossings = _zero_crossings(xs, mid)
        assert np.allclose(np.diff(crossings), np.pi / 16, rtol=1e-4)
        # the sampled field shows the same extremes: period pi/8 cosine
        iy0 = np.argmin(np.abs(grid.im_points))
        central = field.values[:, iy0]
        assert central.max() > 1.5  # fringes as tall as the lobes

    def test_compass_checkerboard_cell(self):
        # along the axes the central pattern is ~(1 + cos) and only touches
        # zero; the sign-alternating checkerboard runs along the diagonals
        comp = make_circular_state(4j, 4, np.zeros(4))
        ts = np.linspace(-0.6, 0.6, 3001)

        def section(direction):
            pts = ts * direction
            return np.array([sum(
                (comp.weights[k] * np.conj(comp.weights[l]) * cross_wigner(comp.amplitudes[k], comp.amplitudes[l], p)).real
                for k in range(4) for l in range(4)) for p in pts])

        d1 = np.diff(_zero_crossings(ts, section(np.exp(1j * np.pi / 4)))).mean()
        d2 = np.diff(_zero_crossings(ts, section(np.exp(3j * np.pi / 4)))).mean()
        cell = d1 * d2
        # sub-unit cell, of order 1/|alpha|^2 (hbar = 1)
        assert cell == pytest.approx((np.pi / (8 * np.sqrt(2))) ** 2, rel=0.05)
        assert 0.3 / 16 < cell < 2.0 / 16

    def test_underresolved_marker(self):
        cat = make_circular_state(4j, 2, [0.0, 0.0])
        coarse = PhaseSpaceGrid(-8, 8, -10, 10, 33, 33, alpha_max=4.0)
        with pytest.warns(UnderresolvedGridWarning):
            f = wigner_field(cat, coarse)
        assert f.underresolved

    def test_values_bounded(self):
        comp = make_circular_state(3j, 4, np.zeros(4))
        f = wigner_field(comp, auto_grid(comp))
        assert np.all(np.abs(f.values) <= 2.0 + 1e-9)


class TestOverlapQuadrature:
    def test_vacuum_purity(self):
        f = wigner_field(vacuum(), auto_grid(vacuum()))
        assert phase_space_overlap(f, f) == pytest.approx(1.0, abs=1e-6)

    def test_grid_mismatch_rejected(self):
        f1 = wigner_field(vacuum(), PhaseSpaceGrid(-3, 3, -3, 3, 33, 33))
        f2 = wigner_field(vacuum(), PhaseSpaceGrid(-3, 3, -3, 3, 35, 35))
        with pytest.raises(ValueError):
            phase_space_overlap(f1, f2)

    def test_cat_orthogonality_matches_exact(self):
        cat = make_circular_state(4j, 2, [0.0, 0.0])
        shifted = displace(cat, (np.pi / 16) * 1j * 4j / 4)
        g = auto_grid(cat, shifted)
        quad = phase_space_overlap(wigner_field(cat, g), wigner_field(shifted, g))
        exact = abs(inner_product(cat, shifted)) ** 2
        assert quad == pytest.approx(exact, abs=1e-6)
        assert quad < 1e-6

    def test_compass_displaced_quasi_orthogonal(self):
        comp = make_circular_state(4j, 4, np.zeros(4))
        beta = np.exp(1j * np.pi / 4) * np.pi / (2 * np.sqrt(2) * 4)
        shifted = displace(comp, beta)
        g = auto_grid(comp, shifted)
        quad = phase_space_overlap(wigner_field(comp, g), wigner_field(shifted, g))
        assert abs(quad) < 1e-6

    def test_purity_of_random_cat(self):
        state = make_circular_state(2.5 * np.exp(0.3j), 3, [0.1, -0.4, 1.0])
        f = wigner_field(state, auto_grid(state))
        assert phase_space_overlap(f, f) == pytest.approx(1.0, abs=1e-5)

    @given(
        st.sampled_from([1, 2, 3, 4]),
        st.floats(min_value=1.0, max_value=3.0),
        st.floats(min_value=-np.pi, max_value=np.pi),
        st.floats(min_value=0.0, max_value=0.25),
    )
    @settings(max_examples=10, deadline=None)
    def test_quadrature_matches_exact_overlap(self, m, radius, phase, shift):
        state = make_circular_state(radius * np.exp(1j * phase), m, np.zeros(m))
        other = rotate(displace(state, shift * 1j * np.exp(1j * phase)), 0.02)
        g = auto_grid(state, other)
        f1, f2 = wigner_field(state, g), wigner_field(other, g)
        quad, err = phase_space_overlap(f1, f2, with_error=True)
        exact = abs(inner_product(state, other)) ** 2
        assert abs(quad - exact) < max(1e-6, 10 * err)
        assert abs(quad - exact) < 1e-6

    def test_fringe_frequency_scales_linearly(self):
        radii = [2.0, 4.0, 6.0]
        freqs = []
        for r in radii:
            cat = make_circular_state(1j * r, 2, [0.0, 0.0])
            xs = np.linspace(-0.5, 0.5, 6001)
            vals = np.array([sum(
                (cat.weights[k] * np.conj(cat.weights[l]) * cross_wigner(cat.amplitudes[k], cat.amplitudes[l], x)).real
                for k in range(2) for l in range(2)) for x in xs])
            spacing = np.diff(_zero_crossings(xs, vals)).mean()
            freqs.append(np.pi / spacing)
        slope = np.polyfit(radii, freqs, 1)[0]
        assert slope == pytest.approx(4.0, rel=0.1)
