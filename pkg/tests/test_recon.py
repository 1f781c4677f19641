import numpy as np
import pytest

import prolate as P
from prolate.errors import DataCoverageError, EmptyCutoffError, ParameterError
from prolate.forward import DataGrid, add_noise
from prolate.recon import (beta_of_alpha, choose_alpha_partial, picard_coefficients,
                           read_result, reconstruct_full, reconstruct_partial, write_result)


def make_grid(basis, values, flags=None, meta=None):
    n = len(basis.quad)
    return DataGrid(nodes=basis.quad.nodes, weights=basis.quad.weights, values=values,
                    flags=np.zeros(n, dtype=np.uint8) if flags is None else flags,
                    meta=meta or {})


def eigen_data(basis, coeffs_by_index):
    """Data whose Picard coefficients are exactly the given dictionary."""
    psi_hat = basis.node_values / basis.mode_norms[:, None]
    mu = basis.eigenvalues if isinstance(basis, P.ScaledDiskBasis) else basis.mu
    vals = np.zeros(len(basis.quad), dtype=complex)
    for i, c in coeffs_by_index.items():
        vals += c * mu[i] * psi_hat[i]
    return make_grid(basis, vals)


def discrete_forward(basis, q_nodes):
    """Apply the quadrature Born operator on the basis nodes."""
    quad = basis.quad
    kappa = basis.kernel_scale
    kernel = np.exp(1j * kappa * (quad.nodes @ quad.nodes.T))
    return kernel @ (quad.weights * q_nodes)


class TestPicardCoefficients:
    def test_single_mode(self, scaled_c6):
        data = eigen_data(scaled_c6, {5: 1.0})
        coeffs = picard_coefficients(data, scaled_c6)
        assert abs(coeffs[5] - 1.0) < 1e-8
        others = np.delete(coeffs, 5)
        assert np.abs(others).max() < 1e-8

    def test_zero_data(self, scaled_c6):
        data = make_grid(scaled_c6, np.zeros(len(scaled_c6.quad), dtype=complex))
        assert np.abs(picard_coefficients(data, scaled_c6)).max() == 0.0

    def test_orthogonal_component_invariance(self, scaled_c6):
        base = eigen_data(scaled_c6, {2: 1.3 + 0.4j})
        extra = eigen_data(scaled_c6, {7: -2.0, 9: 0.5j})
        combined = make_grid(scaled_c6, base.values + extra.values)
        c1 = picard_coefficients(base, scaled_c6)[2]
        c2 = picard_coefficients(combined, scaled_c6)[2]
        assert abs(c1 - c2) < 1e-8 * abs(c1)

    def test_linearity(self, scaled_c6):
        rng = np.random.default_rng(0)
        u = rng.standard_normal(len(scaled_c6.quad)) + 1j * rng.standard_normal(len(scaled_c6.quad))
        v = rng.standard_normal(len(scaled_c6.quad))
        ca = picard_coefficients(make_grid(scaled_c6, u), scaled_c6)
        cb = picard_coefficients(make_grid(scaled_c6, v + 0j), scaled_c6)
        cab = picard_coefficients(make_grid(scaled_c6, u + 2.0 * v), scaled_c6)
        assert np.abs(cab - (ca + 2.0 * cb)).max() < 1e-12 * np.abs(cab).max()

    def test_node_mismatch_rejected(self, scaled_c6):
        data = make_grid(scaled_c6, np.zeros(len(scaled_c6.quad), dtype=complex))
        shifted = DataGrid(nodes=data.nodes + 1e-9, weights=data.weights,
                           values=data.values, flags=data.flags)
        with pytest.raises(ParameterError):
            picard_coefficients(shifted, scaled_c6)

    def test_refuses_poor_coverage(self, scaled_c6):
        n = len(scaled_c6.quad)
        flags = np.zeros(n, dtype=np.uint8)
        order = np.argsort(-scaled_c6.quad.weights)
        cum = np.cumsum(scaled_c6.quad.weights[order])
        flags[order[: np.searchsorted(cum, 0.2 * cum[-1]) + 1]] = 1
        data = make_grid(scaled_c6, np.zeros(n, dtype=complex), flags=flags)
        with pytest.raises(DataCoverageError):
            picard_coefficients(data, scaled_c6)


class TestBetaOfAlpha:
    def test_singleton_cutoff(self, scaled_c6):
        chi0 = scaled_c6.modes[0].chi
        alpha = 1.0 / (chi0 + 1e-6)
        beta = beta_of_alpha(scaled_c6, alpha)
        expected = scaled_c6.radius**2 * abs(scaled_c6.modes[0].alpha)
        assert beta == pytest.approx(expected, rel=1e-14)

    def test_empty_cutoff_raises(self, scaled_c6):
        with pytest.raises(EmptyCutoffError):
            beta_of_alpha(scaled_c6, 1.0 / scaled_c6.modes[0].chi)

    def test_nonincreasing_as_alpha_decreases(self, scaled_c6):
        chis = np.array([mo.chi for mo in scaled_c6.modes])
        alphas = np.geomspace(0.99 / chis.min(), 1.01 / chis.max(), 20)
        betas = [beta_of_alpha(scaled_c6, a) for a in alphas]
        # alphas descend, so the cutoff set grows and beta cannot increase
        assert all(b2 <= b1 + 1e-15 for b1, b2 in zip(betas, betas[1:]))


class TestReconstructFull:
    def test_exact_recovery_of_band_limited(self, scaled_c6):
        rng = np.random.default_rng(4)
        idx = rng.choice(12, 6, replace=False)
        coeffs = {int(i): complex(v) for i, v in zip(idx, rng.standard_normal(6))}
        data = eigen_data(scaled_c6, coeffs)
        chi_max = scaled_c6.modes[max(coeffs)].chi
        rec = reconstruct_full(data, scaled_c6, alpha=0.99 / chi_max)
        psi_hat = scaled_c6.node_values / scaled_c6.mode_norms[:, None]
        want = np.zeros(len(scaled_c6.quad), dtype=complex)
        for i, cf in coeffs.items():
            want += cf * psi_hat[i]
        w = scaled_c6.quad.weights
        err = np.sqrt(np.sum(w * np.abs(rec.node_field - want) ** 2))
        assert err < 1e-8 * np.sqrt(np.sum(w * np.abs(want) ** 2))

    def test_fewer_modes_for_larger_alpha(self, scaled_c6):
        data = eigen_data(scaled_c6, {0: 1.0})
        chis = sorted(mo.chi for mo in scaled_c6.modes)
        small = reconstruct_full(data, scaled_c6, alpha=0.99 / chis[-1])
        large = reconstruct_full(data, scaled_c6, alpha=1.01 / chis[2])
        assert large.diagnostics["mode_count"] < small.diagnostics["mode_count"]
        assert large.beta_alpha >= small.beta_alpha

    def test_noise_amplification_bound(self, scaled_c6):
        n = len(scaled_c6.quad)
        rng = np.random.default_rng(12)
        raw = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        w = scaled_c6.quad.weights
        delta = 1e-2
        raw *= delta / np.sqrt(np.sum(w * np.abs(raw) ** 2))
        data = make_grid(scaled_c6, raw)
        for alpha in (0.02, 0.005, 0.002):
            rec = reconstruct_full(data, scaled_c6, alpha=alpha)
            norm = np.sqrt(np.sum(w * np.abs(rec.node_field) ** 2))
            assert norm <= delta / rec.beta_alpha * (1.0 + 1e-12)

    def test_error_bound_small_sweep(self, scaled_c6, wnorm):
        rng = np.random.default_rng(9)
        coeffs = {int(i): complex(v) for i, v in zip(range(8), rng.standard_normal(8))}
        clean = eigen_data(scaled_c6, coeffs)
        psi_hat = scaled_c6.node_values / scaled_c6.mode_norms[:, None]
        q_nodes = np.zeros(len(scaled_c6.quad), dtype=complex)
        for i, cf in coeffs.items():
            q_nodes += cf * psi_hat[i]
        w = scaled_c6.quad.weights
        u_norm = clean.weighted_norm()
        delta = 1e-2
        chis = np.array([mo.chi for mo in scaled_c6.modes])
        for alpha in np.geomspace(0.9 / chis.min(), 1.2 / chis.max(), 8):
            noisy = add_noise(clean, delta / u_norm, 5)
            rec = reconstruct_full(noisy, scaled_c6, alpha=float(alpha))
            proj = P.project_pi_alpha(q_nodes, scaled_c6, float(alpha))
            bound = delta / rec.beta_alpha + wnorm(w, q_nodes - proj)
            assert wnorm(w, rec.node_field - q_nodes) <= bound * (1.0 + 1e-10)

    def test_monotone_convergence_with_mode_count(self, scaled_c6, wnorm):
        # noiseless data: deeper cutoffs only improve the best approximation
        rng = np.random.default_rng(2)
        q_nodes = np.exp(-np.hypot(*scaled_c6.quad.nodes.T) ** 2)
        data = make_grid(scaled_c6, discrete_forward(scaled_c6, q_nodes))
        w = scaled_c6.quad.weights
        chis = np.array([mo.chi for mo in scaled_c6.modes])
        errs = []
        for alpha in (1.0 / 20.0, 1.0 / 50.0, 1.0 / 90.0, 0.99 / chis.max()):
            rec = reconstruct_full(data, scaled_c6, alpha=float(alpha))
            errs.append(wnorm(w, rec.node_field - q_nodes))
        assert all(b <= a * (1.0 + 1e-9) for a, b in zip(errs, errs[1:]))

    def test_realify_diagnostic(self, scaled_c6):
        data = eigen_data(scaled_c6, {1: 1.0 + 0.5j})
        rec = reconstruct_full(data, scaled_c6, alpha=1.0 / 40.0, realify=True)
        assert not np.iscomplexobj(rec.node_field)
        assert rec.diagnostics["dropped_imag_norm"] > 0.0

    def test_result_file_round_trip(self, scaled_c6, tmp_path):
        data = eigen_data(scaled_c6, {0: 2.0})
        rec = reconstruct_full(data, scaled_c6, alpha=1.0 / 30.0)
        path = tmp_path / "rec.json"
        write_result(path, rec)
        back = read_result(path)
        assert back["alpha"] == rec.alpha
        assert back["beta_alpha"] == rec.beta_alpha
        assert len(back["modes"]) == rec.diagnostics["mode_count"]
        ids = [m["id"] for m in back["modes"]]
        assert [0, 0, 1] in ids


class TestReconstructPartial:
    def test_single_mode_recovery(self, symset_disk_c5):
        data = eigen_data(symset_disk_c5, {3: 2.5})
        mags = np.abs(symset_disk_c5.mu)
        rec = reconstruct_partial(data, symset_disk_c5, alpha=0.5 * mags[3])
        assert 3 in rec.cutoff_set
        got = rec.coefficients[rec.cutoff_set.index(3)]
        assert abs(got - 2.5) < 1e-8
        others = [c for i, c in zip(rec.cutoff_set, rec.coefficients) if i != 3]
        assert np.abs(others).max() < 1e-8

    def test_empty_cutoff(self, symset_disk_c5):
        data = eigen_data(symset_disk_c5, {0: 1.0})
        with pytest.raises(EmptyCutoffError):
            reconstruct_partial(data, symset_disk_c5, alpha=2.0 * abs(symset_disk_c5.mu[0]))

    def test_agrees_with_full_reconstruction_on_disk(self, scaled_c6, wnorm):
        # the same band-limited contrast, reconstructed through the scaled disk
        # eigensystem and through an independent Nystrom system on the same disk
        geo = P.Geometry.disk(radius=1.0, h=scaled_c6.radius)
        quad = P.build_quadrature(geo, 200, method="polar")
        sym = P.compute_symset_basis(scaled_c6.base.c, geo, quad, 30)
        assert sym.kernel_scale == pytest.approx(scaled_c6.kernel_scale, rel=1e-14)

        rng = np.random.default_rng(11)
        idx = [0, 1, 3, 4, 6]
        amps = rng.standard_normal(len(idx))
        psi_hat = scaled_c6.node_values / scaled_c6.mode_norms[:, None]

        def q_field(pts):
            out = np.zeros(len(np.atleast_2d(pts)))
            for a, i in zip(amps, idx):
                out += a / scaled_c6.mode_norms[i] * P.eval_psi_scaled(
                    scaled_c6, scaled_c6.modes[i], pts)
            return out

        data_full = make_grid(scaled_c6, discrete_forward(scaled_c6, q_field(scaled_c6.quad.nodes)))
        data_part = DataGrid(nodes=sym.quad.nodes, weights=sym.quad.weights,
                             values=discrete_forward(sym, q_field(sym.quad.nodes)),
                             flags=np.zeros(len(sym.quad), dtype=np.uint8))
        chi_cut = scaled_c6.modes[max(idx)].chi
        rec_full = reconstruct_full(data_full, scaled_c6, alpha=0.9 / chi_cut)
        mu_cut = np.abs(sym.mu[len(idx) + 10])
        rec_part = reconstruct_partial(data_part, sym, alpha=float(mu_cut))
        probe = scaled_c6.quad
        a = rec_full.node_field
        b = rec_part.field(probe.nodes)
        qn = q_field(probe.nodes)
        scale = wnorm(probe.weights, qn)
        assert wnorm(probe.weights, a - qn) < 1e-4 * scale
        assert wnorm(probe.weights, b - qn) < 1e-4 * scale
        assert wnorm(probe.weights, a - b) < 1e-4 * scale

    def test_source_condition_stability_bound(self, symset_disk_c5, wnorm):
        basis = symset_disk_c5
        rng = np.random.default_rng(21)
        n_use = 20
        a = rng.standard_normal(n_use)
        E = float(np.linalg.norm(a))
        mags = np.abs(basis.mu[:n_use])
        psi_hat = basis.node_values[:n_use] / basis.mode_norms[:n_use, None]
        q_nodes = (a * mags) @ psi_hat  # in Range((K*K)^(1/2)) with source norm E
        data = make_grid(basis, discrete_forward(basis, q_nodes))
        w = basis.quad.weights
        u_norm = data.weighted_norm()
        sigma, c0 = 1.0, 1.0
        for ratio in (1e-2, 1e-3):
            delta = ratio * E
            noisy = add_noise(data, delta / u_norm, 31)
            alpha = choose_alpha_partial(delta, E, sigma, c0)
            rec = reconstruct_partial(noisy, basis, alpha=alpha)
            err = wnorm(w, rec.node_field - q_nodes)
            bound = delta**0.5 * E**0.5 * (1.0 / c0 + c0)
            assert err <= bound

    def test_choose_alpha(self):
        assert choose_alpha_partial(0.5, 0.5, 2.0, 3.0) == pytest.approx(3.0)
        assert choose_alpha_partial(0.04, 1.0, 1.0, 1.0) == pytest.approx(0.2)
        a1 = choose_alpha_partial(1e-4, 1.0, 1.0, 1.0)
        a2 = choose_alpha_partial(1e-3, 1.0, 1.0, 1.0)
        assert a2 > a1
        with pytest.raises(ParameterError):
            choose_alpha_partial(0.0, 1.0, 1.0, 1.0)
