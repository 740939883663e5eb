"""Digital canceller: term sets, basis matrix, LS fit, serialization."""

import numpy as np
import pytest

from fdsim.canceller import (STRENGTH_ROWS, BasisMatrix, TermSet,
                             build_basis_matrix, cancel, fit_canceller,
                             full_term_order, load_canceller_model,
                             ls_estimate, make_term_set, regenerate_si,
                             restrict_term_set, save_canceller_model)
from fdsim.errors import (ConfigurationError, DomainError,
                          IllConditionedError)
from fdsim.signals import ComplexSignal


def _noise(n, seed):
    rng = np.random.default_rng(seed)
    return ComplexSignal((rng.standard_normal(n) + 1j * rng.standard_normal(n))
                         / np.sqrt(2.0), 64e6)


class TestTermSets:
    def test_catalog_shapes(self):
        assert make_term_set("linear").pairs == ((1, 1),)
        assert make_term_set("widely_linear").pairs == ((1, 1), (1, 0))
        assert make_term_set("pa_only", order=5).pairs == ((1, 1), (3, 2), (5, 3))
        assert len(make_term_set("joint_full", order=5)) == 2 + 4 + 6

    def test_full_term_order_canonical(self):
        # p ascending, q descending; prefix property links the families
        assert full_term_order(3) == ((1, 1), (1, 0), (3, 3), (3, 2), (3, 1), (3, 0))
        assert full_term_order(1) == make_term_set("widely_linear").pairs

    def test_topk_row_expansion(self):
        t3 = make_term_set("joint_topk", k=3)
        assert t3.pairs == ((1, 1), (1, 0), (3, 2), (3, 3), (3, 1))
        t1 = make_term_set("joint_topk", k=1)
        assert set(t1.pairs) == set(make_term_set("widely_linear").pairs)

    def test_strength_rows_catalog(self):
        flat = [pq for row in STRENGTH_ROWS for pq in row]
        assert len(flat) == len(set(flat))
        assert (1, 1) not in flat  # the linear term is implicit

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            TermSet("bad", ((1, 1), (2, 1)))       # even order
        with pytest.raises(ConfigurationError):
            TermSet("bad", ((1, 1), (3, 4)))       # q > p
        with pytest.raises(ConfigurationError):
            TermSet("bad", ((1, 0),))              # missing linear term
        with pytest.raises(ConfigurationError):
            TermSet("bad", ((1, 1), (1, 1)))       # duplicate
        with pytest.raises(DomainError):
            make_term_set("joint_full", order=4)
        with pytest.raises(DomainError):
            make_term_set("joint_topk", k=99)

    def test_restrict_preserves_order(self):
        full = make_term_set("joint_full", order=5)
        diag = restrict_term_set(full, [(1, 1), (3, 2), (5, 3)], name="diag")
        assert diag.pairs == ((1, 1), (3, 2), (5, 3))


class TestBasisMatrix:
    def test_toeplitz_structure(self):
        x = _noise(64, 1)
        psi = build_basis_matrix([x], make_term_set("linear"), 3, 10, 8)
        # column (j=0, p=1, q=1, m) row n holds x(8 + n - m)
        for m in range(3):
            assert np.allclose(psi.matrix[:, m], x.samples[8 - m: 18 - m])
        assert psi.columns[1] == (0, 1, 1, 1)

    def test_conjugate_term_values(self):
        x = _noise(64, 2)
        ts = TermSet("t", ((1, 1), (3, 1)))
        psi = build_basis_matrix([x], ts, 1, 20, 4)
        expect = x.samples[4:24] * np.conj(x.samples[4:24]) ** 2
        assert np.allclose(psi.matrix[:, 1], expect)

    def test_multi_tx_block_layout(self):
        xs = [_noise(64, 3), _noise(64, 4)]
        psi = build_basis_matrix(xs, make_term_set("widely_linear"), 2, 10, 6)
        assert psi.matrix.shape == (10, 8)
        assert psi.columns[4][0] == 1  # second TX block starts at column 4

    def test_offset_guard(self):
        with pytest.raises(DomainError):
            build_basis_matrix([_noise(64, 5)], make_term_set("linear"), 8, 10, 4)


class TestLsEstimate:
    def test_recovers_known_coefficients(self):
        x = _noise(3000, 6)
        ts = make_term_set("joint_full", order=3)
        psi = build_basis_matrix([x], ts, 4, 2500, 16)
        rng = np.random.default_rng(7)
        h_true = rng.standard_normal(psi.matrix.shape[1]) * (1 + 0j)
        y = psi.matrix @ h_true
        h = ls_estimate(psi, y)
        assert np.allclose(h, h_true, atol=1e-9)

    def test_multi_rhs(self):
        x = _noise(2000, 8)
        psi = build_basis_matrix([x], make_term_set("widely_linear"), 3, 1500, 8)
        rng = np.random.default_rng(9)
        h_true = rng.standard_normal((psi.matrix.shape[1], 2)) * (1 + 0j)
        h = ls_estimate(psi, psi.matrix @ h_true)
        assert np.allclose(h, h_true, atol=1e-9)

    def test_residual_orthogonality(self):
        x = _noise(3000, 10)
        psi = build_basis_matrix([x], make_term_set("joint_full", order=5), 8, 2000, 16)
        rng = np.random.default_rng(11)
        y = rng.standard_normal(2000) + 1j * rng.standard_normal(2000)
        e = y - psi.matrix @ ls_estimate(psi, y)
        gram = np.linalg.norm(psi.matrix.conj().T @ e)
        assert gram / (np.linalg.norm(psi.matrix) * np.linalg.norm(y)) < 1e-10

    def test_ill_conditioned_raises_with_estimate(self):
        a = np.ones((100, 2), dtype=complex)
        a[:, 1] = 1.0 + 1e-15
        psi = BasisMatrix(a, [(0, 1, 1, 0), (0, 1, 1, 1)], None)
        with pytest.raises(IllConditionedError) as exc:
            ls_estimate(psi, np.ones(100, dtype=complex))
        assert exc.value.cond > 1e12

    def test_ridge_bypasses_condition_gate(self):
        a = np.ones((100, 2), dtype=complex)
        a[:, 1] = 1.0 + 1e-15
        psi = BasisMatrix(a, [(0, 1, 1, 0), (0, 1, 1, 1)], None)
        h = ls_estimate(psi, np.ones(100, dtype=complex), ridge=1e-6)
        assert np.all(np.isfinite(h))

    def test_shape_errors(self):
        psi = build_basis_matrix([_noise(100, 12)], make_term_set("linear"), 2, 50, 4)
        with pytest.raises(DomainError):
            ls_estimate(psi, np.ones(49, dtype=complex))


class TestEndToEnd:
    def test_fit_regenerate_cancel_closed_loop(self):
        # y is exactly in the model class -> near-perfect cancellation
        xs = [_noise(4000, 13), _noise(4000, 14)]
        ts = make_term_set("joint_full", order=3)
        rng = np.random.default_rng(15)
        model_true = rng.standard_normal((1, 2, len(ts), 5)) \
            + 1j * rng.standard_normal((1, 2, len(ts), 5))
        from fdsim.canceller import CancellerModel
        truth = CancellerModel(ts, 5, 2, 1, model_true)
        y = regenerate_si(truth, xs)
        fitted = fit_canceller(xs, y, ts, 5, 3000, 32)
        resid = cancel(y, regenerate_si(fitted, xs))[0]
        supp = 10 * np.log10(np.mean(np.abs(y[0].samples) ** 2)
                             / np.mean(np.abs(resid.samples[32:]) ** 2))
        assert supp > 120.0

    def test_save_load_round_trip(self, tmp_path):
        xs = [_noise(2000, 16)]
        ts = make_term_set("pa_only", order=5)
        rng = np.random.default_rng(17)
        coeffs = rng.standard_normal((2, 1, 3, 4)) + 1j * rng.standard_normal((2, 1, 3, 4))
        from fdsim.canceller import CancellerModel
        model = CancellerModel(ts, 4, 1, 2, coeffs)
        path = tmp_path / "model.json"
        save_canceller_model(model, path)
        back = load_canceller_model(path)
        assert back.term_set == ts
        assert np.array_equal(back.coeffs, model.coeffs)
        a = regenerate_si(model, xs)
        b = regenerate_si(back, xs)
        for s, t in zip(a, b):
            assert np.array_equal(s.samples, t.samples)
