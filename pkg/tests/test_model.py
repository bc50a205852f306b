# tests/test_model.py
from __future__ import annotations

import numpy as np
import pytest

from cosparse_abs import model
from cosparse_abs.errors import ContractViolation, GenerationError
from cosparse_abs.model import (
    AnalysisOperator,
    Cosupport,
    RngSeed,
    derive_dimensions,
    generate_cosparse_signal,
    generate_measurement_matrix,
    generate_tight_frame,
    make_instance,
    round_half_up,
)


def test_seed_streams_are_reproducible_and_independent():
    a = RngSeed(5).child(2, 0, 1).generator().standard_normal(4)
    b = RngSeed(5).child(2, 0, 1).generator().standard_normal(4)
    c = RngSeed(5).child(2, 1, 0).generator().standard_normal(4)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_seed_rejects_out_of_range_values():
    with pytest.raises(ContractViolation):
        RngSeed(-1)
    with pytest.raises(ContractViolation):
        RngSeed(2 ** 64)
    with pytest.raises(ContractViolation):
        RngSeed(1, (0, -3))


def test_round_half_up():
    assert [round_half_up(v) for v in (0.5, 1.5, 2.5, 2.49)] == [1, 2, 3, 2]


@pytest.mark.parametrize("dim,delta,rho,expected", [
    (200, 0.5, 0.5, (100, 150)),
    (200, 0.05, 0.05, (10, 199)),
    (50, 0.9, 0.1, (45, 45)),
    (50, 0.1, 0.9, (5, 45)),
    (10, 0.01, 0.5, (1, 9)),
])
def test_derive_dimensions(dim, delta, rho, expected):
    assert derive_dimensions(dim, delta, rho) == expected


@pytest.mark.parametrize("delta,rho", [(0.0, 0.5), (0.5, 0.0), (1.2, 0.5), (0.5, 1.5)])
def test_derive_dimensions_rejects_out_of_range(delta, rho):
    with pytest.raises(ContractViolation):
        derive_dimensions(200, delta, rho)


def test_operator_requires_full_column_rank(rng):
    with pytest.raises(ContractViolation):
        AnalysisOperator.from_omega(rng.standard_normal((3, 5)))
    low = rng.standard_normal((8, 2)) @ rng.standard_normal((2, 4))
    with pytest.raises(ContractViolation):
        AnalysisOperator.from_omega(low)


def test_tight_frame_is_deterministic():
    a = generate_tight_frame(12, 8, RngSeed(3))
    b = generate_tight_frame(12, 8, RngSeed(3))
    np.testing.assert_array_equal(a.omega, b.omega)


def test_projector_block_annihilates_range_of_omega(small_op, rng):
    x = rng.standard_normal(small_op.dim)
    proj = small_op.subspace_block("projector")
    assert proj.shape == (small_op.n_rows, small_op.n_rows)
    np.testing.assert_allclose(proj @ (small_op.omega @ x), 0.0, atol=1e-10)
    with pytest.raises(ContractViolation):
        small_op.subspace_block("nope")


def test_cosupport_validation():
    assert Cosupport.from_indices([4, 1, 2], 5).indices == (1, 2, 4)
    with pytest.raises(ContractViolation):
        Cosupport.from_indices([1, 1], 5)
    with pytest.raises(ContractViolation):
        Cosupport.from_indices([5], 5)


@pytest.mark.parametrize("l", [0, 5, 19])
def test_cosparse_signal_properties(small_op, l):
    x, cosupport = generate_cosparse_signal(small_op, l, RngSeed(11))
    assert cosupport.l == l
    assert abs(np.linalg.norm(x) - 1.0) < 1e-12
    analysed = np.abs(small_op.omega @ x)
    if l:
        assert analysed[cosupport.as_array()].max() <= 1e-8
    assert int(np.count_nonzero(analysed > 1e-8)) == small_op.n_rows - l


def test_cosparse_signal_with_full_cosupport_is_a_generation_error(small_op, monkeypatch):
    monkeypatch.setattr(model, "MAX_REDRAWS", 3)
    with pytest.raises(GenerationError):
        generate_cosparse_signal(small_op, small_op.dim, RngSeed(0))


def test_measurement_matrix_has_unit_columns():
    m_mat = generate_measurement_matrix(6, 20, RngSeed(2))
    assert m_mat.shape == (6, 20)
    np.testing.assert_allclose(np.linalg.norm(m_mat, axis=0), 1.0, atol=1e-12)
    with pytest.raises(ContractViolation):
        generate_measurement_matrix(21, 20, RngSeed(2))


def test_make_instance_is_consistent_and_reproducible(small_op):
    inst = make_instance(small_op, 0.5, 0.4, RngSeed(9))
    assert (inst.m, inst.l) == derive_dimensions(small_op.dim, 0.5, 0.4) == (10, 16)
    np.testing.assert_allclose(inst.y, inst.m_mat @ inst.x, atol=1e-14)
    again = make_instance(small_op, 0.5, 0.4, RngSeed(9))
    np.testing.assert_array_equal(inst.x, again.x)
    np.testing.assert_array_equal(inst.m_mat, again.m_mat)
    assert inst.cosupport == again.cosupport
