"""Bott-type almost-projection, its rank class, and the index identity.

Independent oracles: the defect ||e^2 - e|| is cross-checked against
numpy's SVD 2-norm; exactly commuting pairs must give an exact projection
of rank n; the measured defects of the shift/phase family are frozen with
their observed halving trend.
"""

import numpy as np
import pytest

from conftest import diag_unitary
from qrep import (AlmostProjection, DefectTooLarge, NoSpectralGap,
                  PresentationMismatch, SurfacePullback, Unitary,
                  bott_almost_projection, bott_orientation, k_invariant,
                  kappa, op_norm, perturbed_copy, push_k_class,
                  verify_index_formula, voiculescu_pair, voiculescu_qrep)

FROZEN_DEFECTS = {16: 0.123242, 32: 0.062269, 64: 0.031220, 128: 0.015621}


# -- almost-projection construction ----------------------------------------------

def test_e_is_selfadjoint_with_honest_defect():
    u, v = voiculescu_pair(24)
    ap = bott_almost_projection(u, v)
    assert ap.e.shape == (48, 48)
    assert op_norm(ap.e - ap.e.conj().T) == 0.0
    # defect recomputed with an independent norm
    assert abs(ap.defect - np.linalg.norm(ap.e @ ap.e - ap.e, 2)) < 1e-12
    assert ap.base_dim == 24


def test_e_exact_projection_for_commuting_pair():
    u = diag_unitary([0.5, 1.5, -2.4, 0.1])
    v = diag_unitary([1.0, -0.3, 2.2, -1.6])
    ap = bott_almost_projection(u, v)
    assert ap.defect < 1e-14
    eig = np.linalg.eigvalsh(ap.e)
    assert np.all((np.abs(eig) < 1e-12) | (np.abs(eig - 1) < 1e-12))
    assert abs(np.trace(ap.e).real - 4) < 1e-10


def test_e_identity_pair_is_trivial_projection():
    one = Unitary.of(np.eye(3))
    ap = bott_almost_projection(one, one)
    want = np.zeros((6, 6))
    want[:3, :3] = np.eye(3)
    assert op_norm(ap.e - want) < 1e-14


def test_defect_family_frozen_and_monotone():
    defects = {}
    for n, frozen in FROZEN_DEFECTS.items():
        u, v = voiculescu_pair(n)
        d = bott_almost_projection(u, v).defect
        assert abs(d - frozen) < 5e-6, n
        defects[n] = d
    seq = [defects[n] for n in sorted(defects)]
    assert all(a > b for a, b in zip(seq, seq[1:]))
    # roughly halves per doubling (first-order in the commutator defect)
    for a, b in zip(seq, seq[1:]):
        assert 1.8 < a / b < 2.2


# -- calibration -------------------------------------------------------------------

def test_orientation_is_plus_one_and_stable():
    assert bott_orientation() == 1
    assert bott_orientation() == 1  # cached, same answer


def test_orientation_consistency_with_winding():
    # the calibration promise: with the process orientation applied, the
    # class of the n=64 pair equals the winding of the reversed-commutator
    # determinant loop
    from qrep import winding_number_det_segment
    u, v = voiculescu_pair(64)
    loop = Unitary.of(v.m @ u.m @ v.m.conj().T @ u.m.conj().T)
    wn = winding_number_det_segment(loop)
    assert k_invariant(u, v).rounded == wn.rounded == 1


# -- rank class ---------------------------------------------------------------------

def test_k_invariant_voiculescu_and_report():
    u, v = voiculescu_pair(64)
    rep = k_invariant(u, v)
    assert rep.name == "k_invariant"
    assert rep.rounded == 1 and rep.value == 1.0 and rep.is_integer
    assert abs(rep.defect_data["e_defect"] - FROZEN_DEFECTS[64]) < 5e-6
    assert rep.defect_data["spectral_gap"] > 0.9
    assert rep.defect_data["orientation"] == 1.0
    assert abs(rep.defect_data["commutator_defect"] - 2 * np.sin(np.pi / 64)) < 1e-12


def test_k_invariant_commuting_pair_is_zero():
    u = diag_unitary([0.5, 1.5, -2.4, 0.1])
    v = diag_unitary([1.0, -0.3, 2.2, -1.6])
    assert k_invariant(u, v).rounded == 0


def test_k_requires_small_defect():
    u, v = voiculescu_pair(4)
    with pytest.raises(DefectTooLarge) as err:
        k_invariant(u, v)
    assert err.value.exit_code == 1
    assert err.value.details["defect"] > 0.125


def test_k_boundary_case_n16_just_inside():
    u, v = voiculescu_pair(16)
    rep = k_invariant(u, v)
    assert rep.rounded == 1
    assert rep.defect_data["e_defect"] < 0.125


def test_push_k_class_parameter_threading():
    # a synthetic almost-projection with an eigenvalue parked at 0.45:
    # the defect gate (loosened) passes but the band check must fire
    e = np.diag([1.0, 1.0, 0.45, 0.0])
    ap = AlmostProjection(e=e.astype(np.complex128),
                          defect=float(np.linalg.norm(e @ e - e, 2)),
                          base_dim=2)
    with pytest.raises(DefectTooLarge):
        push_k_class(ap)  # 0.2475 >= 1/8
    with pytest.raises(NoSpectralGap):
        push_k_class(ap, defect_max=0.3)
    assert push_k_class(ap, gap=0.04, defect_max=0.3) == 0


def test_k_stable_under_small_perturbations():
    u, v = voiculescu_pair(48)
    for seed in range(5):
        rng = np.random.default_rng(seed)
        u2 = perturbed_copy(u, 0.01, rng)
        v2 = perturbed_copy(v, 0.01, rng)
        assert k_invariant(u2, v2).rounded == 1, seed


def test_k_dimension_mismatch():
    from qrep import DimensionMismatch
    u, _ = voiculescu_pair(4)
    _, v = voiculescu_pair(6)
    with pytest.raises(DimensionMismatch):
        k_invariant(u, v)


# -- index identity harness -----------------------------------------------------------

def test_verify_z2_case():
    rep = verify_index_formula(voiculescu_qrep(64))
    assert rep.case == "z2-bott"
    assert rep.lhs_k == 1
    assert rep.rhs_wn.rounded == 1 and rep.rhs_kappa.rounded == 1
    assert rep.equal and rep.trace_close
    assert rep.datum_class == 1
    assert rep.orientation == 1
    assert rep.normalized_lhs == 1.0 / 64.0
    assert abs(rep.rhs_kappa_tau.value - 1.0 / 64.0) < 1e-12
    assert abs(rep.defects["relator_defect"] - 2 * np.sin(np.pi / 64)) < 1e-12
    # the datum product evaluated raw keeps the scalar obstruction
    assert abs(rep.defects["datum_product_defect"] - 2 * np.sin(np.pi / 64)) < 1e-12


def test_verify_surface_pullback_case():
    case = SurfacePullback(2, {"s1": "a", "t1": "b", "s2": "", "t2": ""})
    rep = verify_index_formula(voiculescu_qrep(64), case=case)
    assert rep.case == "surface-pullback-g2"
    assert rep.equal and rep.trace_close
    assert rep.datum_class == 1
    assert rep.lhs_k == 1


def test_verify_genus_mismatch_and_non_z2():
    qr = voiculescu_qrep(16)
    with pytest.raises(PresentationMismatch):
        verify_index_formula(qr, case=SurfacePullback(3, {"s1": "a", "t1": "b"}))
    from qrep import pullback
    with pytest.raises(PresentationMismatch):
        verify_index_formula(pullback(qr, {"s1": "a", "t1": "b"}))


def test_verify_report_json_schema():
    obj = verify_index_formula(voiculescu_qrep(32)).to_json()
    assert {"case", "lhs_k", "rhs_wn", "rhs_kappa", "normalized_lhs",
            "rhs_kappa_tau", "equal", "trace_close", "orientation",
            "datum_class", "defects", "reports"} <= set(obj)
    assert obj["orientation"] in ("+1", "-1")
    assert obj["rhs_wn"] == obj["rhs_kappa"] == obj["lhs_k"] == 1
    assert isinstance(obj["defects"], dict)
    assert set(obj["reports"]) == {"rhs_wn", "rhs_kappa", "rhs_kappa_tau"}
