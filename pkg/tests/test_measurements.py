import numpy as np
import pytest

from qmle.measurements import (POM, SICError, hesse_sic_fiducial, pauli6_register, product_pom,
                               qubit_sic_fiducial, setting_group_size, sic_from_fiducial, sic_overlap_residual,
                               tetrahedron_register, validate_pom, weyl_heisenberg_orbit)


@pytest.mark.parametrize("reg", [pauli6_register(), tetrahedron_register()])
def test_register_poms_are_valid(reg):
    rep = validate_pom(reg)
    assert rep.ok(1e-12)
    assert rep.dim == 2


def test_pauli6_order():
    e = pauli6_register().elements
    assert np.allclose(e[0], np.diag([1, 0]) / 3)
    assert np.allclose(e[1], np.diag([0, 1]) / 3)
    assert np.allclose(e[2], np.full((2, 2), 0.5) / 3)
    assert np.allclose(e[4], np.array([[0.5, -0.5j], [0.5j, 0.5]]) / 3)


def test_setting_groups():
    assert setting_group_size(pauli6_register()) == 2
    assert setting_group_size(tetrahedron_register()) is None


def test_qubit_sic_is_tetrahedral():
    sic = sic_from_fiducial(qubit_sic_fiducial())
    assert validate_pom(sic).ok(1e-12)
    e = sic.elements
    for j in range(4):
        for k in range(j + 1, 4):
            assert np.isclose(np.trace(e[j] @ e[k]).real, 1 / 12)


def test_hesse_sic():
    fid = hesse_sic_fiducial()
    assert sic_overlap_residual(fid) <= 1e-12
    pom = sic_from_fiducial(fid)
    assert pom.num_outcomes == 9 and pom.dim == 3
    assert validate_pom(pom).ok(1e-12)


def test_bad_fiducial_rejected():
    with pytest.raises(SICError) as info:
        sic_from_fiducial(np.array([1, 0, 0], dtype=complex))
    assert info.value.residual > 0.1
    with pytest.raises(ValueError):
        sic_from_fiducial(np.array([1, 1, 0], dtype=complex))


def test_orbit_order():
    psi = np.array([1, 2, 3], dtype=complex) / np.sqrt(14)
    orbit = weyl_heisenberg_orbit(psi)
    assert np.allclose(orbit[0], psi)
    assert np.allclose(orbit[3], np.roll(psi, 1))
    assert np.allclose(orbit[1], psi * np.exp(2j * np.pi * np.arange(3) / 3))


def test_product_indexing():
    pom = product_pom(pauli6_register(), 3)
    assert (pom.dim, pom.num_outcomes) == (8, 216)
    digits = np.array([[1, 0, 5], [5, 5, 5]])
    assert pom.flatten_index(digits).tolist() == [41, 215]
    assert np.array_equal(pom.unflatten_index([41, 215]), digits)


def test_materialized_product_is_kron():
    reg = [pauli6_register(), tetrahedron_register()]
    pom = product_pom(reg)
    dense = pom.materialize(block_bytes=1024)
    e = dense.elements
    assert np.allclose(e[3 * 4 + 2], np.kron(reg[0].elements[3], reg[1].elements[2]))
    assert validate_pom(dense).ok(1e-12)


def test_invalid_pom_detected():
    e = pauli6_register().elements.copy()
    e[0] = e[0] * 1.5
    assert not validate_pom(POM.from_elements(e)).ok()
    e = tetrahedron_register().elements.copy()
    e[0] = e[0] + np.diag([0.0, -0.3])
    e[1] = e[1] + np.diag([0.0, 0.3])
    rep = validate_pom(POM.from_elements(e))
    assert rep.min_eigenvalue < 0 and not rep.ok()


def test_mixed_dimensions_rejected():
    with pytest.raises(ValueError):
        product_pom([pauli6_register(), sic_from_fiducial(hesse_sic_fiducial())])
