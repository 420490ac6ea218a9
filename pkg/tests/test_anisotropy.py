import numpy as np
import pytest

from core.anisotropy import (
    LimitingCase,
    MaterialSpec,
    SymmetryClass,
    active_limiting_cases,
    build_coupling,
    build_cubic,
    build_isotropic,
    build_orthotropic,
    build_stiffness,
    bulk_modulus,
    check_positive_definite,
    class_parameters,
    classify_coupling,
    classify_stiffness,
    lame_lambda,
    limiting_case_predicate,
)
from core.errors import InvalidParameterError, ParameterCountError
from core.tensor_core import NotationConvention, StiffnessVoigt

TOL = 1e-9


def random_orthotropic_params(rng):
    diag = rng.uniform(5.0, 10.0, 3)
    off = rng.uniform(0.0, 2.0, 3)
    shears = rng.uniform(1.0, 3.0, 3)
    return [*diag, *off, *shears]


def test_isotropic_template_is_classified_isotropic():
    assert classify_stiffness(build_isotropic(1.0, 1.0)) is SymmetryClass.ISOTROPIC


def test_cubic_with_distinct_shear_is_not_isotropic():
    assert classify_stiffness(build_cubic(1.0, 1.0, 2.0)) is SymmetryClass.CUBIC


@pytest.mark.parametrize("conv", list(NotationConvention))
def test_random_orthotropic_round_trip(rng, conv):
    params = random_orthotropic_params(rng)
    C = build_orthotropic(params, conv)
    assert classify_stiffness(C) is SymmetryClass.ORTHOTROPIC
    extracted = class_parameters(C)
    np.testing.assert_allclose([extracted[k] for k in ("C11", "C22", "C33", "C12", "C13", "C23", "C44", "C55", "C66")],
                               params, rtol=1e-14)


def test_perturbation_breaks_every_template():
    C = build_isotropic(1.0, 1.0).entries.copy()
    delta = 10.0 * TOL * np.max(np.abs(C))
    C[0, 3] = C[3, 0] = delta
    assert classify_stiffness(StiffnessVoigt(C), TOL) is SymmetryClass.TRICLINIC


def test_class_nesting(registry):
    C = build_isotropic(0.4, 1.1)
    for cls in (SymmetryClass.ISOTROPIC, SymmetryClass.CUBIC, SymmetryClass.ORTHOTROPIC):
        assert registry.get_plugin(cls).matches(C, TOL)
    cubic = class_parameters(C, SymmetryClass.CUBIC)
    assert cubic["mu_star"] == pytest.approx(cubic["mu"])


def test_orthotropic_single_shear_entry():
    C = build_orthotropic([0, 0, 0, 0, 0, 0, 1, 0, 0])
    nonzero = np.argwhere(C.entries != 0.0)
    assert nonzero.tolist() == [[3, 3]]


def test_equal_orthotropic_values_reduce_to_isotropic():
    lam, mu = 0.5, 1.5
    params = [2 * mu + lam] * 3 + [lam] * 3 + [mu] * 3
    np.testing.assert_array_equal(build_orthotropic(params).entries, build_isotropic(lam, mu).entries)


def test_build_stiffness_by_name_and_kappa():
    C = build_stiffness("iso", {"kappa": 3.0, "mu": 1.0})
    params = class_parameters(C)
    assert params["kappa"] == pytest.approx(3.0)
    assert params["lambda"] == pytest.approx(lame_lambda(3.0, 1.0))
    spec = MaterialSpec(SymmetryClass.CUBIC, {"kappa": 4.0, "mu": 2.0, "mu_star": 1.0})
    np.testing.assert_array_equal(spec.build().entries, build_cubic(4.0, 2.0, 1.0).entries)


def test_mandel_parameters_are_convention_independent():
    C = build_isotropic(1.0, 2.0, NotationConvention.MANDEL)
    assert C.entries[3, 3] == pytest.approx(4.0)
    params = class_parameters(C)
    assert params["mu"] == pytest.approx(2.0)
    assert params["lambda"] == pytest.approx(1.0)


def test_wrong_parameter_count():
    with pytest.raises(ParameterCountError):
        build_stiffness("cubic", [1.0, 2.0])
    with pytest.raises(ParameterCountError):
        build_orthotropic([1.0] * 8)
    with pytest.raises(InvalidParameterError):
        build_stiffness("orthotropic", {"C11": 1.0})


def test_missing_template_plugin():
    with pytest.raises(InvalidParameterError):
        build_stiffness("monoclinic", [1.0] * 13)
    with pytest.raises(InvalidParameterError):
        SymmetryClass.parse("hexagonal-ish")


def test_positive_templates_are_positive_definite(rng):
    assert check_positive_definite(build_isotropic(0.5, 1.0), "strict").ok
    assert check_positive_definite(build_cubic(2.0, 1.0, 0.5), "strict").ok
    assert check_positive_definite(build_orthotropic(random_orthotropic_params(rng)), "strict").ok


def test_bulk_modulus_conversion():
    assert bulk_modulus(lame_lambda(6.0, 1.0), 1.0) == pytest.approx(6.0)


# --- 转动耦合 ---

def test_isotropic_coupling_from_couple_modulus():
    np.testing.assert_array_equal(build_coupling(SymmetryClass.ISOTROPIC, [2.0]).entries, np.eye(3))


def test_cubic_and_isotropic_couplings_coincide():
    np.testing.assert_array_equal(build_coupling("cubic", 3.0).entries, build_coupling("isotropic", 3.0).entries)


def test_coupling_templates():
    np.testing.assert_array_equal(build_coupling("tetragonal", [1.0, 2.0]).entries, np.diag([1.0, 1.0, 2.0]))
    mono = build_coupling("monoclinic", [1.0, 2.0, 3.0, 0.5]).entries
    assert mono[0, 1] == 0.0 and mono[1, 2] == 0.0 and mono[0, 2] == 0.5
    tri = build_coupling("triclinic", [1, 2, 3, 0.1, 0.2, 0.3]).entries
    assert (tri[1, 2], tri[0, 2], tri[0, 1]) == (0.1, 0.2, 0.3)


@pytest.mark.parametrize("cls, params", [
    ("isotropic", [2.0]),
    ("tetragonal", [1.0, 2.0]),
    ("orthotropic", [1.0, 2.0, 3.0]),
    ("monoclinic", [1.0, 2.0, 3.0, 0.5]),
    ("triclinic", [1.0, 2.0, 3.0, 0.1, 0.2, 0.3]),
])
def test_coupling_classification_round_trip(cls, params):
    assert classify_coupling(build_coupling(cls, params)) is SymmetryClass.parse(cls)


def test_coupling_parameter_count():
    with pytest.raises(ParameterCountError):
        build_coupling("orthotropic", [1.0, 2.0])


# --- 正定性 ---

def test_positive_definite_modes():
    for mode in ("strict", "semi"):
        check = check_positive_definite(np.eye(3), mode)
        assert check.ok and check.min_eig == pytest.approx(1.0)
    zero = np.zeros((3, 3))
    assert not check_positive_definite(zero, "strict").ok
    assert check_positive_definite(zero, "semi").ok
    indefinite = np.diag([1.0, -1.0, 1.0])
    assert not check_positive_definite(indefinite, "strict").ok
    assert not check_positive_definite(indefinite, "semi").ok


# --- 极限情形 ---

def test_skew_distortion_is_cosserat():
    P = np.array([[0.0, 1.0, -2.0], [-1.0, 0.0, 0.5], [2.0, -0.5, 0.0]])
    assert limiting_case_predicate(LimitingCase.COSSERAT, P)
    assert not limiting_case_predicate(LimitingCase.MICROSTRAIN, P)


def test_spherical_distortion_is_micro_dilation():
    P = 2.0 * np.eye(3)
    assert limiting_case_predicate("micro_dilation", P)
    assert limiting_case_predicate("micro_stretch", P)
    assert not limiting_case_predicate("micro_incompressible", P)


def test_symmetric_traceless_distortion():
    P = np.array([[1.0, 0.2, 0.0], [0.2, -0.4, 0.3], [0.0, 0.3, -0.6]])
    assert set(active_limiting_cases(P)) == {LimitingCase.MICROSTRAIN, LimitingCase.MICRO_INCOMPRESSIBLE}
