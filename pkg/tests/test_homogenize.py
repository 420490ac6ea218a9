import numpy as np
import pytest

from core.anisotropy import (
    SymmetryClass,
    build_coupling,
    build_cubic,
    build_isotropic,
    build_orthotropic,
    check_positive_definite,
    class_parameters,
    classify_stiffness,
    lame_lambda,
)
from core.errors import (
    ConventionMismatchError,
    MicroEqualsMacroError,
    NotPositiveDefiniteError,
    StiffnessExceedsMicroError,
)
from core.homogenize import (
    SMALLER_IS_STIFFER,
    cubic_closed_form,
    cubic_inverse_form,
    e_from_micro_macro,
    harmonic_mean,
    homogenize_many,
    iso_closed_form,
    iso_inverse_form,
    lame_closed_form,
    limit_micro_distortion,
    macro_from_micro_e,
    micro_limit_relation,
    mindlin_micro_limit,
    mindlin_reduction_residual,
    ortho_closed_form,
    ortho_inverse_form,
)
from core.tensor_core import (
    Coupling3,
    NotationConvention,
    StiffnessVoigt,
    Tensor4Full,
    apply_stiffness,
    isotropic_tensor4_full,
    relaxed_tensor4_full,
    skew,
    sym,
)
from tests.conftest import CORPUS_SIZE
from tests.test_anisotropy import random_orthotropic_params


def relative_max_deviation(a: dict, b: dict) -> float:
    return max(abs(a[k] - b[k]) / max(1.0, abs(b[k])) for k in a if k in b)


def test_isotropic_example():
    Ce = build_isotropic(lame_lambda(3.0, 1.0), 1.0)
    Cm = build_isotropic(lame_lambda(6.0, 1.0), 1.0)
    result = macro_from_micro_e(Cm, Ce)
    assert result.symmetric_ok and result.spd_ok
    params = class_parameters(result.macro)
    assert params["kappa"] == pytest.approx(2.0, abs=1e-12)
    assert params["mu"] == pytest.approx(0.5, abs=1e-12)


@pytest.fixture(scope="module")
def corpus():
    rng = np.random.default_rng(11)
    pairs = []
    for _ in range(CORPUS_SIZE):
        A = rng.standard_normal((6, 6))
        B = rng.standard_normal((6, 6))
        pairs.append((StiffnessVoigt(A @ A.T + 6.0 * np.eye(6)), StiffnessVoigt(B @ B.T + 6.0 * np.eye(6))))
    return pairs


def test_parallel_sum_law_on_corpus(corpus):
    for result in homogenize_many(corpus):
        assert result.harmonic_residual < 1e-10


def test_inversion_recovers_e_on_corpus(corpus):
    for Cm, Ce in corpus:
        macro = macro_from_micro_e(Cm, Ce).macro
        recovered = e_from_micro_macro(Cm, macro)
        assert np.linalg.norm(recovered.entries - Ce.entries) < 1e-9 * np.linalg.norm(Ce.entries)


def test_smaller_is_stiffer_on_corpus(corpus):
    for Cm, Ce in corpus:
        result = macro_from_micro_e(Cm, Ce)
        macro = result.macro.entries
        assert result.symmetric_ok
        assert result.spd_ok
        assert check_positive_definite(Cm.entries - macro, "strict").ok
        assert check_positive_definite(Ce.entries - macro, "strict").ok


def test_homogenize_many_keeps_order(corpus):
    sample = corpus[:5]
    batched = homogenize_many(sample, max_workers=2)
    for (Cm, Ce), result in zip(sample, batched):
        np.testing.assert_array_equal(result.macro.entries, macro_from_micro_e(Cm, Ce).macro.entries)


def test_harmonic_mean_is_twice_macro(corpus):
    Cm, Ce = corpus[0]
    np.testing.assert_allclose(harmonic_mean(Cm, Ce).entries, 2.0 * macro_from_micro_e(Cm, Ce).macro.entries,
                               rtol=1e-12, atol=1e-12)


def test_factor_order_and_inverse_sum_agree_on_corpus(corpus):
    for Cm, Ce in corpus:
        macro = macro_from_micro_e(Cm, Ce).macro.entries
        swapped = macro_from_micro_e(Ce, Cm).macro.entries
        inverse_sum = np.linalg.inv(np.linalg.inv(Cm.entries) + np.linalg.inv(Ce.entries))
        scale = np.max(np.abs(macro))
        np.testing.assert_allclose(swapped, macro, atol=1e-12 * scale)
        np.testing.assert_allclose(inverse_sum, macro, atol=1e-11 * scale)
        np.testing.assert_allclose(harmonic_mean(Ce, Cm).entries, 2.0 * macro, atol=1e-11 * scale)


def test_micro_limit_carries_macro_stress_on_corpus(corpus):
    rng = np.random.default_rng(12)
    for Cm, Ce in corpus:
        strain = sym(rng.standard_normal((3, 3)))
        sym_P = micro_limit_relation(Ce, Cm, strain)
        macro_stress = apply_stiffness(macro_from_micro_e(Cm, Ce).macro, strain)
        np.testing.assert_allclose(apply_stiffness(Cm, sym_P), macro_stress,
                                   atol=1e-11 * max(1.0, np.max(np.abs(macro_stress))))


def test_limit_distortion_balances_stresses_on_corpus(corpus):
    rng = np.random.default_rng(13)
    Cc = build_coupling("orthotropic", [1.0, 2.0, 3.0])
    for Cm, Ce in corpus:
        grad_u = rng.standard_normal((3, 3))
        P = limit_micro_distortion(Ce, Cm, Cc, grad_u).P
        elastic = apply_stiffness(Ce, sym(grad_u - P))
        micro = apply_stiffness(Cm, sym(P))
        np.testing.assert_allclose(elastic, micro, atol=1e-11 * max(1.0, np.max(np.abs(micro))))


@pytest.mark.parametrize("conv", list(NotationConvention))
def test_class_closure_and_closed_forms(registry, conv):
    rng = np.random.default_rng(7)
    for _ in range(50):
        k_e, k_m = rng.uniform(1.0, 10.0, 2)
        mu_e, mu_m, s_e, s_m = rng.uniform(0.5, 5.0, 4)
        cases = [
            (build_isotropic(lame_lambda(k_e, mu_e), mu_e, conv), build_isotropic(lame_lambda(k_m, mu_m), mu_m, conv)),
            (build_cubic(k_e, mu_e, s_e, conv), build_cubic(k_m, mu_m, s_m, conv)),
            (build_orthotropic(random_orthotropic_params(rng), conv),
             build_orthotropic(random_orthotropic_params(rng), conv)),
        ]
        for Ce, Cm in cases:
            cls = classify_stiffness(Ce)
            plugin = registry.get_plugin(cls)
            macro = macro_from_micro_e(Cm, Ce).macro
            assert classify_stiffness(macro) is cls
            closed = plugin.closed_form_macro(plugin.extract_parameters(Ce), plugin.extract_parameters(Cm))
            assert relative_max_deviation(closed, plugin.extract_parameters(macro)) < 1e-12
            back = plugin.closed_form_e(plugin.extract_parameters(Cm), closed)
            assert relative_max_deviation(back, plugin.extract_parameters(Ce)) < 1e-11


def test_scalar_closed_forms():
    assert iso_closed_form(3.0, 1.0, 6.0, 1.0) == pytest.approx((2.0, 0.5))
    assert iso_inverse_form(6.0, 1.0, 2.0, 0.5) == pytest.approx((3.0, 1.0))
    lam, mu = lame_closed_form(lame_lambda(3.0, 1.0), 1.0, lame_lambda(6.0, 1.0), 1.0)
    assert (lam, mu) == pytest.approx((lame_lambda(2.0, 0.5), 0.5))
    assert cubic_closed_form(2.0, 2.0, 2.0, 2.0, 2.0, 2.0) == pytest.approx((1.0, 1.0, 1.0))
    assert cubic_inverse_form(2.0, 2.0, 2.0, 1.0, 1.0, 1.0) == pytest.approx((2.0, 2.0, 2.0))


def test_orthotropic_block_forms_round_trip(rng):
    e = build_orthotropic(random_orthotropic_params(rng)).entries
    m = build_orthotropic(random_orthotropic_params(rng)).entries
    block, shears = ortho_closed_form(e[:3, :3], np.diag(e)[3:], m[:3, :3], np.diag(m)[3:])
    e_block, e_shears = ortho_inverse_form(m[:3, :3], np.diag(m)[3:], block, shears)
    np.testing.assert_allclose(e_block, e[:3, :3], rtol=1e-10)
    np.testing.assert_allclose(e_shears, np.diag(e)[3:], rtol=1e-10)


def test_macro_stiffer_than_micro_is_rejected():
    Cm = build_isotropic(lame_lambda(2.0, 1.0), 1.0)
    Cmacro = build_isotropic(lame_lambda(3.0, 1.0), 1.0)
    with pytest.raises(StiffnessExceedsMicroError, match="smaller is stiffer"):
        e_from_micro_macro(Cm, Cmacro)
    with pytest.raises(StiffnessExceedsMicroError):
        iso_inverse_form(2.0, 1.0, 3.0, 1.0)
    assert "smaller is stiffer" in SMALLER_IS_STIFFER


def test_equal_micro_and_macro_is_rejected():
    C = build_isotropic(1.0, 1.0)
    with pytest.raises(MicroEqualsMacroError):
        e_from_micro_macro(C, C)


def test_convention_mismatch():
    with pytest.raises(ConventionMismatchError):
        macro_from_micro_e(build_isotropic(1.0, 1.0), build_isotropic(1.0, 1.0, NotationConvention.MANDEL))


def test_indefinite_input_is_rejected():
    with pytest.raises(NotPositiveDefiniteError):
        macro_from_micro_e(StiffnessVoigt(-np.eye(6)), build_isotropic(1.0, 1.0))


def test_macro_is_convention_covariant():
    Ce = build_cubic(3.0, 1.0, 0.7)
    Cm = build_cubic(6.0, 2.0, 1.5)
    voigt = class_parameters(macro_from_micro_e(Cm, Ce).macro)
    mandel = class_parameters(macro_from_micro_e(
        build_cubic(6.0, 2.0, 1.5, NotationConvention.MANDEL),
        build_cubic(3.0, 1.0, 0.7, NotationConvention.MANDEL),
    ).macro)
    assert relative_max_deviation(mandel, voigt) < 1e-13


# --- 极限微变形 ---

def test_limit_distortion_without_coupling(rng):
    C = build_isotropic(1.0, 1.0)
    grad_u = rng.standard_normal((3, 3))
    limit = limit_micro_distortion(C, C, Coupling3.zero(), grad_u)
    assert not limit.skew_determined
    np.testing.assert_allclose(sym(limit.P), 0.5 * sym(grad_u), atol=1e-14)
    np.testing.assert_allclose(skew(limit.P), skew(grad_u), atol=1e-15)


def test_limit_distortion_with_coupling(rng):
    Ce, Cm = build_isotropic(1.0, 2.0), build_isotropic(0.5, 1.0)
    grad_u = rng.standard_normal((3, 3))
    limit = limit_micro_distortion(Ce, Cm, build_coupling("isotropic", 1.0), grad_u)
    assert limit.skew_determined
    np.testing.assert_allclose(sym(limit.P), micro_limit_relation(Ce, Cm, sym(grad_u)), atol=1e-14)


# --- Mindlin-Eringen ---

def test_block_structured_energy_tensor_reduces():
    assert mindlin_reduction_residual(isotropic_tensor4_full(1.0, 0.5, 0.3), build_isotropic(0.2, 1.0)) < 1e-12
    Ee = relaxed_tensor4_full(build_cubic(3.0, 1.0, 0.5), build_coupling("orthotropic", [1.0, 2.0, 3.0]))
    assert mindlin_reduction_residual(Ee, build_orthotropic([9, 8, 7, 1, 1, 1, 2, 2, 2])) < 1e-12


def test_generic_energy_tensor_does_not_reduce(random_spd):
    rng = np.random.default_rng(3)
    Ee = Tensor4Full(random_spd(rng, 9))
    residual = mindlin_reduction_residual(Ee, build_isotropic(1.0, 1.0))
    assert residual > 1e-6


def test_mindlin_limit_matches_relaxed_limit(rng):
    Ce, Cm = build_isotropic(1.0, 2.0), build_isotropic(0.5, 1.0)
    Cc = build_coupling("isotropic", 2.0)
    grad_u = rng.standard_normal((3, 3))
    P = mindlin_micro_limit(relaxed_tensor4_full(Ce, Cc), Cm, grad_u)
    np.testing.assert_allclose(P, limit_micro_distortion(Ce, Cm, Cc, grad_u).P, atol=1e-13)
