import numpy as np
import pytest

from ontolab.exceptions import (
    InconsistentLabelMap,
    NotProductPreparation,
    PsiEpistemicInput,
)
from ontolab.ontology import (
    FiniteOnticSpace,
    FiniteOntologicalModel,
    PreparationMeasure,
    pip_compose,
)
from ontolab.quantum import PureState, ket0, ket1, tensor
from ontolab.representation import (
    FiberDecomposition,
    StateLabelMap,
    SubsystemVerdict,
    construct_label_map,
    corollary_check,
    fiber_decomposition,
    product_label_coordinates,
    subsystem_onticity_check,
    verify_delta_form,
)


@pytest.fixture
def spread_qubit_model():
    "|0⟩ spread over {a, b} and |1⟩ over {c, d}"
    space = FiniteOnticSpace(("a", "b", "c", "d"))
    return FiniteOntologicalModel(
        space,
        (
            PreparationMeasure("zero", ket0(), [0.5, 0.5, 0.0, 0.0]),
            PreparationMeasure("one", ket1(), [0.0, 0.0, 0.25, 0.75]),
        ),
    )


def test_label_map_and_fibers(spread_qubit_model):
    label_map = construct_label_map(spread_qubit_model)
    assert [label_map(p) for p in "abcd"] == ["zero", "zero", "one", "one"]
    decomposition = fiber_decomposition(spread_qubit_model, label_map)
    assert decomposition.fibers["one"] == ("c", "d")
    assert np.allclose(decomposition.conditional_measures["one"], [0.25, 0.75])
    check = verify_delta_form(spread_qubit_model, decomposition)
    assert check.holds
    assert check.max_error == 0.0


def test_unsupported_points_get_the_first_label():
    space = FiniteOnticSpace(("a", "b", "c"))
    model = FiniteOntologicalModel(
        space,
        (
            PreparationMeasure("one", ket1(), [0.0, 1.0, 0.0]),
            PreparationMeasure("zero", ket0(), [0.0, 0.0, 1.0]),
        ),
    )
    label_map = construct_label_map(model)
    assert label_map.default_label == "one"
    assert label_map("a") == "one"
    assert label_map("unknown-point") == "one"


def test_ray_equal_preparations_share_a_fiber():
    space = FiniteOnticSpace(("a", "b", "c"))
    model = FiniteOntologicalModel(
        space,
        (
            PreparationMeasure("zero", ket0(), [1.0, 0.0, 0.0]),
            PreparationMeasure("zero-phase", PureState(-ket0().amplitudes), [0.0, 1.0, 0.0]),
            PreparationMeasure("one", ket1(), [0.0, 0.0, 1.0]),
        ),
    )
    label_map = construct_label_map(model)
    assert label_map("b") == "zero"
    decomposition = fiber_decomposition(model, label_map)
    assert decomposition.fibers["zero"] == decomposition.fibers["zero-phase"] == ("a", "b")
    assert np.allclose(decomposition.conditional_measures["zero-phase"], [0.0, 1.0])
    assert verify_delta_form(model, decomposition).holds


def test_epistemic_input_rejected(overlapping_qubit_model):
    with pytest.raises(PsiEpistemicInput) as info:
        construct_label_map(overlapping_qubit_model)
    assert info.value.pair == ("zero", "plus")
    assert np.isclose(info.value.mass, 0.1)


def test_corrupted_decomposition_is_caught():
    """
    A fiber that leaves out half of the preparation's mass reconstructs the
    measure with error 0.5.
    """
    space = FiniteOnticSpace(("a", "b", "c", "d"))
    model = FiniteOntologicalModel(
        space, (PreparationMeasure("zero", ket0(), [0.5, 0.5, 0.0, 0.0]),)
    )
    decomposition = FiberDecomposition({"zero": ("a",)}, {"zero": [1.0]})
    check = verify_delta_form(model, decomposition)
    assert not check.holds
    assert check.max_error == 0.5


def test_label_map_with_unknown_label(spread_qubit_model):
    label_map = StateLabelMap({"a": "zero", "b": "zero", "c": "two", "d": "one"}, "zero")
    with pytest.raises(InconsistentLabelMap, match="two"):
        fiber_decomposition(spread_qubit_model, label_map)


@pytest.mark.slow
def test_delta_form_round_trip(make_psi_ontic_model, rng):
    """
    Random ψ-ontic models decompose exactly, and sharing a single point between
    two distinct states turns every one of them into a ψ-epistemic input.
    """
    for _ in range(1000):
        model = make_psi_ontic_model(rng)
        label_map = construct_label_map(model)
        check = verify_delta_form(model, fiber_decomposition(model, label_map))
        assert check.holds and check.max_error < 1e-12

        if len(model.preparations) < 2:
            continue
        first, second = model.preparations[:2]
        shared = int(np.argmax(first.weights))
        weights = 0.99 * second.weights
        weights[shared] += 0.01
        broken = FiniteOntologicalModel(
            model.space,
            (first, PreparationMeasure(second.label, second.quantum_state, weights))
            + model.preparations[2:],
        )
        with pytest.raises(PsiEpistemicInput):
            construct_label_map(broken)


@pytest.mark.slow
def test_subsystem_onticity_of_pip_composites(make_psi_ontic_model, rng):
    """
    Composing two ψ-ontic models under preparation independence leaves every
    subsystem label sharp: each marginal is a point mass on the factor's own label.
    """
    for _ in range(100):
        m1 = make_psi_ontic_model(rng, max_points=12, max_preps=4)
        m2 = make_psi_ontic_model(rng, max_points=12, max_preps=4)
        composite = pip_compose(m1, m2)
        first, second = subsystem_onticity_check(composite)
        assert first.verdict is SubsystemVerdict.ONTIC
        assert second.verdict is SubsystemVerdict.ONTIC
        for p in composite.preparations:
            for s, verdict in enumerate((first, second)):
                marginal = verdict.marginals[p.label]
                assert list(marginal) == [p.factor_labels[s]]
                assert abs(marginal[p.factor_labels[s]] - 1.0) < 1e-12
        assert all(corollary_check(composite).values())


def test_inconsistent_external_label_map(spread_qubit_model):
    composite = pip_compose(spread_qubit_model, spread_qubit_model)
    assignment = dict(construct_label_map(composite).assignment)
    assert assignment["a,b"] == "zero,zero"
    assignment["a,b"] = "one,zero"
    label_map = StateLabelMap(assignment, "zero,zero")

    first, second = subsystem_onticity_check(composite, label_map=label_map)
    assert first.verdict is SubsystemVerdict.VIOLATION
    assert first.witness == ("zero", "one")
    assert first.preparation == "zero,zero"
    assert second.verdict is SubsystemVerdict.ONTIC
    assert np.isclose(first.marginals["zero,zero"]["one"], 0.25)

    with pytest.raises(InconsistentLabelMap):
        product_label_coordinates(composite, label_map=label_map)


def test_product_label_coordinates(spread_qubit_model):
    composite = pip_compose(spread_qubit_model, spread_qubit_model)
    coords = product_label_coordinates(composite)
    assert (coords["one,zero"].first, coords["one,zero"].second) == ("one", "zero")
    assert coords["one,zero"].first_state.ray_equal(ket1())


def test_subsystem_check_needs_product_structure(spread_qubit_model):
    with pytest.raises(NotProductPreparation):
        subsystem_onticity_check(spread_qubit_model)


def test_label_coordinates_with_correlated_residuals(spread_qubit_model):
    """
    Each product preparation couples the residual points of its two factors
    ((a, a) with (b, b) and so on) instead of spreading as a product measure.
    The subsystem labels still split cleanly.
    """
    space = spread_qubit_model.space.product(spread_qubit_model.space)
    states = {"zero": ket0(), "one": ket1()}
    support = {
        ("zero", "zero"): {"a,a": 0.5, "b,b": 0.5},
        ("zero", "one"): {"a,c": 0.2, "b,d": 0.8},
        ("one", "zero"): {"c,a": 0.6, "d,b": 0.4},
        ("one", "one"): {"c,c": 0.3, "d,d": 0.7},
    }
    preparations = []
    for (l1, l2), masses in support.items():
        weights = np.zeros(space.size)
        for point, mass in masses.items():
            weights[space.index(point)] = mass
        prod = tensor(states[l1], states[l2])
        preparations.append(
            PreparationMeasure(f"{l1},{l2}", prod.joint, weights, prod, (l1, l2))
        )
    composite = FiniteOntologicalModel(space, tuple(preparations))

    coords = product_label_coordinates(composite)
    for l1, l2 in support:
        c = coords[f"{l1},{l2}"]
        assert (c.first, c.second) == (l1, l2)
        assert c.first_state.ray_equal(states[l1])
        assert c.second_state.ray_equal(states[l2])
    first, second = subsystem_onticity_check(composite)
    assert first.verdict is second.verdict is SubsystemVerdict.ONTIC


def test_delta_form_error_is_the_moved_mass(spread_qubit_model):
    decomposition = fiber_decomposition(
        spread_qubit_model, construct_label_map(spread_qubit_model)
    )
    moved = FiniteOntologicalModel(
        spread_qubit_model.space,
        (
            PreparationMeasure("zero", ket0(), [0.4, 0.5, 0.1, 0.0]),
            spread_qubit_model.preparation("one"),
        ),
    )
    check = verify_delta_form(moved, decomposition)
    assert not check.holds
    assert abs(check.errors["zero"] - 0.1) < 1e-12
    assert check.errors["one"] == 0.0
    assert abs(check.max_error - 0.1) < 1e-12


def test_delta_form_without_preparations():
    model = FiniteOntologicalModel(FiniteOnticSpace(("a",)), ())
    check = verify_delta_form(model, FiberDecomposition({}, {}))
    assert check.holds
    assert check.max_error == 0.0
    assert dict(check.errors) == {}
