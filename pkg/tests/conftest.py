import json

import numpy as np
import pytest

from ontolab.ontology import FiniteOnticSpace, FiniteOntologicalModel, PreparationMeasure
from ontolab.quantum import PureState, ket0, ket_plus


def random_state(rng, dim=2):
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return PureState.from_amplitudes(amps)


def random_psi_ontic_model(rng, max_points=50, max_preps=8, dim=2):
    """
    Model whose preparations have pairwise disjoint supports.

    The ontic points are split into one block per preparation (leftover points
    carry no weight) and each preparation gets a Dirichlet measure on its block.
    """
    n_preps = int(rng.integers(1, max_preps + 1))
    n_points = int(rng.integers(n_preps, max_points + 1))
    points = tuple(f"p{i}" for i in range(n_points))
    order = rng.permutation(n_points)
    cuts = np.sort(rng.choice(np.arange(1, n_points + 1), n_preps, replace=False))
    starts = np.concatenate([[0], cuts[:-1]])
    preparations = []
    for k, (start, stop) in enumerate(zip(starts, cuts)):
        block = order[start:stop]
        weights = np.zeros(n_points)
        weights[block] = rng.dirichlet(np.ones(block.size))
        weights /= weights.sum()
        preparations.append(PreparationMeasure(f"s{k}", random_state(rng, dim), weights))
    return FiniteOntologicalModel(FiniteOnticSpace(points), tuple(preparations))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def overlapping_qubit_model():
    "|0⟩ and |+⟩ sharing the single point b with mass 0.1 each"
    space = FiniteOnticSpace(("a", "b", "c"))
    return FiniteOntologicalModel(
        space,
        (
            PreparationMeasure("zero", ket0(), [0.9, 0.1, 0.0]),
            PreparationMeasure("plus", ket_plus(), [0.0, 0.1, 0.9]),
        ),
    )


@pytest.fixture
def disjoint_qubit_model():
    space = FiniteOnticSpace(("a", "b", "c"))
    return FiniteOntologicalModel(
        space,
        (
            PreparationMeasure("zero", ket0(), [1.0, 0.0, 0.0]),
            PreparationMeasure("plus", ket_plus(), [0.0, 0.0, 1.0]),
        ),
    )


def qubit_model_document(mu_zero=(1.0, 0.0), mu_one=(0.0, 1.0)):
    "ψ-ontic two-point qubit model with a computational-basis response"
    return {
        "schema_version": "1.0",
        "dimension": 2,
        "ontic_points": ["a", "b"],
        "preparations": [
            {"label": "zero", "state": [[1.0, 0.0], [0.0, 0.0]], "mu": list(mu_zero)},
            {"label": "one", "state": [[0.0, 0.0], [1.0, 0.0]], "mu": list(mu_one)},
        ],
        "responses": [
            {
                "basis": [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]],
                "xi": [[1.0, 0.0], [0.0, 1.0]],
            }
        ],
    }


@pytest.fixture
def write_json(tmp_path):
    def write(doc, name="model.json"):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return path

    return write


@pytest.fixture
def make_psi_ontic_model():
    return random_psi_ontic_model


@pytest.fixture
def make_state():
    return random_state


@pytest.fixture
def qubit_document():
    return qubit_model_document
