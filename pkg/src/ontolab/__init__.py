__version__ = "0.1.0"
from .exceptions import OntolabError as OntolabError
from .io import load_model as load_model
from .io import save_model as save_model
from .ontology import FiniteOnticSpace as FiniteOnticSpace
from .ontology import FiniteOntologicalModel as FiniteOntologicalModel
from .ontology import PreparationMeasure as PreparationMeasure
from .ontology import ResponseTable as ResponseTable
from .ontology import born_residual as born_residual
from .ontology import overlap_matrix as overlap_matrix
from .ontology import pip_compose as pip_compose
from .pbr import build_scenario as build_scenario
from .pbr import exclusion_witness as exclusion_witness
from .pbr import run_pbr_experiment as run_pbr_experiment
from .quantum import ProductState as ProductState
from .quantum import ProjectiveMeasurement as ProjectiveMeasurement
from .quantum import PureState as PureState
from .representation import construct_label_map as construct_label_map
from .representation import fiber_decomposition as fiber_decomposition
from .representation import subsystem_onticity_check as subsystem_onticity_check
from .representation import verify_delta_form as verify_delta_form
