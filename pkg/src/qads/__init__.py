"""Exact computations for the q-deformed anti-de Sitter and sphere algebras at q = exp(i pi/M)."""

from .coords import CoordinateOperators, coordinate_operators
from .cyclo import CycloField, CycloScalar, conj, make_field, qnum, sign_of_real
from .errors import (
    CertificationError,
    ClaimViolation,
    ConstructionError,
    DegenerateParameterError,
    DomainError,
    ParameterError,
    QadsError,
    ResourceError,
    SinkError,
    StructuralError,
)
from .frt import build_metric, build_projectors, build_rmatrix, sphere_relations
from .rootdata import ModelParams, RootSystem, build_params, build_root_system, compute_signs
from .sphere import CyclicModule, SphereLevel, SphereTower, build_level, cyclic_submodule, energy_spectrum, get_tower
from .unitarity import (
    GramForm,
    StarStructure,
    assemble_ads_hilbert,
    contravariant_gram,
    coordinate_adjoints,
    is_positive_definite,
    sector_classification,
    star_structure,
    unitarity_window_scan,
)
from .vecrep import VectorRep, build_vector_rep, tensor_action

__version__ = "0.1.0"
