"""Prefractal graph approximations of the Weierstrass function.

Levels, self-similar measure, graph energies, Laplacians, spectral
decimation and cell-height bounds, plus a command-line driver.
"""

from ._version import __version__
from .bounds import BoundsReport, HeightRecord, check_bounds, lower_constant, upper_constant
from .energy import EnergyMode, energy, extend_to, harmonic_extension, markov_truncate, spline_basis
from .errors import (
    ConsistencyError,
    DegenerateDiscriminantError,
    DegenerateGeometryError,
    DomainError,
    ForbiddenEigenvalueError,
    ParameterDomainError,
    ResourceError,
    ShapeError,
    VertexLookupError,
    WeierstrassGraphError,
)
from .ifs import GraphLevel, Polygon, Vertex, apply_contraction, apply_word, build_level, fixed_point, vertex_count
from .laplacian import (
    DiscreteLaplacian,
    assemble_laplacian,
    gauss_green_residual,
    normal_derivative,
    renormalized_laplacian_seq,
)
from .measure import MeasureTable, integrate, measure_table, replication_weights, vertex_cell_measure
from .params import DerivedConstants, FractalParams, derived_constants, truncation_order, weierstrass_eval
from .spectral import (
    EigenPair,
    decimate_forward,
    decimation_closure,
    direct_spectrum,
    extend_eigenfunction,
    inverse_branches,
    phi,
    phi_inverse,
)
