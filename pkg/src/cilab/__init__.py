"""Point counting on complete intersections over finite fields, with exact
checks of the cohomological bounds that govern the counts."""

from .counter import CountRecord, CountTable, count_affine_complement, count_pn, count_projective
from .errors import (BudgetExceeded, CilabError, FieldError, IntegrityError, NotOnVariety,
                     ParseError, ReconstructionError, SectionError)
from .gf import ExtensionField, FieldElement, enumerate_field, make_field
from .poly import (CompleteIntersectionSpec, HomogeneousPoly, evaluate, hyperplane_section,
                   jacobian_rank_at, parse_spec, random_ci, spec_from_strings)
from .zeta import (MiddleData, MiddlePolynomial, apply_functional_equation,
                   euler_characteristic_ci, middle_betti, middle_power_sums, newton_reconstruct,
                   predict_count, verify_rh)

__version__ = "0.1.0"
