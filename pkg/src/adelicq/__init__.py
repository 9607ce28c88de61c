"""Heights, Mahler measures and Fermat curves over Q(X1, ..., Xn)."""
from .adelic import (AdelicParams, DivisorPlace, FactoredElement, PrimePlace, ProjPoint, TorusPlace,
                     absolute_value, height, is_height_zero, log_absolute_value, place_constant,
                     product_formula_residual, torsion_witness)
from .arith import euler_phi, is_prime
from .density import DensitySpec, density_certificate, density_simulate, theorem_pipeline
from .exprparse import ParseError, parse, parse_poly
from .fermat import (BoundInputs, TorsionAngle, fermat_check_point, fermat_property_over_points,
                     min_positive_height, multiple_bound, roots_of_unity_solutions)
from .mahler import MahlerEstimate, QuadratureSpec, mahler_measure, northcott_enumerate
from .polycore import Poly, PrimeDivisor, RationalFunction, gauss_norm, poly_gcd

__version__ = "0.1.0"
