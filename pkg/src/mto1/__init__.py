"""Many-to-one mappings over finite fields.

Subpackages: galois (field arithmetic), multiplicity (fiber verdicts),
criteria (commutative-square constructions), cyclotomic (the x^r h(x^s)
theory), unitline (rational maps on U_{q+1} and the projective line),
harness/cli (grid verification against brute-force oracles).
"""

from .galois import (FieldElement, FieldError, FieldSpec, Poly, ScaleError,
                     build_field, parse_field, poly_eval, primitive_element,
                     trace, unity_subgroup)
from .multiplicity import (FiniteMapping, Mto1Report, admissible_m_set,
                           check_m_to_1, count_formula, fiber_histogram)
from .criteria import (CommutativeSquare, CriterionReport, GroupModel,
                       HypothesisError, construction1_verdict,
                       construction2_verdict, construction3_verdict,
                       local_criterion_check)
from .cyclotomic import (CycloDecomposition, CycloForm, decompose, fq_bridge,
                         hd_family_predict, lift_from_permutation, main_predict,
                         monomial_predict, small_ell_predict, small_m_predict)
from .unitline import (INF, Deg1Map, RationalMap, deg1_permutes_unit,
                       deg1_unit_to_line, g3_family, g5_family,
                       halfplane_split, rat_eval)

__version__ = "0.1.0"
