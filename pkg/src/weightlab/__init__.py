"""Weight structures, virtual truncations and weight spectral sequences in K^b(free modules).

The base ring is the integers or a prime field F_p, encoded by an integer
``p`` (``0`` for the integers).  All arithmetic is exact.
"""

from .complexes import X2, X4, XI, Z0, ChainMap, Complex, cone, hom_complex, homotopy_classes
from .exact_linalg import FpAbGroup, IntMatrix, smith_normal_form
from .orthogonal import (
    TStructure,
    WeightChange,
    compare_T_S,
    compare_weight_ss,
    hom_into_t_slice,
    t_spectral_sequence,
    t_truncate,
    weight_exactness,
)
from .spectral import (
    FilteredComplex,
    abutment_filtration,
    build_weight_couple,
    compare_with_oracle,
    e2_via_virtual,
    er_subquotient,
    ss_pages,
    tower_from_filtration,
    weight_spectral_sequence,
)
from .virtual_trunc import FunctorHandle, check_niceness, virtual_les, virtual_truncation, weight_filtration
from .weight_core import W, WeightStructure, weight_complex, weight_decomposition, weight_postnikov_tower

__version__ = "0.1.0"
