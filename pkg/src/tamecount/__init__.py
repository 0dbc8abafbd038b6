"""Exact counting of tame abelian extension data of Q by ray class, with
Euler-product and Tauberian predictions."""

from .abelian import (
    Character,
    FiniteAbelianGroup,
    GroupRingElement,
    OrbitTable,
    in_A_hatG,
    make_group,
    orbit_table,
    stickelberger_pairing,
    stickelberger_theta,
)
from .counting import (
    ClassTally,
    FiberPartition,
    assemble_N,
    kappa_all,
    kappa_full,
    kappa_full_by_inclusion_exclusion,
    kappa_full_by_subtraction,
    kappa_omit,
)
from .cyclo import ComponentField, degree_one_primes, ideal_class, ray_characters, ray_class_group, splitting_type
from .dirichlet import (
    AsymptoticPrediction,
    check_comp1_bound,
    equidistribution_verdict,
    euler_factor_D,
    euler_factor_L,
    evaluate_series,
    pole_data,
    predict,
    psi_correction,
    residue_b,
    tauberian_predict,
)
from .fideals import (
    LambdaAlgebra,
    LambdaIdeal,
    Weight,
    enumerate_F,
    is_in_F,
    module_index,
    nu,
    weight_custom,
    weight_disc,
    weight_ram,
    weighted_index,
)

__version__ = "0.1.0"
