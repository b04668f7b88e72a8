"""Quantum stochastic calculus workbench on truncated boson Fock spaces."""

from .fock import (
    FockBasis,
    FockOperator,
    FockVector,
    annihilation,
    conservation,
    creation,
    dilated_conservation_cf,
    exponential_vector,
    inner,
    momentum,
    second_quantization,
    weyl,
    weyl_pair,
)
from .ito_algebra import ItoMatrix, StrengthFunction, circ, dagger, nu, nu_integral
from .numerics import Tolerances, commutator, hermitian_eig, mat_exp
from .qsc import (
    AdaptedStepProcess,
    IdentityProcess,
    IntegralProcess,
    ScalarProcess,
    SlotSpace,
    StepFunction,
    TimeGrid,
    check_first_fundamental,
    check_second_fundamental,
    embed_exponential,
    ito_product_table,
)

__version__ = "0.1.0"
