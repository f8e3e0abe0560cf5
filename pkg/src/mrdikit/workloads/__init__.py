from .determinant import (
    DetJob,
    coefficient_bound,
    degree_bound,
    det_mod_p,
    modular_determinant,
)
from .kernel import MonomialMap, components_of_kernel, evaluate_map, kernel_block
from .synthetic import detcrt_instance, kernel_instance

__all__ = [
    "DetJob",
    "MonomialMap",
    "coefficient_bound",
    "components_of_kernel",
    "degree_bound",
    "det_mod_p",
    "detcrt_instance",
    "evaluate_map",
    "kernel_block",
    "kernel_instance",
    "modular_determinant",
]
