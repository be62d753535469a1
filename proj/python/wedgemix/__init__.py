"""Passive-scalar mixing under alternating wedge shear flows.

Thin wrapper over the C++ extension module. The compiled module lives
inside this package when pip-installed, or next to it on PYTHONPATH when
running against a plain CMake build tree.
"""

try:
    from ._core import (
        derive_run_seed,
        ensemble,
        fit_rate,
        generator_id,
        jordan_check,
        mixing_exponent,
        orbit_jacobian,
        simulate,
    )
except ImportError:
    from _core import (
        derive_run_seed,
        ensemble,
        fit_rate,
        generator_id,
        jordan_check,
        mixing_exponent,
        orbit_jacobian,
        simulate,
    )

__all__ = [
    "derive_run_seed",
    "ensemble",
    "fit_rate",
    "generator_id",
    "jordan_check",
    "mixing_exponent",
    "orbit_jacobian",
    "simulate",
]
