"""Polynomial CR immersions of the level sets M_t of the quadric w1 w2 + w3 w4 = 1."""
from .config import DEFAULT_SIZES, DEFAULT_TOLERANCES, RunSizes, Tolerances
from .fibers import (DOMAIN, EllipseDomain, fiber, injectivity_scan, min_phi_over_D,
                     noninjectivity_pair, phi, phi_hat, phi_hat_orth)
from .maps import (ConstructionError, ImmersionMap, build_immersion, compute_a, compute_t,
                   pde_residual, verify_construction)
from .poly import SparsePoly4, UVPoly, apply_vector_field_L, partial_derivative, to_uv
from .quadric import (Infeasible, NoWitnessBelowThreshold, QuadricPoint, degenerate_witness,
                      jacobian_criterion, sample_level, sample_level_array)
from .reference import (MixedPoly, ar_operator, degeneracy_root_profile,
                        homogenize_on_sphere, is_harmonic, noninjectivity_witness)
from .report import CheckRecord, VerificationReport
from .suites import run_suite

__version__ = "0.1.0"
