"""Default tolerances and run sizes, kept in one place and echoed into reports."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    construction_rel: float = 1e-10     # L(P_n) - R_n, relative to max |coef R_n|
    exact_small_case: float = 1e-14     # same residual for n = 1
    arg_condition: float = 1e-9         # |Re c^(2n+1)| / |c|^(2n+1)
    anchor: float = 1e-12               # closed-form constants for n = 1
    criterion_rel: float = 1e-6         # lower bounds on |jacobian criterion|
    witness_abs: float = 1e-9           # criterion at degenerate witnesses
    fiber_roots_rel: float = 1e-8       # cubic oracle vs closed-form siblings
    fiber_values: float = 1e-9          # |P1(base) - P1(sibling)| / (1 + |P1(base)|)
    phi_min_abs: float = 1e-9
    phi_argmin: float = 1e-6
    phi_restriction: float = 1e-10
    h_endpoint: float = 1e-9
    level_gap: float = 1e-9             # sibling level |t_hat - t| counted as a collision below this
    multiplicity_rel: float = 1e-7
    domain_margin: float = 1e-12

    def as_dict(self) -> dict:
        return asdict(self)

    def override(self, **changes) -> "Tolerances":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


@dataclass(frozen=True)
class RunSizes:
    n_max: int = 8
    arg_n_max: int = 20
    divergence_n_max: int = 40
    divergence_bound: float = 10.0
    nondeg_n_max: int = 5
    nondeg_samples: int = 10_000
    fiber_samples: int = 1_000
    restriction_samples: int = 1_000
    phi_grid: int = 2001
    phi_refine: int = 50
    injectivity_samples: int = 1_000
    root_profile_n_max: int = 6

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOLERANCES = Tolerances()
DEFAULT_SIZES = RunSizes()
