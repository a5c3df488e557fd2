"""Compare F_n with a map built from a harmonic polynomial on the sphere.

For a polynomial f, restrict L(f) to the quadric and write it in v = w3 w4.
For P_n this has a single root of multiplicity 2n; for the harmonic
comparison map it has two simple roots.
"""
from crlab.maps import build_immersion
from crlab.reference import (ar_operator, ar_potential, ar_quadric_polynomial,
                             ar_sphere_polynomial, degeneracy_root_profile, p1_harmonic_source,
                             p1_harmonic_source_matching, provenance_pipeline, swap_pairs)

for n in (1, 2, 3):
    print(f"P_{n}:", degeneracy_root_profile(build_immersion(n).P))
print("comparison map:", degeneracy_root_profile(ar_quadric_polynomial()))

print("\noperator applied to the potential gives the sphere polynomial:",
      ar_operator(ar_potential()) == ar_sphere_polynomial())
print("homogenised extension:", provenance_pipeline(ar_sphere_polynomial()))

P1 = build_immersion(1).P
out = provenance_pipeline(p1_harmonic_source())
print("\nstated harmonic source of P_1, extended:", out)
print("   residual against P_1:", out.coefficient_residual(P1))
print("   residual after exchanging (w1, w2) with (w3, w4):", swap_pairs(out).coefficient_residual(P1))
fixed = provenance_pipeline(p1_harmonic_source_matching())
print("source with the opposite sign on the cubic terms:", fixed.coefficient_residual(P1))
