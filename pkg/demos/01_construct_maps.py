"""Build the first few immersions F_n = (w1, w3, P_n) and look at their thresholds.

Each P_n is fixed by one number a_n, picked so that the restriction of the
right-hand side R_n to the quadric has its only root at 1/2 + i a_n.  The
level sets M_t stay nondegenerate until t reaches t_n = 2 sqrt(1/4 + a_n^2).
"""
from crlab.maps import build_immersion, compute_t, divergence_probe, pde_residual

print(f"{'n':>3} {'a_n':>10} {'t_n':>10} {'terms':>6} {'L(P)-R':>10}")
for n in range(1, 9):
    m = build_immersion(n)
    print(f"{n:>3} {m.a:10.6f} {m.t_threshold:10.6f} {len(m.P):>6} {pde_residual(m):10.2e}")

# F_1 written out
m1 = build_immersion(1)
print("\nP_1 =", m1.P)

# the thresholds grow without bound, but only along odd and even n separately
print("\nodd n :", [round(compute_t(n), 3) for n in range(1, 12, 2)])
print("even n:", [round(compute_t(n), 3) for n in range(2, 12, 2)])
print("first n with t_n > 10:", divergence_probe(10))
