"""How far from degenerate is F_n on a level set?

On the quadric the Jacobian criterion of F_n equals (w3 w4 - c)^(2n) with
c = 1/2 + i a_n, and w3 w4 ranges over the filled ellipse |v| + |1 - v| <= t.
So the smallest |criterion| on M_t is the distance from c to that ellipse,
raised to 2n.  Sampling confirms it, and at t = t_n an explicit point makes
the criterion vanish.
"""
import numpy as np

from crlab.maps import build_immersion
from crlab.poly import apply_vector_field_L
from crlab.quadric import degenerate_witness, ellipse_distance, sample_level_array
from crlab.suites import witness_criterion

for n in (1, 2, 3):
    m = build_immersion(n)
    L = apply_vector_field_L(m.P)
    print(f"n = {n}, t_n = {m.t_threshold:.6f}")
    for frac in (0.25, 0.5, 0.9):
        t = 1 + frac * (m.t_threshold - 1)
        W = sample_level_array(t, 5000, seed=n)
        sampled = np.abs(L.evaluate(W)).min()
        predicted = ellipse_distance(m.center, t) ** (2 * n)
        print(f"   t = {t:.4f}: sampled min {sampled:.4e}, distance bound {predicted:.4e}")
    w = degenerate_witness(m, m.t_threshold)
    print(f"   at t_n the point {np.round(w.w, 4)} has criterion "
          f"{witness_criterion(n, w.coords):.1e}")
