"""Fibers of F_1 and why F_1 is injective on M_t for t < sqrt(5)/2.

A point with w1 w3 != 0 shares its F_1-image with exactly two other quadric
points ("siblings").  Below sqrt(5)/2 the siblings always lie on a different
level from the base point; from sqrt 2 on, explicit collisions exist.
"""
import math

import numpy as np

from crlab.fibers import (complete_sibling_array, min_phi_over_D, noninjectivity_pair,
                          sibling_candidates_array)
from crlab.maps import build_immersion
from crlab.quadric import level, sample_level_array

m = build_immersion(1)
for t in (1.02, 1.05, 1.1, 1.117, 1.2, 1.3):
    W = sample_level_array(t, 4000, seed=0, boundary_prob=0.0, y_root="random")
    gap = min(np.abs(level(complete_sibling_array(W, c)) - t).min()
              for c in sibling_candidates_array(W))
    print(f"t = {t:<6} smallest |level(sibling) - t| = {gap:.3e}")

val, arg = min_phi_over_D()
print(f"\nmin of phi over D = {val:.12f} at b = {arg:.6f}  (sqrt(5)/2 squared = 1.25)")

def fmt(z):
    return "(" + ", ".join(f"{complex(x).real:.4f}" for x in z) + ")"


for t in (math.sqrt(2), 1.5):
    w, w2 = noninjectivity_pair(t)
    print(f"t = {t:.4f}: F_1{fmt(w.w)} = F_1{fmt(w2.w)} = {fmt(m.image(w.coords))}")
