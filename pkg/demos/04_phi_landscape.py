"""Plot phi over the domain D in the b-plane (writes phi_landscape.png).

D is the intersection of two ellipses with foci {0, 1} and {1, omega}.  The
minimum 5/4 sits on the segment joining the two corners of D.
"""
import sys

import numpy as np

from crlab.fibers import MINIMIZER, SIGMA_RANGE, phi_grid, segment_point

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit("matplotlib is needed for this demo (pip install crlab[demos])")

res = 301
rows = np.array([(re, im, ind, np.nan if v is None else v) for re, im, ind, v in phi_grid(res)])
X = rows[:, 0].reshape(res, res)
Y = rows[:, 1].reshape(res, res)
Z = np.where(rows[:, 2] == 1, rows[:, 3], np.nan).reshape(res, res)

fig, ax = plt.subplots(figsize=(6, 5))
cs = ax.contourf(X, Y, Z, levels=np.linspace(1.25, 1.6, 15), extend="max")
fig.colorbar(cs, label="phi")
seg = segment_point(np.linspace(*SIGMA_RANGE, 50))
ax.plot(seg.real, seg.imag, "w--", lw=1)
ax.plot(MINIMIZER.real, MINIMIZER.imag, "r*", ms=12)
ax.set_xlabel("Re b")
ax.set_ylabel("Im b")
ax.set_aspect("equal")
fig.savefig("phi_landscape.png", dpi=120, bbox_inches="tight")
print("wrote phi_landscape.png; min over grid:", np.nanmin(Z))
