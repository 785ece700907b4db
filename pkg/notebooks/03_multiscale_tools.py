"""
Multiscale bookkeeping
======================

Three small tools behind the renormalisation picture: the q_k recursion and
its starting scale, the removal process that couples the vacant set to
fractal percolation, and fractal percolation itself.
"""
import numpy as np

from ellipseperc import multiscale as ms
from ellipseperc.laws import AxisLaw
from ellipseperc.sampling import make_rng

# starting scale and intensity for which q_k <= exp(-eps k) propagates
eps, k0, u0 = ms.compute_k0_u0(C7=2.0, alpha=3.0)
print(f"eps={eps}, k0={k0}, u0={u0:.3g}, certified to k=500: {ms.verify_qk_bound(2.0, 3.0, u0, eps, k0, 500)}")
# the recursion started from q_0 = 0 stays under the envelope beyond k0
q = np.array(ms.iterate_qk(ms.RecursionParams(2.0, 3.0, u0, 0.0), 60))
k = np.arange(q.size)
print("max of q_k exp(eps k) over k >= k0:", f"{(q[k0:] * np.exp(eps * k[k0:])).max():.3g}")

# removal process on B(64; 2): finer levels clear smaller boxes
out = ms.removal_process(64.0, 0.05, AxisLaw.pareto(2.0), make_rng(0))
for f in out.levels:
    print(f"level {f.n}: I = [{f.interval[0]:g}, {f.interval[1]:g}), surviving boxes {f.bits.mean():.2f}")
print("survivors cross left-right:", out.crossing, "| structure ok:", out.structural_ok)

# fractal percolation with N = 2: crossing becomes likely only near p = 1
rng = make_rng(3)
for p in (0.7, 0.85, 0.95):
    hits = sum(ms.fractal_percolation(p, 2, 6, rng)[1] for _ in range(300))
    print(f"p={p}: crossing frequency {hits / 300:.2f}")
