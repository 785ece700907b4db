"""
Crossing probabilities across scales
====================================

The covered left-right crossing of an l x l box behaves very differently
on either side of alpha = 2.  Below it long grains dominate and crossings
become likely as l grows; above it they die out.  At alpha = 2 the picture
is scale invariant, up to a finite-size correction from the unit minor axis.
"""
from ellipseperc.laws import AxisLaw
from ellipseperc.montecarlo import EventParams, estimate

u = 0.02
n = 400
print("alpha      l=16     l=64    l=256")
for alpha in (1.5, 2.0, 3.0):
    row = []
    for l in (16.0, 64.0, 256.0):
        r = estimate("covered_lr", EventParams(AxisLaw.pareto(alpha), u, l=l), n, seed=1)
        row.append(f"{r.phat:8.3f}")
    print(f"{alpha:5.1f} " + " ".join(row))

# a single ellipse crossing: at alpha = 2 the probability settles to a
# constant once l is large compared to the minor axis
law = AxisLaw.pareto(2.0)
for l in (10.0, 100.0, 1000.0):
    r = estimate("one_ellipse_lr", EventParams(law, 0.5, l=l), 2000, seed=2)
    print(f"one ellipse, l={l:6.0f}: {r.phat:.3f} [{r.ci[0]:.3f}, {r.ci[1]:.3f}]")
