"""Tour of the Angenent-oval closed forms.

The oval is the ancient convex curve-shortening solution trapped in the
slab |x| < pi/2, satisfying cos x = e^t cosh y for t < 0.  This script
prints its extents, verifies the implicit equation at sampled points,
and shows the two asymptotic regimes: near extinction it rounds off like
a shrinking circle, and for t -> -infinity each edge converges to the
Grim reaper graph y = -log cos x (translated to the tip).

Run:  python demos/closed_forms.py
"""
import numpy as np

from slabflow.angenent_oval import (grim_height, oval_curvature, oval_extents,
                                    oval_point, oval_residual, sample_profile)
from slabflow.harness import edge_grim_gap


def main():
    print("extents of the oval:  h = width to the tip of the slab,")
    print("ell = half-height; the slab is |x| < pi/2 = %.6f" % (np.pi / 2))
    print()
    print(f"{'t':>8} {'h':>10} {'pi/2 - h':>10} {'ell':>10} "
          f"{'ell + t':>10} {'kappa(tip)':>11} {'kappa(pole)':>12}")
    for t in (-0.1, -0.5, -1.0, -2.0, -5.0, -10.0, -20.0):
        h, ell = oval_extents(t)
        ktip = oval_curvature(0.0, t)
        kpole = oval_curvature(np.pi / 2, t)
        print(f"{t:8.1f} {h:10.6f} {np.pi / 2 - h:10.3e} {ell:10.4f} "
              f"{ell + t:10.6f} {ktip:11.6f} {kpole:12.3e}")
    print()
    print("ell + t -> log 2 = %.6f: the tip outruns the line y = -t" %
          np.log(2.0))
    print("by exactly log 2 in the ancient limit.")
    print()

    rng = np.random.default_rng(0)
    theta = rng.uniform(0.0, 2 * np.pi, 100_000)
    t = rng.uniform(-30.0, -0.05, 100_000)
    res = np.max(np.abs(oval_residual(oval_point(theta, t), t)))
    print(f"implicit equation cos x = e^t cosh y at 100000 random points:")
    print(f"  max |residual| = {res:.2e}")
    print()

    print("near extinction the oval is asymptotically a circle of radius")
    print("sqrt(-2t); curvature spread max/min - 1:")
    for t in (-0.1, -0.01, -0.001):
        k = sample_profile(t, 256, 1).kappa
        print(f"  t = {t:7.3f}:  {k.max() / k.min() - 1.0:.3e}")
    print()

    print("ancient limit: sup gap between the tip-translated edge and the")
    print("Grim reaper y = -log cos x, on |x| <= pi/2 - pi/8:")
    for t in (-2.0, -4.0, -6.0, -8.0, -10.0):
        gap = edge_grim_gap(sample_profile(t, 512, 1))
        print(f"  t = {t:5.1f}:  {gap:.3e}")
    print()
    print("the gap decays like e^{2t}: one extra unit of age buys ~e^2.")


if __name__ == "__main__":
    main()
