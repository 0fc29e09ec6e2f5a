"""The a=0.13, b=0.0055, B=4930, n=30 learned function: crossings, k* and risks."""
import math

from liftadv.riskexact import (
    DirichletForm,
    adversarial_risk,
    classification_risk,
    find_zero_crossings,
    k_star_bounds,
    lobe_crossings,
)

A, B_COEF, B, N = 0.13, 0.0055, 4930, 30


def main() -> None:
    f = DirichletForm(A, B_COEF, (B - 1) / (2 * N), N)
    zs = find_zero_crossings(f)
    upper, pos = k_star_bounds(A, B_COEF, B, N)
    lobes = lobe_crossings(f)
    print(f"N_A = {f.N_A:.4f}, h = {f.h:.1f}, floor = {f.floor:.3e}")
    print(f"crossing intervals per period: {len(zs)}")
    for l, r in zs.intervals:
        print(f"  [{l:.6f}, {r:.6f}]  width {r - l:.3e}")
    print(f"crossing lobes {sorted(lobes)}; upper bound {upper:.3f} (ceil {math.ceil(upper)}); "
          f"lower-bound condition {pos}")
    print(f"classification risk {classification_risk(zs):.5f}")
    for eps in (1 / N, 2 / N, 2 * math.pi / f.h):
        print(f"adversarial risk at eps={eps:.5f}: {adversarial_risk(zs, eps):.4f}")


if __name__ == "__main__":
    main()
