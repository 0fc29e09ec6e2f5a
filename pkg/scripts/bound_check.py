"""Exact risks against the closed-form bounds over the (n, q) grid."""
import math

from liftadv.featurelift import build_ensemble
from liftadv.riskexact import (
    DirichletForm,
    adversarial_risk,
    classification_risk,
    find_zero_crossings,
    risk_bounds,
)
from liftadv.xprun.sweeps import DEFAULT_N, DEFAULT_Q


def main() -> None:
    print(f"{'n':>4} {'q':>5} {'C':>8} {'bound':>8} {'Cadv':>7} {'bound':>8}")
    for n in DEFAULT_N:
        for q in DEFAULT_Q:
            ens = build_ensemble(n, 2.0, q)
            f = DirichletForm.from_ensemble(ens)
            zs = find_zero_crossings(f)
            cb, ab, _ = risk_bounds(f.a, f.b, ens.B, n)
            c, adv = classification_risk(zs), adversarial_risk(zs, 2 * math.pi / f.h)
            flag = "" if adv <= ab else "  <- adversarial bound exceeded"
            print(f"{n:>4} {q:>5} {c:8.4f} {cb:8.4f} {adv:7.3f} {ab:8.4f}{flag}")


if __name__ == "__main__":
    main()
