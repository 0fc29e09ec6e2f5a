"""Distances from misclassified test points to the nearest training point (Fourier vs RFS)."""
import argparse
from dataclasses import dataclass

from liftadv.xprun import emit, sweep_cdf


@dataclass
class Config:
    n: int = 30
    q: float = 1.45
    ds: tuple = (0, 60, 8192)
    seeds: tuple = (0, 1, 2, 3, 4)
    n_test: int = 100_000
    out: str = "results/cdf"
    workers: int = 1


def main(cfg: Config) -> None:
    recs = sweep_cdf(n=cfg.n, q=cfg.q, ds=cfg.ds, seeds=cfg.seeds, n_test=cfg.n_test,
                     workers=cfg.workers)
    emit(recs, "csv", f"{cfg.out}.csv")
    for r in recs:
        label = "fourier" if not r.d else f"rfs d={r.d}"
        print(f"{label:<14} seed={r.seed} within 0.5/n: {r.within_half:.3f} "
              f"KS to fourier: {r.ks_to_fourier:.3f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default=Config.out)
    a = ap.parse_args()
    main(Config(workers=a.workers, out=a.out))
