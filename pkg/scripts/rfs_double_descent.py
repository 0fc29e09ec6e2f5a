"""Random-Fourier-sum models versus width d: double descent and convergence to the Fourier solution."""
import argparse
from dataclasses import dataclass

import numpy as np

from liftadv.xprun import emit, sweep_over_d
from liftadv.xprun.records import aggregate
from liftadv.xprun.sweeps import DEFAULT_D


@dataclass
class Config:
    n: int = 8
    q: float = 1.45
    ds: tuple = DEFAULT_D
    seeds: int = 20
    n_test: int = 20_000
    out: str = "results/rfs_dd"
    workers: int = 1


def main(cfg: Config) -> None:
    recs = sweep_over_d(n=cfg.n, q=cfg.q, ds=cfg.ds, seeds=tuple(range(cfg.seeds)),
                        n_test=cfg.n_test, workers=cfg.workers)
    emit(recs, "csv", f"{cfg.out}.csv")
    emit(recs, "svg", f"{cfg.out}.svg", x="d", metrics=("classification", "adversarial"))
    emit(recs, "svg", f"{cfg.out}_alpha.svg", x="d", metrics=("alpha_err",))
    xs, c = aggregate(recs, "d", "classification")
    _, adv = aggregate(recs, "d", "adversarial")
    _, err = aggregate(recs, "d", "alpha_err")
    print(f"{'d':>6} {'C med':>8} {'Cadv med':>9} {'|a_eff-a|':>10}")
    for row in zip(xs, c, adv, err):
        print(f"{int(row[0]):>6} {row[1]:8.4f} {row[2]:9.3f} {row[3]:10.4f}")
    big = xs >= 128
    slope = np.polyfit(np.log(xs[big]), np.log(err[big]), 1)[0]
    print(f"log-log slope of median coefficient error for d >= 128: {slope:.3f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default=Config.out)
    a = ap.parse_args()
    main(Config(seeds=a.seeds, workers=a.workers, out=a.out))
