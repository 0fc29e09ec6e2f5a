"""Exact classification / adversarial risk versus n for several q (regular grid)."""
import argparse
from dataclasses import dataclass

from liftadv.xprun import emit, sweep_over_n


@dataclass
class Config:
    p: float = 2.0
    qs: tuple = (0.5, 1.45, 1.75, 2.5)
    ns: tuple = (8, 16, 30, 64, 128, 256)
    eps_rule: str = "1/n"
    out: str = "results/error_vs_n"
    workers: int = 1


def main(cfg: Config) -> None:
    rows = []
    for q in cfg.qs:
        recs = sweep_over_n(p=cfg.p, q=q, ns=cfg.ns, eps_rule=cfg.eps_rule, workers=cfg.workers)
        rows.extend(recs)
        for r in recs:
            print(f"q={q:<5} n={r.n:<4} B={r.B:<6} C={r.classification:.4f} "
                  f"Cadv={r.adversarial:.3f} status={r.status}")
    emit(rows, "csv", f"{cfg.out}.csv")
    for q in cfg.qs:
        emit([r for r in rows if r.q == q], "svg", f"{cfg.out}_q{q}.svg", x="n",
             metrics=("classification", "adversarial"))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=Config.out)
    ap.add_argument("--workers", type=int, default=1)
    a = ap.parse_args()
    main(Config(out=a.out, workers=a.workers))
