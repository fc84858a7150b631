"""Yield curves for the 4-qubit cat state under depolarizing noise."""

import argparse
import csv
from dataclasses import dataclass

from csshash.cli import fmt, sweep


@dataclass
class SweepConfig:
    f_min: float = 0.8
    f_max: float = 1.0
    steps: int = 50
    workers: int = 1
    out: str = "yield_sweep.csv"


def main(cfg: SweepConfig) -> None:
    rows = sweep(cfg.f_min, cfg.f_max, cfg.steps, cfg.workers)
    with open(cfg.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["F", "yield_ours", "yield_lo", "yield_man"])
        w.writerows([[fmt(v) for v in r] for r in rows])
    for F, ours, lo, man in rows[:: max(1, cfg.steps // 10)]:
        print(f"F={F:.4f}  ours={ours:.4f}  lo={lo:.4f}  man={man:.4f}")
    print(f"wrote {cfg.out}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="yield_sweep.csv")
    a = p.parse_args()
    main(SweepConfig(steps=a.steps, workers=a.workers, out=a.out))
