"""Empirical survival rates of planted candidates against 2^-(d_z n_z + d_x n_x)."""

import argparse
from dataclasses import dataclass

from csshash.channels import cat4_mixture, cat_state
from csshash.simulator import survival_experiment


@dataclass
class SurvivalConfig:
    k: int = 12
    m_z: float = 1 / 3
    m_x: float = 1 / 3
    fidelity: float = 0.9
    trials: int = 10_000
    seed: int = 0
    decoys: int = 0
    workers: int | None = None


def main(cfg: SurvivalConfig) -> None:
    stats = survival_experiment(
        cat_state(4), cat4_mixture(cfg.fidelity), cfg.k, cfg.m_z, cfg.m_x, cfg.trials,
        seed=cfg.seed, degrees=((0, 0), (0, 1), (1, 1)), decoys=cfg.decoys, workers=cfg.workers,
    )
    print("d_z d_x  trials  survivals  rate      predicted  z")
    for s in stats:
        print(f"{s.d_z:3d} {s.d_x:3d} {s.trials:7d} {s.survivals:10d}  {s.rate:.5f}  {s.predicted:.5f}  {s.z_score:+.2f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--k", type=int, default=12)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--decoys", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    a = p.parse_args()
    main(SurvivalConfig(k=a.k, trials=a.trials, decoys=a.decoys, seed=a.seed))
