"""Failure frequency of full runs against typical decoys as k grows."""

from dataclasses import dataclass, field

from csshash.channels import cat4_mixture, cat_state
from csshash.simulator import failure_rate, prepare


@dataclass
class TrendConfig:
    ks: list[int] = field(default_factory=lambda: [8, 12, 16, 20])
    m_z: float = 0.25
    m_x: float = 0.3
    fidelity: float = 0.9
    trials: int = 200
    seed: int = 0


def main(cfg: TrendConfig) -> None:
    setup = prepare(cat_state(4), cat4_mixture(cfg.fidelity))
    for k in cfg.ks:
        print(f"k={k:3d}  failure rate={failure_rate(setup, k, cfg.m_z, cfg.m_x, cfg.trials, cfg.seed):.4f}")


if __name__ == "__main__":
    main(TrendConfig())
