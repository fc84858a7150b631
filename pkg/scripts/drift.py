"""Per-step conditional survival of one planted candidate."""

from dataclasses import dataclass

from csshash.channels import cat4_mixture, cat_state
from csshash.simulator import drift_check, make_schedule, prepare


@dataclass
class DriftConfig:
    k: int = 12
    m_z: float = 1 / 3
    m_x: float = 1 / 3
    trials: int = 5000
    seed: int = 88
    degrees: tuple[int, int] = (1, 1)
    basis: str = "z"


def main(cfg: DriftConfig) -> None:
    setup = prepare(cat_state(4), cat4_mixture(0.9))
    schedule = make_schedule(cfg.k, cfg.m_z, cfg.m_x)
    res = drift_check(setup, None, cfg.k, schedule, cfg.trials, seed=cfg.seed, degrees=cfg.degrees, basis=cfg.basis)
    for i, (b, a, s, r) in enumerate(zip(res.schedule, res.alive, res.survived, res.rates)):
        print(f"step {i:2d} {b}  alive={a:6d}  survived={s:6d}  rate={r:.4f}")
    print(f"chi2={res.chi2:.3f}  p={res.p_value:.4f}  flat={res.flat()}")


if __name__ == "__main__":
    main(DriftConfig())
