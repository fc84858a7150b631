"""LP solution for the 8-qubit example, with the binding constraint rows."""

from dataclasses import dataclass

from csshash.channels import example_8q
from csshash.yieldlp import cnot_only_yield_8q, compute_yield, marginal_entropy, working_mixture


@dataclass
class EightQubitConfig:
    show_table: bool = True


def main(cfg: EightQubitConfig) -> None:
    css, mix = example_8q()
    res = compute_yield(css, mix)
    print(f"H = {res.H:.6f}   1 - H/4 = {1 - res.H / 4:.6f}")
    print(f"m_z = {res.m_z:.6f}  m_x = {res.m_x:.6f}  gamma = {res.gamma:.6f}")
    print(f"CNOT-only yield = {cnot_only_yield_8q(mix):.6f}")
    print(f"active rows: {res.active_constraints}")
    work = working_mixture(css, mix)
    print(f"H(b_1, b_5) = {marginal_entropy(work, [0, 4]):.6f}")
    if cfg.show_table:
        for line in res.constraint_text():
            print("  " + line)


if __name__ == "__main__":
    main(EightQubitConfig())
