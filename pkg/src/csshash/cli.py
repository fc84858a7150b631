"""Command-line entry point: ``csshash <command> ...``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 failed check.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

import numpy as np

from . import channels
from .gf2 import BitMatrix, TooLarge
from .io import ParseError, read_css_state, read_mixture
from .permcliff import Separable, sampler_for, verify_permutation, NotPermutation, NotSymplectic
from .simulator import (
    MAX_EXHAUSTIVE_BITS,
    SURVIVAL_COLUMNS,
    BadSchedule,
    NoCandidate,
    SimConfig,
    copy_counts,
    make_schedule,
    prepare,
    run_protocol,
    survival_counts,
    survival_experiment,
    survival_rows,
    trial_rng,
    SurvivalStat,
    binomial_z,
)
from .stabilizer import NotCss, NotFullRank, css_canonicalize, is_separable
from .yieldlp import BadDimensions, baseline_yields, compute_yield, entropy, marginal_entropy

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CHECK = 0, 1, 2, 3
EXAMPLES = ("cat4", "css8", "bell")


class UsageError(Exception):
    pass


class CheckFailed(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def fmt(x) -> str:
    """Numbers for CSV: integers verbatim, floats with 12 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def write_csv(rows: Sequence[Sequence], header: Sequence[str], out) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])


def _emit_csv(path: str | None, rows, header) -> None:
    if path in (None, "-"):
        write_csv(rows, header, sys.stdout)
        return
    with open(path, "w", newline="") as f:
        write_csv(rows, header, f)


def workers() -> int:
    env = os.environ.get("CSSHASH_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"CSSHASH_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


# -- inputs -------------------------------------------------------------------

def _example(name: str, fidelity: float | None):
    if name == "cat4":
        F = 0.9 if fidelity is None else fidelity
        return channels.cat_state(4), channels.cat4_mixture(F)
    if name == "css8":
        return channels.example_8q()
    if name == "bell":
        F = 0.9 if fidelity is None else fidelity
        e = (1 - F) / 3
        return channels.bell_state(), channels.bell_mixture(F, e, e, e)
    raise UsageError(f"unknown example {name!r}")


def _check_fidelity(F: float | None) -> None:
    if F is not None and not 0 <= F <= 1:
        raise UsageError("--fidelity must lie in [0, 1]")


def load_state(args):
    if args.example:
        _check_fidelity(getattr(args, "fidelity", None))
        return _example(args.example, getattr(args, "fidelity", None))[0]
    if not args.state:
        raise UsageError("give --state FILE or --example NAME")
    return read_css_state(args.state)


def load_state_and_mixture(args):
    if args.example:
        _check_fidelity(args.fidelity)
        return _example(args.example, args.fidelity)
    if not (args.state and args.mixture):
        raise UsageError("give --state FILE and --mixture FILE, or --example NAME")
    return read_css_state(args.state), read_mixture(args.mixture)


def _source_flags(p: argparse.ArgumentParser, mixture: bool) -> None:
    p.add_argument("--state", metavar="FILE")
    if mixture:
        p.add_argument("--mixture", metavar="FILE")
    p.add_argument("--example", choices=EXAMPLES)
    p.add_argument("--fidelity", type=float, metavar="F", help="channel fidelity for cat4/bell")


# -- commands -----------------------------------------------------------------

def _matrix_line(m: BitMatrix) -> str:
    return " / ".join(" ".join(str(v) for v in row) for row in m.to_lists())


def cmd_canon(args) -> int:
    css = css_canonicalize(load_state(args))
    sep, split = is_separable(css)
    print(f"theta = {_matrix_line(css.theta)}")
    print(f"qubit_perm = {' '.join(str(q) for q in css.qubit_perm)}")
    print(f"orthogonal = {'yes' if css.orthogonal else 'no'}")
    verdict = "no" if not sep else f"yes ({' '.join(map(str, split[0]))} | {' '.join(map(str, split[1]))})"
    print(f"separable = {verdict}")
    return EXIT_OK


def cmd_yield(args) -> int:
    css, mix = load_state_and_mixture(args)
    res = compute_yield(css, mix)
    print(f"H = {res.H:.6f}")
    for (dz, dx), h in sorted(res.table.items()):
        print(f"H[{dz},{dx}] = {h:.6f}")
    print(f"m_z = {res.m_z:.6f}")
    print(f"m_x = {res.m_x:.6f}")
    print(f"gamma = {res.gamma:.4f}")
    print(f"active = {' '.join(f'({a},{b})' for a, b in res.active_constraints)}")
    for line in res.constraint_text():
        print(f"constraint: {line}")
    if args.grid_out:
        rows = [(dz, dx, h, res.H - h) for (dz, dx), h in sorted(res.table.items())]
        _emit_csv(args.grid_out, rows, ("d_z", "d_x", "H_dd", "rhs"))
    return EXIT_OK


def sweep_point(F: float) -> tuple[float, float, float, float]:
    """One row of the cat4 comparison: ``(F, ours, lo, man)`` clamped at 0."""
    css = channels.cat_state(4)
    mix = channels.cat4_mixture(F)
    ours = compute_yield(css, mix).gamma
    man, lo = baseline_yields(mix)
    return (F, max(0.0, ours), max(0.0, lo), max(0.0, man))


def sweep(F0: float, F1: float, steps: int, n_workers: int = 1) -> list[tuple[float, float, float, float]]:
    if not 0 <= F0 < F1 <= 1:
        raise UsageError("need 0 <= from < to <= 1")
    if steps < 2:
        raise UsageError("need at least 2 steps")
    Fs = [float(x) for x in np.linspace(F0, F1, steps)]
    if n_workers > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as ex:
            return list(ex.map(sweep_point, Fs))
    return [sweep_point(F) for F in Fs]


def cmd_sweep(args) -> int:
    if args.example != "cat4":
        raise UsageError("sweep is defined for --example cat4 only")
    rows = sweep(args.from_, args.to, args.steps, workers())
    _emit_csv(args.out, rows, ("F", "yield_ours", "yield_lo", "yield_man"))
    return EXIT_OK


def _parse_degrees(spec: str) -> list[tuple[int, int]]:
    out = []
    for item in spec.split(";"):
        item = item.strip()
        if not item:
            continue
        try:
            a, b = item.split(",")
            out.append((int(a), int(b)))
        except ValueError:
            raise UsageError(f"bad degree pair {item!r}; expected 'dz,dx'") from None
    return out


def simulate(cfg: SimConfig, css, mix, degrees: Sequence[tuple[int, int]]) -> list[SurvivalStat]:
    setup = prepare(css, mix)
    if cfg.pool == "planted":
        return survival_experiment(
            setup, None, cfg.k, cfg.m_z, cfg.m_x, cfg.trials, cfg.seed, degrees, cfg.decoys, cfg.mode, cfg.workers
        )
    nk = setup.n * cfg.k
    if nk > MAX_EXHAUSTIVE_BITS:
        raise TooLarge(f"exhaustive pool refused for nk={nk} > {MAX_EXHAUSTIVE_BITS}")
    # one full run first: the truth must survive against the whole space
    run = run_protocol(setup, None, cfg.k, cfg.m_z, cfg.m_x, None, trial_rng(cfg.seed, -2 % (1 << 63)), cfg.mode)
    if run.truth not in run.survivors:  # pragma: no cover
        raise CheckFailed("truth eliminated")
    deltas = list(range(1, 1 << nk))
    schedule = make_schedule(cfg.k, cfg.m_z, cfg.m_x)
    nz, nx = copy_counts(cfg.k, cfg.m_z, cfg.m_x)
    counts = survival_counts(setup, cfg.k, schedule, deltas, cfg.trials, cfg.seed, cfg.mode, cfg.workers)
    bins: dict[tuple[int, int], list[int]] = {(0, 0): [cfg.trials]}
    for d, c in zip(deltas, counts.tolist()):
        bins.setdefault(setup.degrees(cfg.k, d), []).append(c)
    out = []
    for (dz, dx), cs in sorted(bins.items()):
        t = cfg.trials * len(cs)
        s = sum(cs)
        pred = 2.0 ** -(dz * nz + dx * nx)
        out.append(SurvivalStat(dz, dx, t, s, pred, binomial_z(s, t, pred), float("nan"), float("nan")))
    return out


def cmd_simulate(args) -> int:
    css, mix = load_state_and_mixture(args)
    if args.copies < 1 or args.trials < 1:
        raise UsageError("--copies and --trials must be positive")
    env = os.environ.get("CSSHASH_THREADS")
    cfg = SimConfig(
        args.copies, args.mz, args.mx, args.trials, args.seed, args.mode, args.pool, args.decoys,
        int(env) if env else 1,
    )
    stats_ = simulate(cfg, css, mix, _parse_degrees(args.degrees))
    _emit_csv(args.out, survival_rows(stats_), SURVIVAL_COLUMNS)
    if args.max_z is not None:
        bad = [s for s in stats_ if abs(s.z_score) > args.max_z]
        if bad:
            for s in bad:
                print(f"bin ({s.d_z},{s.d_x}): z = {s.z_score:.3f} exceeds {args.max_z}", file=sys.stderr)
            raise CheckFailed("survival rates off the predicted law")
    return EXIT_OK


def cmd_check_perm(args) -> int:
    css = css_canonicalize(load_state(args))
    _, sample = sampler_for(css)
    ok = 0
    for t in range(args.samples):
        pc = sample(args.copies, trial_rng(args.seed, t))
        try:
            verify_permutation(pc, css)
            ok += 1
        except (NotPermutation, NotSymplectic) as e:
            print(f"sample {t}: {e}", file=sys.stderr)
    print(f"{ok}/{args.samples} verified")
    if ok != args.samples:
        raise CheckFailed("some samples failed verification")
    return EXIT_OK


def cmd_entropy(args) -> int:
    if args.example:
        _check_fidelity(args.fidelity)
        mix = _example(args.example, args.fidelity)[1]
    elif args.mixture:
        mix = read_mixture(args.mixture)
    else:
        raise UsageError("give --mixture FILE or --example NAME")
    print(f"H = {entropy(mix):.6f}")
    for j in range(mix.n):
        print(f"H(b_{j + 1}) = {marginal_entropy(mix, [j]):.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="csshash", description="Hashing yields and protocol simulation for CSS states.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("canon", help="canonical form of a CSS state")
    _source_flags(c, mixture=False)
    c.set_defaults(func=cmd_canon)

    y = sub.add_parser("yield", help="solve the yield LP")
    _source_flags(y, mixture=True)
    y.add_argument("--grid-out", metavar="CSV")
    y.set_defaults(func=cmd_yield)

    s = sub.add_parser("sweep", help="yield comparison over a fidelity range")
    s.add_argument("--example", choices=("cat4",), required=True)
    s.add_argument("--from", dest="from_", type=float, default=0.8)
    s.add_argument("--to", type=float, default=1.0)
    s.add_argument("--steps", type=int, default=50)
    s.add_argument("--out", metavar="CSV")
    s.set_defaults(func=cmd_sweep)

    m = sub.add_parser("simulate", help="Monte Carlo survival statistics")
    _source_flags(m, mixture=True)
    m.add_argument("--copies", type=int, required=True, metavar="K")
    m.add_argument("--mz", type=float, required=True)
    m.add_argument("--mx", type=float, required=True)
    m.add_argument("--trials", type=int, default=1000)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--mode", choices=("overall", "stepwise"), default="overall")
    m.add_argument("--pool", choices=("exhaustive", "planted"), default="planted")
    m.add_argument("--degrees", default="0,0;0,1;1,1", help="planted degree pairs 'dz,dx;dz,dx'")
    m.add_argument("--decoys", type=int, default=0)
    m.add_argument("--max-z", type=float, default=None, help="fail (exit 3) if any |z| exceeds this")
    m.add_argument("--out", metavar="CSV")
    m.set_defaults(func=cmd_simulate)

    k = sub.add_parser("check-perm", help="verify sampled permutation Cliffords")
    _source_flags(k, mixture=False)
    k.add_argument("--copies", type=int, default=2, metavar="K")
    k.add_argument("--samples", type=int, default=100)
    k.add_argument("--seed", type=int, default=0)
    k.set_defaults(func=cmd_check_perm)

    e = sub.add_parser("entropy", help="entropies of a mixture")
    e.add_argument("--mixture", metavar="FILE")
    e.add_argument("--example", choices=EXAMPLES)
    e.add_argument("--fidelity", type=float, metavar="F")
    e.set_defaults(func=cmd_entropy)
    return p


DATA_ERRORS = (
    ParseError, NotCss, NotFullRank, Separable, BadDimensions, TooLarge, BadSchedule, NoCandidate, OSError, ValueError,
)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"csshash: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CheckFailed as e:
        print(f"csshash: check failed: {e}", file=sys.stderr)
        return EXIT_CHECK
    except DATA_ERRORS as e:
        print(f"csshash: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
