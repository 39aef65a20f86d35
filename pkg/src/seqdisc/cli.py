"""Command-line front end: reports, noisy sweeps and figure data as CSV.

Exit codes: 0 ok, 2 configuration error, 3 numerical domain error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import io
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import RunConfig, receiver_spec
from .discrimination import (
    helstrom_bound,
    helstrom_projectors,
    multi_state_upper_bound,
    optimal_two_state_protocol,
    success_chain,
    success_direct,
    success_product,
)
from .errors import ConfigError, SeqDiscError, ZeroProbabilityOutcome
from .instruments import posterior
from .noisy_opt import (
    DEFAULT_GRID,
    noisy_upper_bound,
    one_receiver_depolarizing_optimum,
    two_seq_depolarizing_closed,
    two_seq_depolarizing_numeric,
)
from .states import Ensemble

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

SWEEP_COLUMNS = ("gamma", "helstrom", "p_opt_N1", "p_opt_N2_closed", "p_opt_N2_numeric")

FIGURE_BLOCH = {
    "fig1": ((0.3, 0.3, 0.3), (0.3, 0.3, -0.3)),
    "fig2": ((0.2, 0.3, -0.4), (-0.2, -0.3, 0.35)),
}
FIGURE_PRIORS = ((0.5, 0.5), (0.55, 0.45))
FIGURE_STEPS = 201


def fmt(x: float) -> str:
    return f"{x:.15g}"


def _matrix_text(a) -> str:
    a = np.asarray(a)
    rows = []
    for row in a:
        cells = []
        for z in row:
            re, im = float(z.real), float(z.imag)
            cells.append(f"{re:+.6f}" if abs(im) < 5e-7 else f"{re:+.6f}{im:+.6f}j")
        rows.append("  [" + ", ".join(cells) + "]")
    return "\n".join(rows)


# --- sweeps ---------------------------------------------------------------


def sweep_row(e: Ensemble, gamma: float, grid: int = DEFAULT_GRID) -> tuple:
    """One sweep row with ``gamma1 = gamma2 = gamma``."""
    return (
        float(gamma),
        helstrom_bound(e),
        float(one_receiver_depolarizing_optimum(e, gamma)),
        two_seq_depolarizing_closed(e, gamma, gamma).value,
        two_seq_depolarizing_numeric(e, gamma, gamma, grid).value,
    )


def noisy_sweep(e: Ensemble, gammas, grid: int = DEFAULT_GRID, workers: int | None = None) -> list[tuple]:
    """Rows for each gamma, evaluated in parallel and returned in input order."""
    gammas = [float(g) for g in gammas]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda g: sweep_row(e, g, grid), gammas))


def gamma_grid(lo: float, hi: float, steps: int) -> np.ndarray:
    return np.array([lo]) if steps == 1 else np.linspace(lo, hi, steps)


def csv_text(rows, columns=SWEEP_COLUMNS) -> str:
    buf = io.StringIO(newline="")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(x) for x in row) + "\n")
    return buf.getvalue()


def figure_rows(name: str, steps: int = FIGURE_STEPS, grid: int = DEFAULT_GRID) -> list[tuple]:
    """Curves for both prior pairs of a figure; the first column is ``q1``."""
    gammas = gamma_grid(0.0, 1.0, steps)
    rows = []
    for q in FIGURE_PRIORS:
        e = Ensemble.from_bloch(FIGURE_BLOCH[name], q)
        rows.extend((q[0],) + row for row in noisy_sweep(e, gammas, grid))
    return rows


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", newline="\n") as fh:
        fh.write(text)


# --- commands -------------------------------------------------------------


def _load(args) -> RunConfig:
    if args.config is None:
        raise ConfigError("--config is required for this command")
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    return RunConfig.from_toml(text)


def _two_states(cfg: RunConfig) -> Ensemble:
    e = cfg.ensemble()
    if e.r != 2:
        raise ConfigError(f"ensemble: this command needs two states, got {e.r}")
    return e


def cmd_helstrom(args) -> int:
    cfg = _load(args)
    e = _two_states(cfg)
    bound = helstrom_bound(e)
    p1, p2 = helstrom_projectors(e)
    lines = [f"helstrom_bound = {fmt(bound)}", "P0(1) =", _matrix_text(p1), "P0(2) =", _matrix_text(p2)]
    for n in range(1, cfg.n_receivers + 1):
        s = success_direct(optimal_two_state_protocol(e, n), e)
        lines.append(f"N = {n}: success = {fmt(s)}  deviation = {abs(s - bound):.3e}")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _posterior_lines(p, e) -> list[str]:
    # explicit posterior chain; raises ZeroProbabilityOutcome on a vanishing branch
    lines = []
    for j, rho in enumerate(e.states, start=1):
        t = rho
        for n, m in enumerate(p.receivers):
            if p.channels is not None:
                t = p.channels[n].apply(t)
            t = posterior(m, j, t)
            lines.append(f"posterior j={j} after receiver {n + 1}:")
            lines.append(_matrix_text(t.matrix))
    return lines


def cmd_simulate(args) -> int:
    cfg = _load(args)
    rng = np.random.default_rng(args.seed)
    p, e = cfg.protocol(rng), cfg.ensemble()
    direct = success_direct(p, e)
    chain = success_chain(p, e)
    prod = success_product(p, e)
    values = (direct, chain, prod.success_probability)
    dev = max(abs(a - b) for a in values for b in values)
    lines = [
        f"success_direct = {fmt(direct)}",
        f"success_chain = {fmt(chain)}",
        f"success_product = {fmt(prod.success_probability)}",
        f"max_deviation = {dev:.3e}",
        "factors = " + ", ".join(fmt(f) for f in prod.per_receiver_factors),
    ]
    lines += [f"priors before receiver {n + 1} = " + ", ".join(fmt(q) for q in row) for n, row in enumerate(prod.updated_priors)]
    if p.noisy:
        lines.append(f"upper_bound = {fmt(noisy_upper_bound(e, p.channels[0]))}")
    elif e.r == 2:
        lines.append(f"helstrom_bound = {fmt(helstrom_bound(e))}")
    else:
        lines.append(f"upper_bound = {fmt(multi_state_upper_bound(e))}")
    if args.posteriors:
        lines += _posterior_lines(p, e)
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_optimal_protocol(args) -> int:
    cfg = _load(args)
    e = _two_states(cfg)
    data = cfg.to_dict()
    spec = data["protocol"]
    variant = spec.get("variant", "projective") if spec["kind"] == "optimal" else "projective"
    phi = None
    if variant == "rotated":
        phi = np.array([[complex(*z) for z in row] for row in spec["phi"]])
    p = optimal_two_state_protocol(e, cfg.n_receivers, variant, phi, cfg.channels())
    if args.out is not None:
        data["protocol"] = {"kind": "explicit", "receivers": [receiver_spec(m) for m in p.receivers]}
        _write(RunConfig.from_dict(data).to_toml(), args.out)
    lines = [f"variant = {variant}", f"helstrom_bound = {fmt(helstrom_bound(e))}"]
    for n, m in enumerate(p.receivers, start=1):
        for w in m.outcomes:
            for l, k in enumerate(m[w]):
                lines.append(f"receiver {n} outcome {w} kraus {l}:")
                lines.append(_matrix_text(k))
    lines.append(f"success = {fmt(success_direct(p, e))}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_noisy_sweep(args) -> int:
    cfg = _load(args)
    e = _two_states(cfg)
    if e.dim != 2:
        raise ConfigError("ensemble: noisy sweep is defined for qubit states")
    sw = cfg.sweep
    steps = args.steps if args.steps is not None else sw["steps"]
    grid = args.grid if args.grid is not None else sw["grid"]
    if steps < 1 or grid < 2:
        raise ConfigError("--steps must be >= 1 and --grid >= 2")
    rows = noisy_sweep(e, gamma_grid(sw["gamma_min"], sw["gamma_max"], steps), grid)
    _write(csv_text(rows), args.out)
    return EXIT_OK


def cmd_reproduce_figures(args) -> int:
    steps = args.steps if args.steps is not None else FIGURE_STEPS
    grid = args.grid if args.grid is not None else DEFAULT_GRID
    if steps < 2 or grid < 2:
        raise ConfigError("--steps and --grid must be >= 2")
    out = Path(args.out if args.out is not None else ".")
    out.mkdir(parents=True, exist_ok=True)
    for name in FIGURE_BLOCH:
        path = out / f"{name}.csv"
        _write(csv_text(figure_rows(name, steps, grid), ("q1",) + SWEEP_COLUMNS), str(path))
        print(path)
    return EXIT_OK


COMMANDS = {
    "helstrom": (cmd_helstrom, "Helstrom bound, optimal projectors and N-receiver check"),
    "simulate": (cmd_simulate, "success probability in all three representations"),
    "optimal-protocol": (cmd_optimal_protocol, "Kraus operators of the optimal two-state protocol"),
    "noisy-sweep": (cmd_noisy_sweep, "CSV of noisy optima over a gamma range"),
    "reproduce-figures": (cmd_reproduce_figures, "CSV curves for the two depolarizing examples"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seqdisc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", help="TOML run configuration")
        sp.add_argument("--out", help="output file (directory for reproduce-figures)")
        sp.add_argument("--grid", type=int, help="sphere grid size for the numeric maximizer")
        sp.add_argument("--steps", type=int, help="number of gamma samples")
        sp.add_argument("--seed", type=int, help="seed for random protocols")
        if name == "simulate":
            sp.add_argument("--posteriors", action="store_true", help="also print every posterior state")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = COMMANDS[args.command][0]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ZeroProbabilityOutcome as exc:
        print(f"zero-probability outcome: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SeqDiscError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
