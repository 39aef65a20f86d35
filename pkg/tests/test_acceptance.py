"""Acceptance checks, one per criterion.

Each check returns ``(passed, detail)``. Under pytest the lines are printed in
the terminal summary; ``python tests/test_acceptance.py`` prints them directly.
"""

import csv
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest
from conftest import ACCEPTANCE_LINES

from seqdisc.cli import main as cli_main
from seqdisc.discrimination import (
    Protocol,
    check_range_condition,
    helstrom_bound,
    helstrom_projectors,
    indirect_realization_for_optimal,
    multi_state_upper_bound,
    optimal_two_state_protocol,
    range_condition_protocol,
    rotated_kraus,
    success_chain,
    success_direct,
    success_product,
)
from seqdisc.errors import ConditionNotSatisfied
from seqdisc.instruments import instrument_from_realization, luders_from_projectors
from seqdisc.noisy_opt import (
    first_stage_success,
    noisy_success,
    noisy_upper_bound,
    one_receiver_depolarizing_optimum,
    second_stage_norm_sum,
    two_seq_depolarizing_closed,
    two_seq_depolarizing_numeric,
)
from seqdisc.sampling import (
    ginibre,
    random_channel,
    random_ensemble,
    random_instrument,
    random_projective_instrument,
    random_projector_pair,
    random_unitary,
)

CRITERIA = {}


def criterion(number, title):
    def register(fn):
        CRITERIA[number] = (title, fn)
        return fn

    return register


def random_protocol(rng, noisy=False):
    n, r, d = int(rng.integers(1, 5)), int(rng.integers(2, 4)), int(rng.integers(2, 5))
    make = random_projective_instrument if rng.uniform() < 0.3 else random_instrument
    receivers = tuple(make(d, r, rng) for _ in range(n))
    channels = tuple(random_channel(d, rng) for _ in range(n)) if noisy else None
    return Protocol(receivers, channels), random_ensemble(r, d, rng)


def both_parts_nonzero(e):
    return all(np.trace(p).real > 0.5 for p in helstrom_projectors(e))


def matrix_units(d):
    for i in range(d):
        for j in range(d):
            t = np.zeros((d, d))
            t[i, j] = 1
            yield t


@criterion(1, "representation equivalence")
def check_representations():
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(500):
        p, e = random_protocol(rng)
        values = (success_direct(p, e), success_chain(p, e), success_product(p, e).success_probability)
        worst = max(worst, max(values) - min(values))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 30
    return ok, f"max deviation {worst:.2e} over 500 protocols in {elapsed:.1f} s"


@criterion(2, "Helstrom saturation for N = 1..5")
def check_saturation():
    rng = np.random.default_rng(202)
    worst_proj = worst_rot = 0.0
    rotated = 0
    for k in range(200):
        d = 2 if k < 100 else 3
        e = random_ensemble(2, d, rng)
        bound = helstrom_bound(e)
        phi = random_unitary(d, rng) if both_parts_nonzero(e) else None
        rotated += phi is not None
        for n in range(1, 6):
            worst_proj = max(worst_proj, abs(success_direct(optimal_two_state_protocol(e, n), e) - bound))
            if phi is not None:
                s = success_direct(optimal_two_state_protocol(e, n, "rotated", phi), e)
                worst_rot = max(worst_rot, abs(s - bound))
    ok = max(worst_proj, worst_rot) <= 1e-10 and rotated > 0
    return ok, f"projective {worst_proj:.2e}, rotated {worst_rot:.2e} ({rotated} of 200 ensembles eligible)"


@criterion(3, "condition path for rotated Kraus pairs")
def check_condition_path():
    rng = np.random.default_rng(303)
    worst_cond = worst_spread = 0.0
    accepted = rejected = 0
    while accepted < 100:
        d = int(rng.integers(2, 4))
        e = random_ensemble(2, d, rng)
        if not both_parts_nonzero(e):
            continue
        kraus, projs = rotated_kraus(e, random_unitary(d, rng))
        worst_cond = max(worst_cond, check_range_condition(kraus, projs))
        values = [success_direct(range_condition_protocol(kraus, projs, n), e) for n in range(1, 5)]
        worst_spread = max(worst_spread, max(values) - min(values))
        accepted += 1
        noise = ginibre(d, d, rng)
        perturbed = [kraus[0] + 1e-3 * noise / np.linalg.norm(noise, 2), kraus[1]]
        try:
            check_range_condition(perturbed, projs)
        except ConditionNotSatisfied:
            rejected += 1
    ok = worst_cond <= 1e-10 and worst_spread <= 1e-10 and rejected == accepted
    return ok, (
        f"condition residual {worst_cond:.2e}, N-spread {worst_spread:.2e}, "
        f"{rejected}/{accepted} perturbations rejected"
    )


@criterion(4, "indirect realization reproduces Luders instrument")
def check_dilation():
    rng = np.random.default_rng(404)
    worst = 0.0
    for k in range(100):
        d = int(rng.integers(1, 5))
        p0 = random_projector_pair(d, rng)
        b = None
        if k % 2:
            b = ginibre(2, 1, rng)[:, 0]
            b = b / np.linalg.norm(b)
        m = instrument_from_realization(indirect_realization_for_optimal(p0, b))
        target = luders_from_projectors(p0)
        for t in matrix_units(d):
            for w in (1, 2):
                worst = max(worst, np.abs(m.apply(w, t) - target.apply(w, t)).max())
    return worst <= 1e-12, f"max entrywise difference {worst:.2e} over 100 projector pairs"


@criterion(5, "numeric versus closed-form two-receiver optimum")
def check_cross_validation():
    rng = np.random.default_rng(505)
    worst_full = worst_grid = 0.0
    ordered = True
    for _ in range(300):
        e = random_ensemble(2, 2, rng)
        g1, g2 = rng.uniform(size=2)
        closed = two_seq_depolarizing_closed(e, g1, g2)
        full = two_seq_depolarizing_numeric(e, g1, g2)
        grid = two_seq_depolarizing_numeric(e, g1, g2, include_analytic=False)
        worst_full = max(worst_full, abs(full.value - closed.value))
        worst_grid = max(worst_grid, abs(grid.value - closed.value))
        ordered &= closed.gamma2_1 >= closed.gamma2_2
    ok = worst_full <= 1e-9 and worst_grid <= 5e-4 and ordered
    return ok, f"with analytic candidates {worst_full:.2e}, grid only {worst_grid:.2e}, thresholds ordered: {ordered}"


def read_panels(path):
    with open(path, newline="") as fh:
        rows = [[float(x) for x in row] for row in list(csv.reader(fh))[1:]]
    panels = {}
    for row in rows:
        panels.setdefault(row[0], []).append(row[1:])
    return {q: np.array(v) for q, v in panels.items()}


@criterion(6, "figure reproduction")
def check_figures():
    problems = []
    with tempfile.TemporaryDirectory() as tmp:
        code = cli_main(["reproduce-figures", "--out", tmp])
        if code != 0:
            return False, f"reproduce-figures exited with {code}"
        figs = {name: read_panels(Path(tmp) / f"{name}.csv") for name in ("fig1", "fig2")}
    start_values = {("fig1", 0.5): 0.65, ("fig2", 0.5): 0.5 + 0.5 * np.linalg.norm([0.2, 0.3, -0.375])}
    for name, panels in figs.items():
        for q1, a in panels.items():
            gamma, hel, n1, n2c, n2n = a.T
            tag = f"{name} q1={q1}"
            if len(gamma) != 201:
                problems.append(f"{tag}: {len(gamma)} samples")
            if (name, q1) in start_values and np.abs(a[0, 1:] - start_values[name, q1]).max() > 1e-9:
                problems.append(f"{tag}: gamma=0 row {a[0, 1:]}")
            if np.abs(a[0, 1:] - a[0, 1]).max() > 1e-9:
                problems.append(f"{tag}: gamma=0 columns disagree")
            if abs(n1[-1] - max(q1, 1 - q1)) > 1e-12 or abs(n2c[-1] - max(q1, 1 - q1)) > 1e-12:
                problems.append(f"{tag}: no plateau at max prior")
            for col, label in ((n1, "N1"), (n2c, "N2 closed"), (n2n, "N2 numeric")):
                if np.any(np.diff(col) > 1e-12):
                    problems.append(f"{tag}: {label} increases")
            if np.any(n2c > n1 + 1e-12) or np.any(n1 > hel + 1e-12):
                problems.append(f"{tag}: ordering N2 <= N1 <= Helstrom fails")
            if np.abs(n2n - n2c).max() > 1e-9:
                problems.append(f"{tag}: numeric differs from closed form")
            if a[:, 1:].min() < 0 or a[:, 1:].max() > 1:
                problems.append(f"{tag}: value outside [0, 1]")
    detail = "; ".join(problems) if problems else "gamma=0 values 0.65 and 0.760108..., plateaus, monotone and ordered curves"
    return not problems, detail


@criterion(7, "bound suite")
def check_bounds():
    rng = np.random.default_rng(707)
    worst_plain = worst_noisy = worst_stage = -np.inf
    for _ in range(200):
        p, e = random_protocol(rng)
        worst_plain = max(worst_plain, success_direct(p, e) - multi_state_upper_bound(e))
        p, e = random_protocol(rng, noisy=True)
        worst_noisy = max(worst_noisy, noisy_success(p, e) - noisy_upper_bound(e, p.channels[0]))
        r, d = e.r, e.dim
        l1, l2 = random_channel(d, rng), random_channel(d, rng)
        m1 = random_instrument(d, r, rng)
        gap = second_stage_norm_sum(e, l1, l2, m1) - (r - 1) * first_stage_success(e, l1, m1)
        worst_stage = max(worst_stage, gap)
    ok = max(worst_plain, worst_noisy, worst_stage) <= 1e-10
    return ok, (
        f"largest excess over bound: noiseless {worst_plain:.2e}, noisy {worst_noisy:.2e}, "
        f"second stage {worst_stage:.2e} (200 samples each)"
    )


@criterion(8, "noiseless second channel limit")
def check_noiseless_limit():
    rng = np.random.default_rng(808)
    worst = 0.0
    for _ in range(100):
        e = random_ensemble(2, 2, rng)
        g1 = rng.uniform()
        worst = max(worst, abs(two_seq_depolarizing_closed(e, g1, 0.0).value - one_receiver_depolarizing_optimum(e, g1)))
    return worst <= 1e-12, f"max difference {worst:.2e} over 100 ensembles"


def run(number):
    title, fn = CRITERIA[number]
    ok, detail = fn()
    return ok, f"[{'PASS' if ok else 'FAIL'}] criterion {number} ({title}): {detail}"


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_acceptance(number):
    ok, line = run(number)
    ACCEPTANCE_LINES[number] = line
    print(line)
    assert ok, line


if __name__ == "__main__":
    results = [run(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
