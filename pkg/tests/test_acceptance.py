"""Acceptance checks; each prints one PASS/FAIL line with the worst deviation."""

import io
import math
import os
import time

import numpy as np
import pytest

from twostage.cli import run
from twostage.design import Design, Rates
from twostage.duration import duration_pmf
from twostage.oc import early_stop_prob, reject_prob, rejection_table
from twostage.probability import binom_cdf_lt, binom_pmf_vector, binom_tail_ge
from twostage.search import simon_designs
from twostage.simulate import SimConfig, simulate
from twostage.tables import design_table, duration_table

from oracles import joint_outcomes, reject_by_enumeration, simon_double_sum

# printed reference values: exact alpha, expected-size bound, early stop, power
TABLE2 = {
    "A": ((31, 5, 28, 5), 0.09997, 31.54, 0.893, 0.107),
    "B": ((9, 27, 9, 7), 0.0898, 12.62, 0.866, 0.134),
    "C": ((32, 4, 29, 0), 0.0931, 32.37, 0.907, 0.093),
    "D": ((18, 18, 17, 0), 0.0991, 19.78, 0.901, 0.099),
    "E": ((5, 31, 3, 11), 0.0858, 34.20, 0.058, 0.861),
    "F": ((8, 28, 5, 11), 0.0862, 34.42, 0.056, 0.863),
    "G": ((11, 25, 7, 11), 0.0868, 34.74, 0.050, 0.869),
    "H": ((12, 24, 8, 11), 0.0858, 34.26, 0.073, 0.851),
    "X": ((0, 36, 0, 11), 0.0889, 36.0, 0.0, 0.910),
}
TABLE3 = {"E": (3.63, 0.73), "F": (6.11, 1.00), "G": (8.60, 1.23), "H": (9.76, 1.26)}
SIMON = {"optimal": (0.0948, 26.02, 0.549, 0.903), "minimax": (0.0861, 28.26, 0.455, 0.902)}


def report(capsys, number, title, failures, detail=""):
    status = "PASS" if not failures else "FAIL"
    with capsys.disabled():
        print(f"\n[acceptance {number}] {status}: {title}" + (f" ({detail})" if detail else ""))
        for line in failures[:10]:
            print(f"    {line}")
    assert not failures, "; ".join(failures[:10])


def check(failures, name, got, expected, tol):
    if not abs(got - expected) <= tol:
        failures.append(f"{name}: got {got:.6f}, expected {expected} +/- {tol}")
    return abs(got - expected)


def test_criterion_1_design_table(capsys):
    start = time.perf_counter()
    rows = {r.label: r for r in design_table()}
    elapsed = time.perf_counter() - start
    failures, worst = [], 0.0
    for label, (params, alpha, ess, pet, power) in TABLE2.items():
        row = rows[label]
        d = row.design
        if (d.n1, d.n2, d.r1, d.r2) != params:
            failures.append(f"{label}: design {(d.n1, d.n2, d.r1, d.r2)} != {params}")
        worst = max(worst,
                    check(failures, f"{label} alpha", row.exact_alpha, alpha, 5e-4),
                    check(failures, f"{label} early stop", row.early_stop_prob, pet, 5e-4),
                    check(failures, f"{label} power", row.power_alt, power, 5e-4))
        check(failures, f"{label} expected size", row.ess_bound, ess, 5e-3)
    if elapsed >= 10:
        failures.append(f"runtime {elapsed:.2f}s >= 10s")
    report(capsys, 1, "design table rows A-H and X", failures,
           f"{elapsed:.2f}s, worst probability deviation {worst:.2e}")


def test_criterion_2_duration_table(capsys):
    start = time.perf_counter()
    table = {label: (mean, sd) for label, _, _, mean, sd in duration_table(design_table())}
    failures = []
    for label, (mean, sd) in TABLE3.items():
        check(failures, f"{label} mean", table[label][0], mean, 5e-3)
        check(failures, f"{label} sd", table[label][1], sd, 5e-3)
    report(capsys, 2, "Stage-1 duration moments E-H", failures,
           f"{time.perf_counter() - start:.2f}s including the design search")


def test_criterion_3_simon_rows(capsys):
    result = simon_designs(0.2, 0.4, 0.1, 0.9, 50)
    failures = []
    for name, rd in (("optimal", result.optimal), ("minimax", result.minimax)):
        alpha, ess, pet, power = SIMON[name]
        check(failures, f"{name} alpha", rd.oc_null.reject_prob, alpha, 1e-3)
        check(failures, f"{name} expected size", rd.oc_null.ess_bound, ess, 1e-3)
        check(failures, f"{name} early stop", rd.oc_null.early_stop_prob, pet, 1e-3)
        check(failures, f"{name} power", rd.oc_alt.reject_prob, power, 1e-3)
    d_opt, d_mm = result.optimal.design, result.minimax.design
    report(capsys, 3, "Simon optimal and minimax rows", failures,
           f"found n1/n/r1/r2 {d_opt.n1}/{d_opt.n}/{d_opt.r1}/{d_opt.r2} and "
           f"{d_mm.n1}/{d_mm.n}/{d_mm.r1}/{d_mm.r2}")


RATE_GRID = [0.0, 0.25, 0.5, 0.75, 1.0]

MC_CONFIGS = [
    (Design(5, 31, 3, 11), Rates(0.8, 0.2)),
    (Design(5, 31, 3, 11), Rates(0.8, 0.4)),
    (Design(8, 28, 5, 11), Rates(0.8, 0.2)),
    (Design(8, 28, 5, 11), Rates(0.8, 0.4)),
    (Design(11, 25, 7, 11), Rates(0.8, 0.3)),
    (Design(12, 24, 8, 11), Rates(0.8, 0.2)),
    (Design(12, 24, 8, 11), Rates(0.7, 0.35)),
    (Design(31, 5, 28, 5), Rates(0.8, 0.4)),
    (Design(9, 27, 9, 7), Rates(0.9, 0.3)),
    (Design(32, 4, 29, 0), Rates(0.85, 0.5)),
    (Design(18, 18, 17, 0), Rates(0.95, 0.6)),
    (Design(17, 20, 4, 11), Rates(0.2, 0.2)),
    (Design(19, 17, 4, 11), Rates(0.4, 0.4)),
    (Design(4, 6, 2, 4), Rates(0.6, 0.45)),
    (Design(6, 3, 4, 3), Rates(0.5, 0.1)),
    (Design(3, 8, 1, 3), Rates(0.35, 0.3)),
    (Design(10, 10, 6, 8), Rates(0.65, 0.4)),
    (Design(7, 7, 3, 5), Rates(0.55, 0.15)),
    (Design(2, 12, 2, 6), Rates(0.9, 0.5)),
    (Design(15, 15, 10, 12), Rates(0.75, 0.45)),
    (Design(20, 40, 12, 18), Rates(0.7, 0.3)),
    (Design(1, 9, 1, 2), Rates(0.5, 0.25)),
]


def test_criterion_4_oracle_equivalence(capsys):
    failures, cases, worst = [], 0, 0.0
    for n1 in range(9):
        for n2 in range(9):
            for p1 in RATE_GRID:
                for p2 in (p for p in RATE_GRID if p <= p1):
                    joint = joint_outcomes(n1, n2, p1, p2)
                    table = rejection_table(n1, n2, Rates(p1, p2))
                    for r1 in range(n1 + 1):
                        for r2 in range(n1 + n2 + 1):
                            expected = reject_by_enumeration(n1, n2, r1, r2, p1, p2, joint)
                            got = reject_prob(Design(n1, n2, r1, r2), Rates(p1, p2))
                            err = max(abs(got - expected), abs(table[r1, r2] - expected))
                            worst = max(worst, err)
                            cases += 1
                            if err > 1e-10:
                                failures.append(f"({n1},{n2},{r1},{r2}) at ({p1},{p2}): {err:.2e}")

    z_max = 0.0
    for i, (design, rates) in enumerate(MC_CONFIGS):
        exact = reject_prob(design, rates)
        assert 0.001 < exact < 0.999, "configuration should not be degenerate"
        est = simulate(SimConfig(design, rates, 1_000_000, seed=1000 + i)).est_reject_prob
        z = abs(est.mean - exact) / est.se
        z_max = max(z_max, z)
        if z > 4:
            failures.append(f"Monte Carlo {design} {rates}: {z:.2f} SE")
    report(capsys, 4, "engine vs enumeration and Monte Carlo", failures,
           f"{cases} enumerated cases, worst {worst:.1e}; {len(MC_CONFIGS)} simulated, max {z_max:.2f} SE")


def _invariant_failures():
    failures = []
    grid = np.linspace(0, 1, 41)
    for n in (0, 1, 7, 36, 150):
        for p in grid:
            w = binom_pmf_vector(n, p)
            if abs(math.fsum(w) - 1) > 1e-12:
                failures.append(f"pmf normalization n={n} p={p}")
            for r in range(n + 2):
                if abs(binom_cdf_lt(n, r, p) + binom_tail_ge(n, r, p) - 1) > 1e-12:
                    failures.append(f"cdf/tail n={n} r={r} p={p}")

    designs = [Design(*TABLE2[k][0]) for k in TABLE2] + [Design(17, 20, 4, 11), Design(3, 3, 2, 4)]
    for d in designs:
        pet = [early_stop_prob(d, p) for p in grid]
        if any(b > a + 1e-15 for a, b in zip(pet, pet[1:])):
            failures.append(f"early stop not monotone for {d}")
        for p1 in grid:
            power = [reject_prob(d, Rates(p1, min(p2, p1))) for p2 in grid if p2 <= p1]
            if any(v > 1 - early_stop_prob(d, p1) + 1e-12 for v in power):
                failures.append(f"power bound {d} p1={p1}")
            if any(b < a - 1e-12 for a, b in zip(power, power[1:])):
                failures.append(f"power not monotone {d} p1={p1}")
            d0 = Design(d.n1, d.n2, 0, d.r2)
            for p2 in (p for p in grid[::8] if p <= p1):
                if abs(reject_prob(d0, Rates(p1, p2)) - binom_tail_ge(d0.n, d0.r2, p2)) > 1e-10:
                    failures.append(f"r1 = 0 collapse {d0} ({p1}, {p2})")
        for p in grid[::4]:
            if abs(reject_prob(d, Rates(p, p)) - simon_double_sum(d.n1, d.n2, d.r1, d.r2, p)) > 1e-10:
                failures.append(f"Simon equivalence {d} p={p}")

    for s in range(1, 13):
        for t in range(1, 13):
            for p in (0.0, 0.2, 0.5, 0.8, 1.0):
                a = duration_pmf(s, t, p)
                b = duration_pmf(t, s, 1 - p)
                if list(a.pmf) != list(range(min(s, t), s + t)):
                    failures.append(f"duration support ({s},{t})")
                if abs(math.fsum(a.pmf.values()) - 1) > 1e-12:
                    failures.append(f"duration normalization ({s},{t},{p})")
                if any(abs(a.pmf[y] - b.pmf[y]) > 1e-12 for y in a.pmf):
                    failures.append(f"duration symmetry ({s},{t},{p})")
    return failures


def test_criterion_5_invariants(capsys):
    report(capsys, 5, "invariant suite", _invariant_failures())


def _cli(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, stdout=out, stderr=err)
    return code, out.getvalue()


def test_criterion_6_determinism(capsys):
    failures = []
    many = max(2, min(8, os.cpu_count() or 1))
    runs = {
        "search": [["search", "--criterion", c] for c in
                   ("suggested", "optimal", "highest-alpha", "minimax-early-stop", "balanced")],
        "simulate": [["simulate", "--n1", "8", "--n2", "28", "--r1", "5", "--r2", "11",
                      "--p1", "0.8", "--p2", "0.2", "--replicates", "300000", "--seed", "7"]],
    }
    for name, commands in runs.items():
        for argv in commands:
            outputs = {_cli(argv), _cli(argv), _cli([*argv, "--workers", "1"]),
                       _cli([*argv, "--workers", str(many)])}
            if len(outputs) != 1:
                failures.append(f"{' '.join(argv)} differs across runs or worker counts")
            elif next(iter(outputs))[0] != 0:
                failures.append(f"{' '.join(argv)} failed")
    report(capsys, 6, "byte-identical search and simulate output", failures,
           f"worker counts 1 and {many}")
