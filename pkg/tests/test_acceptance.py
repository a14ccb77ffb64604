"""Exit criteria, one test each; a PASS/FAIL line per criterion is printed
in the terminal summary."""

import math
import time
from fractions import Fraction

from thermoflow.cli import main
from thermoflow.construction import convergence_sweep
from thermoflow.subshift import (DYCK_OPENERS, admissible_words, compile, dyck_count,
                                 full_shift, golden_mean)
from thermoflow.suspension import Roof, flow_mmes, flow_topological_entropy
from thermoflow.thermo import Potential, pressure, variational_check

from conftest import ACCEPTANCE, GOLDEN, two_block_union

WEIGHTS = (1, 2, 4, 8, 10)


def record(name, ok, detail):
    ACCEPTANCE.append((name, bool(ok), detail))
    assert ok, f"{name}: {detail}"


def test_entropy_oracles():
    t0 = time.perf_counter()
    errs = [abs(pressure(compile(full_shift(n), 1), Potential.zero(full_shift(n))).value
                - math.log(n)) for n in (2, 3, 4)]
    gm = golden_mean()
    err_gm = abs(pressure(compile(gm, 1), Potential.zero(gm)).value - math.log(GOLDEN))
    dt = time.perf_counter() - t0
    record("entropy oracles", max(errs) <= 1e-10 and err_gm <= 1e-9 and dt < 1.0,
           f"full-shift err {max(errs):.1e}, golden-mean err {err_gm:.1e}, {dt:.3f}s")


def _dyck_enumerate(n):
    """Exhaustive count by depth-first stack scan, pruning rejected prefixes."""
    total = 0

    def go(depth, stack):
        nonlocal total
        if depth == n:
            total += 1
            return
        for a in range(4):
            if a in DYCK_OPENERS:
                go(depth + 1, stack + (a,))
            elif not stack:
                go(depth + 1, stack)
            elif stack[-1] == a - 1:
                go(depth + 1, stack[:-1])

    go(0, ())
    return total


def test_dyck_entropy():
    t0 = time.perf_counter()
    counts = [dyck_count(n) for n in range(1, 5)]
    growth = math.log(dyck_count(12)) / 12
    dt = time.perf_counter() - t0
    enum_ok = all(dyck_count(n) == _dyck_enumerate(n) for n in range(11))
    ok = (counts == [4, 14, 48, 160] and enum_ok
          and math.log(3) <= growth <= math.log(3) + 0.15 and dt < 1.0)
    record("Dyck shift", ok, f"counts {counts}, enumeration n<=10 {'agrees' if enum_ok else 'DIFFERS'}, "
           f"log(B_12)/12 = {growth:.4f} in [{math.log(3):.4f}, {math.log(3) + 0.15:.4f}], {dt:.3f}s")


def test_pressure_axioms():
    import numpy as np
    gm = golden_mean()
    b = compile(gm, 2)

    def rand(rng, d):
        return Potential(d, {w: 2 * rng.normal() for w in admissible_words(gm, d)})

    worst = {"lipschitz": -np.inf, "monotone": -np.inf, "translation": 0.0}
    for trial in range(20):
        rng = np.random.default_rng(trial)
        d = int(rng.integers(1, 4))
        phi, psi = rand(rng, d), rand(rng, d)
        dist = max(abs(phi.values[w] - psi.values[w]) for w in phi.values)
        Pphi, Ppsi = pressure(b, phi).value, pressure(b, psi).value
        worst["lipschitz"] = max(worst["lipschitz"], abs(Pphi - Ppsi) - dist)
        up = Potential(d, {w: x + abs(rng.normal()) for w, x in phi.values.items()})
        worst["monotone"] = max(worst["monotone"], Pphi - pressure(b, up).value)
        for c in (-1.0, 0.5, 3.0):
            worst["translation"] = max(worst["translation"],
                                       abs(pressure(b, phi.shifted(c)).value - Pphi - c))
    ok = all(v <= 1e-10 for v in worst.values())
    record("pressure axioms", ok, ", ".join(f"{k} worst {v:.1e}" for k, v in worst.items()))


def test_variational_principle():
    f2 = full_shift(2)
    b = compile(f2, 1)
    t0 = time.perf_counter()
    reps = [variational_check(b, phi, 100, seed=2024)
            for phi in (Potential.zero(f2),
                        Potential.from_function(f2, 2, lambda w: -float(w == (1, 1))))]
    dt = time.perf_counter() - t0
    ok = all(r.max_excess <= 1e-9 and r.equilibrium_gap <= 1e-9 for r in reps) and dt < 5.0
    record("variational principle", ok,
           "; ".join(f"max excess {r.max_excess:.2e}, eq gap {r.equilibrium_gap:.1e}" for r in reps)
           + f", {dt:.2f}s")


def test_flow_correspondence():
    f2 = full_shift(2)
    b = compile(f2, 1)
    errs, lifts_ok = [], True
    for r in (0.5, 1.0, 2.0):
        roof = Roof.constant_roof(f2, r)
        errs.append(abs(flow_topological_entropy(b, roof) - math.log(2) / r))
        (sm,) = flow_mmes(b, roof)
        lifts_ok &= (abs(sm.normalizer - r) <= 1e-12
                     and abs(sm.base_measure.trans - 0.5).max() <= 1e-12
                     and abs(sm.base_measure.stationary - 0.5).max() <= 1e-12)
    record("flow correspondence", max(errs) <= 1e-9 and lifts_ok,
           f"max |c* - log2/r| = {max(errs):.1e}, Bernoulli lift with normalizer r: {lifts_ok}")


def _default_sweeps():
    gm, f2 = golden_mean(), full_shift(2)
    return {
        "golden mean / indicator": convergence_sweep(f2, gm),
        "two-component / indicator": convergence_sweep(full_shift(4), two_block_union()),
        **{f"golden mean / geometric k={k}": convergence_sweep(f2, gm, k=k, kind="geometric")
           for k in (2, 3, 4)},
    }


def test_roof_normalization():
    worst = {name: max(abs(r.normalization) for r in rep.records)
             for name, rep in _default_sweeps().items()}
    record("roof normalization", max(worst.values()) <= 1e-9,
           f"max |P(-rho_N)| = {max(worst.values()):.1e} over {len(worst)} sweeps")


def test_intrinsically_ergodic_target():
    t0 = time.perf_counter()
    rep = convergence_sweep(full_shift(2), golden_mean(), kind="indicator", weights=WEIGHTS)
    dt = time.perf_counter() - t0
    P = [r.pressure for r in rep.records]
    decreasing = all(b < a for a, b in zip(P, P[1:]))
    fin = rep.final
    gap = fin.pressure - math.log(GOLDEN)
    (h_lift,) = fin.flow_entropy_lift_Y
    ratio = h_lift / fin.c_star
    ok = (decreasing and gap <= 1e-3 and fin.penalty_mass <= 1e-3
          and ratio >= 1 - 3e-3 and dt < 10)
    record("Y = golden mean in full 2-shift", ok,
           f"strictly decreasing {decreasing}, gap@10 {gap:.2e}, mass@10 {fin.penalty_mass:.2e}, "
           f"lift/flow entropy {ratio:.6f}, {dt:.2f}s")


def test_multi_mme_target():
    t0 = time.perf_counter()
    rep = convergence_sweep(full_shift(4), two_block_union(), weights=WEIGHTS)
    dt = time.perf_counter() - t0
    spreads = [abs(r.flow_entropy_lift_Y[0] - r.flow_entropy_lift_Y[1]) for r in rep.records]
    gaps = [1 - math.log(2) / r.pressure for r in rep.records]
    monotone = all(b <= a for a, b in zip(gaps, gaps[1:]))
    ok = (rep.n_mme_Y == 2 and all(len(r.flow_entropy_lift_Y) == 2 for r in rep.records)
          and max(spreads) <= 1e-9 and abs(gaps[-1]) <= 2e-2 and monotone and dt < 30)
    record("Y = two full 2-shifts in full 4-shift", ok,
           f"{rep.n_mme_Y} ergodic MMEs, lift spread {max(spreads):.1e}, "
           f"gap@10 {gaps[-1]:.2e}, monotone {monotone}, {dt:.2f}s")


def test_geometric_enclosures():
    from thermoflow.construction import (build_penalty_geometric, build_penalty_indicator,
                                         build_tau, block_depth)
    from thermoflow.thermo import pressure_enclosure
    half = Fraction(1, 2)
    widths_ok = all(N * half ** (k + 1) == N * half ** k / 2 for N in WEIGHTS for k in (2, 3, 4))
    f2, gm = full_shift(2), golden_mean()
    misses = []
    for k in (2, 3, 4):
        b = compile(f2, block_depth(f2, gm, window=k))
        geo, ind = build_penalty_geometric(f2, gm, k, 0.5), build_penalty_indicator(f2, gm, k)
        for N in WEIGHTS:
            enc = pressure_enclosure(b, build_tau(geo, N))
            widths_ok &= abs(enc.width - N * 0.5 ** k) <= 1e-12
            p_ind = pressure(b, build_tau(ind, N)).value
            if not enc.contains(p_ind):
                misses.append(f"(k={k}, N={N}): {p_ind:.4f} not in "
                              f"[{enc.lower:.4f}, {enc.upper:.4f}]")
    record("geometric enclosures", widths_ok and not misses,
           f"width halving {widths_ok}; indicator inside enclosure "
           + ("at every (k, N)" if not misses else "fails at " + "; ".join(misses)))


def test_hypothesis_guard(tmp_path, capsys):
    import json
    x = tmp_path / "x.json"
    y = tmp_path / "y.json"
    x.write_text(json.dumps({"alphabet_size": 2, "forbidden": [], "label": "full 2-shift"}))
    y.write_text(json.dumps({"alphabet_size": 2, "forbidden": [[1]], "label": "fixed point"}))
    code = main(["verify", "--spec", str(x), "--subsystem", str(y)])
    err = capsys.readouterr().err
    record("hypothesis guard", code == 4 and "h_top(Y) > 0" in err,
           f"exit code {code}, message: {err.strip()}")
