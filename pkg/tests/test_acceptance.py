"""Acceptance criteria, one test each, at the stated tolerances.

Each test records a PASS/FAIL line; pytest prints them in an "acceptance
criteria" summary section, and ``python3 tests/test_acceptance.py`` prints
them directly.
"""
import math
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np

from memb import modrep
from memb.characters import character_table, dmax_complex
from memb.checks import character_identity, fixed_space_identity, modular_degree_inequality, net_check
from memb.complexrep import (cayley_second_eigenvalue, comprep_batch, comprep_completeness, complex_irreps,
                             epsilon_for_group, symmetric_generating_set)
from memb.fields import FqField
from memb.groups import (build_group, enumerate_subgroups, independent_subset_gamma, join, normal_closure,
                         parse_subgroup, subgroup_generate)
from memb.harness import Amplified, ComprepProtocol, evaluate, make_protocol, trivial_payload_bits, verify_shattering
from memb.modrep import (decompose_regular, modrep_batch, modrep_bit_bound, modrep_completeness,
                         modrep_exact_accept, modrep_field)
from memb.norm import norm_batch, norm_bit_bound, norm_completeness, norm_exact_error

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

GROUPS = ["S3", "D8", "Q8", "Z2^4", "S4"]
SEED = 20240611


def record(n: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n:2d}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def band(p: float, trials: int) -> float:
    return 4 * math.sqrt(p * (1 - p) / trials)


def test_01_fixed_space_identity():
    modrep._DECOMP_CACHE.clear()
    start = time.perf_counter()
    ok, rows = True, 0
    for spec in GROUPS:
        res = fixed_space_identity(build_group(spec), [5, 7])
        ok &= res["holds"]
        rows += len(res["rows"])
    elapsed = time.perf_counter() - start
    record(1, ok and elapsed < 60, f"fixed-space identity over {rows} (G, H, p) cases, {elapsed:.1f} s (< 60 s)")


def test_02_character_identity():
    ok, rows = True, 0
    for spec in GROUPS:
        res = character_identity(build_group(spec))
        ok &= res["holds"] and res["degree_square_sum"] == res["order"]
        rows += len(res["rows"])
    record(2, ok, f"character identity over {rows} normal subgroups; sum chi(1)^2 = |G| for all tables")


def test_03_norm_exactness():
    G = build_group("S3")
    t = character_table(G)
    H = parse_subgroup(G, "gens=(1,2,3)")
    y = G.element("(1,2)")
    exact = norm_exact_error(t, H, y)
    trials = 100_000
    dec, bits = norm_batch(t, H, y, np.random.default_rng(SEED), trials)
    emp = dec.mean()
    ok = exact == Fraction(1, 2) and abs(emp - 0.5) <= 0.0063 and bits.max() <= norm_bit_bound(G)
    complete = True
    for spec in GROUPS:
        Gs = build_group(spec)
        ts = character_table(Gs)
        rng = np.random.default_rng(SEED)
        for Hs in enumerate_subgroups(Gs):
            for ys in normal_closure(Gs, Hs).elements:
                complete &= norm_completeness(ts, Hs, ys)
            d, b = norm_batch(ts, Hs, int(rng.integers(Gs.order)), rng, 200)
            complete &= bool(b.max() <= norm_bit_bound(Gs))
    record(3, ok and complete,
           f"NORM error {exact}, empirical {emp:.5f} (|dev| <= 0.0063), completeness and bit bound on all sweeps")


def test_04_modrep_exactness():
    G = build_group("S3")
    H = parse_subgroup(G, "gens=(1,2)")
    y = G.element("(1,3)")
    trials = 100_000
    parts, ok = [], True
    for F, expected in [(FqField(5, 1), Fraction(7, 15)), (FqField(5, 2), Fraction(9, 25))]:
        I = decompose_regular(G, F)
        exact = modrep_exact_accept(I, H, y)
        dec, bits = modrep_batch(I, H, y, np.random.default_rng(SEED), trials)
        emp = dec.mean()
        ok &= exact == expected and abs(emp - float(exact)) <= band(float(exact), trials)
        ok &= bool(bits.max() <= modrep_bit_bound(I))
        parts.append(f"q={F.q}: {exact}, empirical {emp:.5f}")
    for spec in GROUPS:
        Gs = build_group(spec)
        for p in (5, 7):
            I = decompose_regular(Gs, modrep_field(Gs, p))
            for Hs in enumerate_subgroups(Gs):
                for ys in Hs.elements:
                    ok &= modrep_completeness(I, Hs, ys)
    record(4, ok, "MOD-REP " + "; ".join(parts) + "; completeness on all sweeps")


def test_05_modular_degree_inequality():
    expected = {"S3": 2, "S4": 3, "D8": 2, "Q8": 2, "Z2^4": 1}
    ok, checked = True, 0
    for spec, d0 in expected.items():
        G = build_group(spec)
        ok &= dmax_complex(G) == d0
        res = modular_degree_inequality(G, [5, 7, 11, 13])
        ok &= res["holds"] and res["dmax_0"] == d0
        checked += sum("dmax_p" in r for r in res["rows"])
    record(5, ok, f"d_max^p <= d_max^0 * ord_m(p) on {checked} (G, p) pairs; d_max^0 values match")


def test_06_comprep_completeness_and_net():
    ok, pairs = True, 0
    for spec in GROUPS:
        G = build_group(spec)
        irr = complex_irreps(G)
        eps = epsilon_for_group(G.order)
        rng = np.random.default_rng(SEED)
        for H in enumerate_subgroups(G):
            for y in H.elements:
                dec, _ = comprep_batch(irr, H, y, rng, 1000, eps)
                ok &= bool(dec.all()) and comprep_completeness(irr, H, y)
                pairs += 1
    nets = [net_check((1, 2, 3), epsilon=e, vectors=10_000, seed=SEED) for e in (1 / 8, epsilon_for_group(24))]
    violations = sum(r["violations"] for n in nets for r in n["rows"])
    ok &= all(n["holds"] for n in nets)
    record(6, ok, f"COMP-REP zero rejections on {pairs} (H, y in H) pairs x 1000 trials; "
                  f"net violations {violations} over 2 x 3 x 10^4 vectors")


def wilson_lower(successes: int, n: int, z: float = 2.326) -> float:
    """One-sided 99% Wilson lower bound for a binomial proportion."""
    p = successes / n
    centre = p + z * z / (2 * n)
    spread = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    return (centre - spread) / (1 + z * z / n)


def test_07_comprep_soundness_and_amplification():
    trials = 10_000
    ok, pairs, worst_amp, min_lower = True, 0, 0.0, 1.0
    for spec in ["S3", "D8", "Q8", "Z2xZ2^3"]:
        G = build_group(spec)
        proto = ComprepProtocol(G)
        rng = np.random.default_rng([SEED, G.order])
        for H in enumerate_subgroups(G):
            for y in range(G.order):
                if y in H:
                    continue
                dec, _ = proto.batch(H, y, rng, trials)
                accepts = int(dec.sum())
                lower = wilson_lower(trials - accepts, trials)
                min_lower = min(min_lower, lower)
                ok &= lower > 0
                acc = accepts / trials
                k = max(1, math.ceil(math.log(3) / math.log(1 / acc))) if acc > 0 else 1
                amp, _ = Amplified(proto, k).batch(H, y, rng, trials)
                worst_amp = max(worst_amp, amp.mean())
                pairs += 1
    ok &= worst_amp <= 1 / 3 + 0.02
    record(7, ok, f"COMP-REP soundness on {pairs} pairs: min 99% lower bound on rejection {min_lower:.3f} > 0; "
                  f"worst amplified error {worst_amp:.4f} <= 0.3533")


def test_08_cayley_gap():
    worst, configs = -1.0, 0
    for spec in ["S3", "D8", "Q8", "S4", "Z2xZ2^3"]:
        G = build_group(spec)
        for H in enumerate_subgroups(G):
            A = symmetric_generating_set(G, H)
            for y in range(G.order):
                if y in H:
                    continue
                worst = max(worst, cayley_second_eigenvalue(G, join(G, H, [y]), A, y))
                configs += 1
    record(8, worst < 1 - 1e-9, f"largest nontrivial eigenvalue {worst:.6f} < 1 - 1e-9 over {configs} configurations")


def test_09_gamma_and_shattering():
    ok = True
    sizes = []
    for r in range(1, 6):
        G = build_group(f"Z2^{r}")
        res = independent_subset_gamma(G)
        sizes.append(res.size)
        ok &= res.size == r and res.exact
        if r <= 4:
            ok &= verify_shattering(G, res.witness)
    record(9, ok, f"gamma(Z2^r) for r=1..5 = {sizes}; shattering verified for r <= 4")


def test_10_trivial_scaling():
    payload = []
    for r in range(2, 6):
        G = build_group(f"Z2^{r}")
        payload.append(trivial_payload_bits(G, subgroup_generate(G, range(G.order))))
    record(10, payload == [r * r for r in range(2, 6)], f"trivial payload bits for r=2..5: {payload}")


def _suite(seed: int) -> list[str]:
    S3, Q8, D8 = build_group("S3"), build_group("Q8"), build_group("D8")
    reports = [
        evaluate(make_protocol("norm", S3), trials=500, seed=seed),
        evaluate(make_protocol("modrep", S3, p=5, k=2), trials=500, seed=seed),
        evaluate(make_protocol("comprep", Q8), "sampled", trials=300, seed=seed, samples=8),
        evaluate(make_protocol("trivial", D8), trials=1, seed=seed),
        evaluate(make_protocol("quantum", D8, amplify_k=2), trials=200, seed=seed),
    ]
    return [r.dumps() for r in reports] + [reports[1].to_csv()]


def test_11_determinism(tmp_path):
    same = _suite(SEED) == _suite(SEED)
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        subprocess.run([sys.executable, "-m", "memb.cli", "run", "--protocol", "comprep", "--group", "D8",
                        "--trials", "200", "--seed", str(SEED), "--out", str(path)],
                       check=True, capture_output=True)
        outs.append(path.read_bytes())
    record(11, same and outs[0] == outs[1], "in-process suite and two CLI runs are byte-identical")


if __name__ == "__main__":
    import tempfile
    from pathlib import Path

    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            try:
                if "tmp_path" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
                    with tempfile.TemporaryDirectory() as d:
                        fn(Path(d))
                else:
                    fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
