import json
import math
from fractions import Fraction

import numpy as np
import pytest

from memb.groups import build_group, parse_subgroup, subgroup_generate
from memb.harness import (Amplified, BoundViolation, ComprepProtocol, ModrepProtocol, NormProtocol,
                          QuantumReference, TrivialProtocol, amplify, binary_entropy, cost_table, evaluate,
                          make_protocol, quantum_reference, rounds_for_third, run_once, trivial_decode,
                          trivial_message, trivial_payload_bits, trivial_protocol, verify_shattering,
                          vc_lower_bound)


def test_trivial_protocol_examples():
    G = build_group("Z2^4")
    H = parse_subgroup(G, "gens=")
    bit, bits = trivial_protocol(G, H, 0)
    assert bit == 1 and bits == 3  # header only: ceil(log2(4 + 1))
    H = parse_subgroup(G, "gens=0001,0010")
    assert trivial_payload_bits(G, H) == 8
    for y in range(16):
        assert trivial_protocol(G, H, y)[0] == int(y in H)
    assert set(trivial_decode(G, trivial_message(G, H)).elements) == set(H.elements)


@pytest.mark.parametrize("r", range(2, 6))
def test_trivial_payload_is_r_squared(r):
    G = build_group(f"Z2^{r}")
    assert trivial_payload_bits(G, subgroup_generate(G, range(G.order))) == r * r


def test_trivial_bound():
    G = build_group("S4")
    proto = TrivialProtocol(G)
    rep = evaluate(proto, trials=1)
    assert rep.summary["bits_max"] <= proto.bit_bound() == 5 * 6


def test_quantum_reference():
    G = build_group("Z2^4")
    H = parse_subgroup(G, "gens=0001")
    assert quantum_reference(G, H, 1) == (1, 4)
    assert quantum_reference(G, H, 2) == (Fraction(1, 2), 4)
    rep = evaluate(QuantumReference(build_group("S3")), trials=2000, seed=1)
    assert rep.summary["within_4sigma_fraction"] == 1.0


def test_amplify():
    G = build_group("S3")
    base = NormProtocol(G)
    A3 = parse_subgroup(G, "gens=(1,2,3)")
    y = G.element("(1,2)")
    assert amplify(base, 2).analytic(A3, y) == Fraction(1, 4)
    assert amplify(base, 2).bit_bound() == 2 * base.bit_bound()
    dec, bits = Amplified(base, 3).batch(A3, y, np.random.default_rng(0), 20_000)
    assert abs(dec.mean() - 1 / 8) < 4 * math.sqrt(1 / 8 * 7 / 8 / 20_000)
    assert (bits == 3 * 2).all()
    one = Amplified(base, 1)
    a = one.batch(A3, y, np.random.default_rng(9), 100)[0]
    b = base.batch(A3, y, np.random.default_rng(9), 100)[0]
    assert np.array_equal(a, b)
    with pytest.raises(ValueError):
        Amplified(base, 0)


def test_rounds_for_third():
    assert rounds_for_third(Fraction(1, 2)) == 2
    assert rounds_for_third(Fraction(1, 3)) == 1
    assert rounds_for_third(0.9) == math.ceil(math.log(3) / math.log(1 / 0.9))
    with pytest.raises(ValueError):
        rounds_for_third(1)


def test_norm_exhaustive_on_s3():
    rep = evaluate(NormProtocol(build_group("S3")), trials=500, seed=0)
    rows = rep.rows
    assert {r["H_order"] for r in rows} == {1, 3, 6}  # normal subgroups only
    for r in rows:
        if r["y_in_target"]:
            assert r["empirical_accept"] == 1 and r["completeness_verified"]
        elif r["H_order"] == 3:
            assert r["analytic_accept"] == "1/2"
    assert rep.summary["completeness_verified"]


def test_closure_mode_takes_every_subgroup():
    rep = evaluate(make_protocol("norm-closure", build_group("S3")), trials=10)
    assert len(rep.rows) == 6 * 6


def test_modrep_row_matches_oracle():
    G = build_group("S3")
    proto = ModrepProtocol(G, 5)
    pair = [(parse_subgroup(G, "gens=(1,2)"), G.element("(1,3)"))]
    row = evaluate(proto, trials=10_000, seed=4, pairs=pair).rows[0]
    assert row["analytic_accept"] == "9/25" and row["within_4sigma"]


def test_comprep_report_fields():
    G = build_group("Q8")
    rep = evaluate(ComprepProtocol(G), trials=200, seed=0)
    assert rep.summary["completeness_verified"] and rep.summary["bound_respected"]
    assert rep.summary["delta_emp"] > 0
    assert all("limit_accept" in r for r in rep.rows)


def test_determinism_and_formats(tmp_path):
    G = build_group("D8")
    a = evaluate(make_protocol("modrep", G, p=3), "sampled", trials=300, seed=11, samples=6).dumps()
    b = evaluate(make_protocol("modrep", G, p=3), "sampled", trials=300, seed=11, samples=6).dumps()
    assert a == b and json.loads(a)["schema"] == 1
    c = evaluate(make_protocol("modrep", G, p=3), "sampled", trials=300, seed=12, samples=6).dumps()
    assert c != a
    rep = evaluate(make_protocol("trivial", G), trials=1)
    rep.write(tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0].startswith("H,H_order,y") and len(lines) == 1 + len(rep.rows)


def test_sampled_plan_uses_normal_closure_for_memb_mode():
    rep = evaluate(NormProtocol(build_group("S4")), "sampled", trials=10, seed=3, samples=10)
    assert len(rep.rows) == 10 and {r["H_order"] for r in rep.rows} <= {1, 4, 12, 24}


def test_exhaustive_refuses_large_groups():
    with pytest.raises(Exception):
        evaluate(make_protocol("trivial", build_group("S6")), trials=1)


def test_run_once():
    G = build_group("S3")
    run = run_once(NormProtocol(G), parse_subgroup(G, "gens=(1,2,3)"), G.element("(1,2,3)"), seed=5)
    assert run.decision == 1 and run.bits_sent == 2 and run.seed == 5


def test_vc_lower_bound():
    h = binary_entropy(1 / 3)
    assert h == pytest.approx(0.9182958, abs=1e-6)
    lb = vc_lower_bound(build_group("Z2^4"))
    assert lb["gamma"] == 4 and lb["bound"] == pytest.approx(0.327, abs=1e-3)
    assert vc_lower_bound(build_group("C1"))["bound"] == 0
    assert vc_lower_bound(build_group("C6"))["bound"] == pytest.approx((1 - h) * 2)


def test_shattering_detects_dependent_sets():
    G = build_group("Z2^2")
    assert verify_shattering(G, [1, 2])
    assert not verify_shattering(G, [1, 2, 3])


def test_cost_tables():
    rows = cost_table("norm", [build_group(f"Z2^{r}") for r in range(1, 7)], trials=20, samples=4)
    assert all(r["bits_max"] <= r["log2_order"] for r in rows)
    rows = cost_table("comprep", [build_group(f"Z2xZ2^{n}") for n in range(1, 5)], trials=20, samples=4)
    assert all(r["dmax_0"] <= 2 and r["bits_max"] <= r["bit_bound"] for r in rows)


def test_cost_table_flags_violation(monkeypatch):
    monkeypatch.setattr(TrivialProtocol, "bit_bound", lambda self: 0)
    with pytest.raises(BoundViolation):
        cost_table("trivial", [build_group("Z2^3")], trials=1, samples=3)
