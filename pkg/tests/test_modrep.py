import json
from fractions import Fraction

import numpy as np
import pytest

from memb.characters import character_table
from memb.complexrep import complex_irreps, fixed_dims_C
from memb.fields import FqField
from memb.groups import build_group, enumerate_subgroups, parse_subgroup
from memb.modrep import (ModMessage, ProtocolError, ModularIrrepSet, alice_modrep, bob_modrep,
                         decode_mod_message, decompose_regular, dmax_modular, encode_mod_message,
                         fixed_space, modrep_batch, modrep_bit_bound, modrep_completeness,
                         modrep_exact_accept, modrep_field, modrep_message_bits, modrep_weights, verify_eq1)
from oracles import fixed_dim_from_character, modrep_accept_by_enumeration


@pytest.mark.parametrize("spec,p,k,dims", [
    ("S3", 5, 2, [1, 1, 2]),
    ("S3", 5, 1, [1, 1, 2]),
    ("S4", 5, 2, [1, 1, 2, 3, 3]),
    ("Q8", 7, 2, [1, 1, 1, 1, 2]),
    ("C7", 2, 1, [1, 3, 3]),
    ("C5", 2, 1, [1, 4]),
])
def test_dimensions(spec, p, k, dims):
    I = decompose_regular(build_group(spec), FqField(p, k))
    assert I.dims == dims
    assert I.dimension_count() == I.group.order
    assert all(r.check_homomorphism() for r in I.irreps)


def test_split_flag():
    assert decompose_regular(build_group("S3"), FqField(5, 2)).is_split
    assert not decompose_regular(build_group("C3"), FqField(2, 1)).is_split
    with pytest.raises(ProtocolError):
        decompose_regular(build_group("C5"), FqField(2, 1)).require_split()


def test_fixed_spaces_s3():
    G = build_group("S3")
    I = decompose_regular(G, modrep_field(G, 5))
    H = parse_subgroup(G, "gens=(1,2)")
    assert [fixed_space(r, H).dim for r in I.irreps] == [1, 0, 1]
    assert [fixed_space(r, parse_subgroup(G, "gens=(1,2),(1,2,3)")).dim for r in I.irreps] == [1, 0, 0]


@pytest.mark.parametrize("spec,p", [("S4", 5), ("D8", 7), ("Q8", 5)])
def test_fixed_dims_match_complex_and_characters(spec, p):
    G = build_group(spec)
    I = decompose_regular(G, modrep_field(G, p))
    C = complex_irreps(G)
    t = character_table(G)
    assert I.dims == C.dims
    for H in enumerate_subgroups(G):
        mod = [fixed_space(r, H).dim for r in I.irreps]
        assert mod == fixed_dims_C(C, H)
        assert mod == [fixed_dim_from_character(t.on_elements(i), H.elements) for i in range(len(t))]


@pytest.mark.parametrize("spec,p", [("S3", 5), ("S4", 7), ("Z2^4", 5), ("C6", 5), ("C7", 2)])
def test_eq1_every_subgroup(spec, p):
    G = build_group(spec)
    I = decompose_regular(G, FqField(p, 1))  # prime field, split or not
    for H in enumerate_subgroups(G):
        assert verify_eq1(I, H)["sum"] == H.index


def test_exact_accept_frozen_values():
    G = build_group("S3")
    H = parse_subgroup(G, "gens=(1,2)")
    y = G.element("(1,3)")
    # hand derivation: 1/3 from the trivial irrep plus (2/3)/q from the 2-dim one
    assert modrep_exact_accept(decompose_regular(G, FqField(5, 1)), H, y) == Fraction(7, 15)
    assert modrep_exact_accept(decompose_regular(G, FqField(5, 2)), H, y) == Fraction(9, 25)


@pytest.mark.parametrize("spec,p,gens", [("S4", 5, "gens=(1,2)"), ("D8", 3, "gens=s"), ("Q8", 3, "gens=-1")])
def test_exact_accept_matches_enumeration(spec, p, gens):
    G = build_group(spec)
    I = decompose_regular(G, modrep_field(G, p))
    H = parse_subgroup(G, gens)
    for y in range(G.order):
        if y not in H:
            assert modrep_exact_accept(I, H, y) == modrep_accept_by_enumeration(I, H, y)


def test_weights_sum_and_trivial_case():
    G = build_group("S3")
    I = decompose_regular(G, modrep_field(G, 5))
    assert modrep_weights(I, parse_subgroup(G, "gens=(1,2)")) == [2, 0, 4]
    assert modrep_weights(I, parse_subgroup(G, "gens=(1,2),(1,3)")) == [6, 0, 0]


def test_non_split_field_refused_for_protocol():
    G = build_group("C3")
    I = decompose_regular(G, FqField(2, 1))
    with pytest.raises(ProtocolError):
        modrep_weights(I, parse_subgroup(G, "gens="))


def test_message_bits_and_encoding():
    G = build_group("S3")
    I = decompose_regular(G, modrep_field(G, 5))
    assert modrep_message_bits(I, 2) == 2 + 2 * 5 == 12
    assert modrep_message_bits(I, 0) == 2 + 5
    assert modrep_bit_bound(I) == 3 + 2 * 5
    rng = np.random.default_rng(4)
    H = parse_subgroup(G, "gens=(1,2)")
    for _ in range(20):
        msg = alice_modrep(I, H, rng)
        bits = encode_mod_message(I, msg)
        assert len(bits) == msg.bits
        back = decode_mod_message(I, bits)
        assert (back.irrep_index, back.vector) == (msg.irrep_index, msg.vector)
    with pytest.raises(ValueError):
        decode_mod_message(I, "10" + "0" * 3)


def test_prime_field_bits():
    G = build_group("S3")
    I = decompose_regular(G, FqField(5, 1))
    assert modrep_message_bits(I, 0) == 2 + 3


def test_bob_and_completeness():
    G = build_group("S4")
    I = decompose_regular(G, modrep_field(G, 7))
    for H in enumerate_subgroups(G):
        for y in H.elements:
            assert modrep_completeness(I, H, y)
    zero = ModMessage(2, (0, 0), 0)
    assert bob_modrep(I, G.element("(1,2)"), zero) == 1


def test_batch_within_band():
    G = build_group("S3")
    I = decompose_regular(G, FqField(5, 2))
    H = parse_subgroup(G, "gens=(1,2)")
    dec, bits = modrep_batch(I, H, G.element("(1,3)"), np.random.default_rng(0), 40_000)
    p = 9 / 25
    assert abs(dec.mean() - p) < 4 * np.sqrt(p * (1 - p) / 40_000)
    assert bits.max() <= modrep_bit_bound(I)


def test_dmax_inequality():
    r = dmax_modular(build_group("C7"), 2, 1)
    assert r["dmax_p"] == 3 and r["ord_m_p"] == 3 and r["holds"]
    r = dmax_modular(build_group("S3"), 5, 2)
    assert r["dmax_p"] == 2 and r["bound"] == 4


def test_json_roundtrip():
    G = build_group("D8")
    I = decompose_regular(G, modrep_field(G, 3))
    J = ModularIrrepSet.from_json(G, json.loads(json.dumps(I.to_json())))
    assert J.dims == I.dims
    for a, b in zip(I.irreps, J.irreps):
        assert np.array_equal(a.matrices, b.matrices)
