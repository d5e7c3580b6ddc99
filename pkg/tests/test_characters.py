import numpy as np
import pytest

from memb.characters import (char_kernel, character_table, dmax_complex, format_table,
                             lambda_H, load_table, save_table, verify_eq2)
from memb.groups import build_group, normal_subgroups, parse_subgroup

DEGREES = {
    "S3": [1, 1, 2],
    "S4": [1, 1, 2, 3, 3],
    "D8": [1, 1, 1, 1, 2],
    "Q8": [1, 1, 1, 1, 2],
    "Z2^4": [1] * 16,
    "Z2xZ2^3": [1] * 8 + [2, 2],
    "S5": [1, 1, 4, 4, 5, 5, 6],
}


@pytest.mark.parametrize("spec", sorted(DEGREES))
def test_degrees_and_orthogonality(spec):
    G = build_group(spec)
    t = character_table(G)
    assert t.degrees == DEGREES[spec]
    assert sum(d * d for d in t.degrees) == G.order
    sizes = t.class_sizes
    gram = (t.values * sizes) @ t.values.conj().T / G.order
    assert np.allclose(gram, np.eye(len(t)), atol=1e-8)
    assert t.degrees[0] == 1 and np.allclose(t.values[0], 1)


def test_s3_table_values():
    t = character_table(build_group("S3"))
    # classes ordered e, transpositions, 3-cycles
    assert np.allclose(t.values.real, [[1, 1, 1], [1, -1, 1], [2, 0, -1]])


def test_q8_has_integer_table():
    t = character_table(build_group("Q8"))
    assert all(t.exact)


def test_kernels_and_lambda():
    G = build_group("S3")
    t = character_table(G)
    assert char_kernel(t, 1).order == 3  # sign
    assert char_kernel(t, 2).order == 1
    A3 = parse_subgroup(G, "gens=(1,2,3)")
    assert lambda_H(t, A3) == [0, 1]
    with pytest.raises(ValueError):
        lambda_H(t, parse_subgroup(G, "gens=(1,2)"))


@pytest.mark.parametrize("spec", ["S4", "D8", "Q8", "Z2^4"])
def test_eq2_rows(spec):
    G = build_group(spec)
    for row in verify_eq2(character_table(G), normal_subgroups(G)):
        assert row["sum"] == row["index"]


def test_dmax_complex():
    assert {s: dmax_complex(build_group(s)) for s in ["S3", "S4", "D8", "Q8", "Z2^4"]} == \
        {"S3": 2, "S4": 3, "D8": 2, "Q8": 2, "Z2^4": 1}


def test_cache_roundtrip(tmp_path):
    G = build_group("D8")
    t = character_table(G)
    save_table(t, tmp_path)
    t2 = load_table(G, tmp_path)
    assert np.allclose(t2.values, t.values) and t2.degrees == t.degrees
    assert load_table(build_group("Q8"), tmp_path) is None


def test_format_table_lists_every_class():
    out = format_table(character_table(build_group("S4")))
    assert out.count("chi") == 5
