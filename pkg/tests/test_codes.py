import json
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catcode import codes
from catcode.codes import (
    build_coo,
    build_ecoc,
    build_gauss_cc,
    build_polynomial_cc,
    build_remainder_cc,
    build_rmp,
    encode,
    encode_many,
    rhot_matrix,
    theoretical_min_collision,
    to_rhot,
    with_anti,
)
from catcode.errors import BadParameters, ModulusTooSmall, NotCoprime, OutOfRange, Unreachable
from catcode.gauss_arith import GaussInt, build_modulus, residue_index
from catcode.presets import build_preset, preset_names


# --- polynomial -------------------------------------------------------------


def test_polynomial_matches_published_formula():
    cb = build_polynomial_cc(21901, k=2, p=181, r=6)
    x = np.arange(21901)
    expected = np.stack([((x % 181) + (x // 181) * i) % 181 for i in range(6)], axis=1)
    assert np.array_equal(cb.table, expected)


def test_polynomial_small_example():
    cb = build_polynomial_cc(25, k=2, p=5, eval_points=[1, 2])
    assert encode(cb, 7).values == (3, 4)
    assert encode(cb, 0).values == (0, 0)


def test_polynomial_digits_182():
    cb = build_preset("cjk-polynomial-6")
    assert encode(cb, 182).values == tuple((1 + i) % 181 for i in range(6))


def test_polynomial_auto_prime():
    cb = build_polynomial_cc(21901, k=2, r=3)
    assert cb.params["p"] == 149 and cb.site_sizes == (149, 149, 149)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n_classes=21901, k=1, p=181, r=2),  # N > p^k
        dict(n_classes=100, k=2, p=11, r=12),  # r > p
        dict(n_classes=100, k=2, p=12, r=2),  # not prime
        dict(n_classes=100, k=2, p=11, eval_points=[1, 1]),
    ],
)
def test_polynomial_bad_parameters(kwargs):
    with pytest.raises(BadParameters):
        build_polynomial_cc(**kwargs)


def _lagrange_coeffs(points, values, p):
    """Coefficients of the unique degree < k polynomial through the points, over F_p."""
    k = len(points)
    coeffs = [0] * k
    for j in range(k):
        basis = [1]
        denom = 1
        for m in range(k):
            if m == j:
                continue
            # multiply basis by (t - x_m)
            basis = [(a - points[m] * b) % p for a, b in zip([0] + basis, basis + [0])]
            denom = denom * (points[j] - points[m]) % p
        scale = values[j] * pow(denom, -1, p) % p
        coeffs = [(c + scale * b) % p for c, b in zip(coeffs, basis)]
    return coeffs


@pytest.mark.parametrize("p, k, r", [(7, 2, 5), (11, 3, 4), (47, 2, 6)])
def test_polynomial_interpolation_oracle(p, k, r):
    n = p**k
    cb = build_polynomial_cc(n, k=k, p=p, r=r)
    pts = cb.params["eval_points"]
    table = cb.table
    for subset in combinations(range(r), k):
        for x in range(n):
            coeffs = _lagrange_coeffs([pts[i] for i in subset], [int(table[x, i]) for i in subset], p)
            assert sum(c * p**j for j, c in enumerate(coeffs)) == x


# --- remainder --------------------------------------------------------------


def test_remainder_examples():
    assert encode(build_remainder_cc(21901, moduli=[173, 191]), 200).values == (27, 9)
    assert encode(build_remainder_cc(35, moduli=[5, 7]), 34).values == (4, 6)
    assert encode(build_remainder_cc(35, moduli=[5, 7]), 0).values == (0, 0)
    cb = build_remainder_cc(6040, moduli=[83, 89, 97, 101, 103, 109])
    assert cb.r == 6 and cb.total_bits == 582


def test_remainder_auto_moduli():
    cb = build_remainder_cc(21901, k=2, r=6)
    assert cb.site_sizes == (149, 151, 157, 163, 167, 173)


def test_remainder_errors():
    with pytest.raises(NotCoprime):
        build_remainder_cc(30, moduli=[6, 10])
    with pytest.raises(ModulusTooSmall):
        build_remainder_cc(100, k=2, moduli=[5, 7, 11])


@pytest.mark.parametrize("n, moduli", [(9000, [97, 101, 103, 107]), (6040, [19, 23, 25, 27, 29, 31, 32]), (3000, [50, 51, 53, 59, 61])])
def test_remainder_crt_restriction(n, moduli):
    cb = build_remainder_cc(n, moduli=moduli)
    for size in range(1, len(moduli) + 1):
        for subset in combinations(range(len(moduli)), size):
            if np.prod([moduli[i] for i in subset]) < n:
                continue
            rows = {tuple(r) for r in cb.table[:, subset].tolist()}
            assert len(rows) == n


# --- gauss ------------------------------------------------------------------


def test_gauss_preset_sizes():
    cb = build_preset("cjk-gauss-6")
    assert cb.site_sizes == (181, 181, 173, 173, 193, 193)


def test_gauss_zero_maps_to_zero_residue():
    cb = build_gauss_cc(21901, moduli=["10+9i", "10-9i"])
    zero = [residue_index(build_modulus(GaussInt.parse(s)), GaussInt(0)) for s in cb.params["moduli"]]
    assert encode(cb, 0).values == tuple(zero)


def test_gauss_modulus_point_hits_zero_residue():
    cb = build_preset("cjk-gauss-6")
    disc = cb._disc
    x = next(i for i in range(cb.n_classes) if disc.point(i) == GaussInt(10, 9))
    assert encode(cb, x).values[0] == encode(cb, 0).values[0]


def test_gauss_congruent_points_agree():
    cb = build_preset("cjk-gauss-2")
    disc = cb._disc
    where = {(int(a), int(b)): i for i, (a, b) in enumerate(zip(disc.re, disc.im))}
    p = GaussInt(10, 9)
    hits = 0
    for x in range(0, cb.n_classes, 97):
        z = disc.point(x) + p
        y = where.get((z.re, z.im))
        if y is not None:
            hits += 1
            assert cb.table[x, 0] == cb.table[y, 0]
    assert hits > 50


def test_gauss_errors():
    with pytest.raises(NotCoprime):
        build_gauss_cc(21901, moduli=["1+2i", "-2+1i"])
    with pytest.raises(ModulusTooSmall):
        build_gauss_cc(21901, k=2, moduli=["3+2i", "5+2i"])


# --- baselines --------------------------------------------------------------


def test_coo_examples():
    cb = build_coo(10, 4)
    assert to_rhot(cb, 0).to_string() == "1000"
    assert to_rhot(cb, 7).to_string() == "0001"
    assert to_rhot(cb, 3).to_string() == "0001"
    cb = build_coo(5, 3, frequency_order=[4, 2, 0, 1, 3])
    assert [to_rhot(cb, x).to_string() for x in range(5)] == ["001", "001", "010", "001", "100"]
    cb = build_preset("ml-user-coo")
    assert len({tuple(r) for r in cb.table.tolist()}) == 582


def test_coo_bad():
    with pytest.raises(BadParameters):
        build_coo(10, 11)
    with pytest.raises(BadParameters):
        build_coo(3, 2, frequency_order=[0, 0, 1])


def _rm_generator(m):
    """Generator matrix of RM(m, 1): all-ones row then coordinate rows."""
    pts = np.arange(2**m)
    rows = [np.ones(2**m, dtype=np.int64)] + [(pts >> j) & 1 for j in range(m)]
    return np.stack(rows)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
def test_rm_unpunctured_against_generator(m):
    n = 2 ** (m + 1)
    cb = build_rmp(n, m, 2**m)
    assert cb.params["kept"] == list(range(2**m))
    g = _rm_generator(m)
    coeffs = (np.arange(n)[:, None] >> np.arange(m + 1)[None, :]) & 1
    assert np.array_equal(cb.table, coeffs @ g % 2)
    words = cb.table
    for i in range(n):
        d = (words[i + 1 :] != words[i]).sum(axis=1)
        assert set(d.tolist()) <= {2 ** (m - 1), 2**m}


def test_rm_small_words():
    cb = build_rmp(8, 2, 4)
    assert encode(cb, 0).values == (0, 0, 0, 0)
    assert encode(cb, 1).values == (1, 1, 1, 1)


def test_rmp_puncture_seeded():
    a = build_rmp(6040, 12, 582, seed=0)
    b = build_rmp(6040, 12, 582, seed=0)
    c = build_rmp(6040, 12, 582, seed=1)
    assert a.params["kept"] == b.params["kept"] != c.params["kept"]
    assert len(a.params["kept"]) == 582 == a.r


def test_rmp_bad():
    with pytest.raises(BadParameters):
        build_rmp(6040, 11, 100)
    with pytest.raises(BadParameters):
        build_rmp(100, 6, 65)


def test_ecoc_examples():
    assert encode(build_ecoc(16, 4), 5).values == (1, 0, 1, 0)
    cb = build_ecoc(20901, 15)
    assert encode(cb, 0).values == (0,) * 15
    assert len({tuple(r) for r in cb.table.tolist()}) == 20901
    rnd = build_ecoc(20901, 15, seed=3)
    assert len({tuple(r) for r in rnd.table.tolist()}) == 20901
    with pytest.raises(BadParameters):
        build_ecoc(20901, 14)


# --- encoding -----------------------------------------------------------------


def test_encode_out_of_range():
    cb = build_remainder_cc(35, moduli=[5, 7])
    with pytest.raises(OutOfRange):
        encode(cb, 35)
    with pytest.raises(OutOfRange):
        to_rhot(cb, -1)


def test_rhot_examples():
    cb = build_remainder_cc(6, moduli=[2, 3])
    v = to_rhot(cb, 4)
    assert v.set_bits == (0, 3) and v.to_string() == "10010"
    assert to_rhot(with_anti(cb), 4).set_bits == (1, 2, 4)
    one = build_coo(9, 9)
    assert all(to_rhot(one, x).set_bits == (x,) for x in range(9))


@pytest.mark.parametrize("name", preset_names())
def test_presets_injective_and_zero(name):
    cb = build_preset(name)
    rows = {tuple(r) for r in cb.table.tolist()}
    if cb.scheme == "coo":
        assert len(rows) == cb.params["n_bits"]
    else:
        assert len(rows) == cb.n_classes
    if cb.scheme in ("polynomial", "remainder", "ecoc", "coo", "rmp"):
        assert not cb.table[0].any()


@given(st.sampled_from(["cjk-remainder-6", "cjk-gauss-6", "ml-user-method6", "ml-user-rmp"]), st.integers(0, 6039), st.booleans())
@settings(max_examples=60, deadline=None)
def test_rhot_one_bit_per_block(name, x, anti):
    cb = with_anti(build_preset(name), anti)
    v = to_rhot(cb, x)
    arr = v.to_array()
    assert arr.sum() == cb.weight
    for off, size in zip(cb.block_offsets, cb.site_sizes):
        assert arr[off : off + size].sum() == (size - 1 if anti else 1)
    assert np.array_equal(rhot_matrix(cb, [x])[0], arr)


def test_anti_preserves_hamming_sampled():
    cb = build_preset("ml-user-method4")
    rng = np.random.default_rng(5)
    pairs = rng.integers(0, cb.n_classes, (2000, 2))
    a = rhot_matrix(cb, pairs[:, 0]) != rhot_matrix(cb, pairs[:, 1])
    anti = with_anti(cb)
    b = rhot_matrix(anti, pairs[:, 0]) != rhot_matrix(anti, pairs[:, 1])
    assert np.array_equal(a.sum(axis=1), b.sum(axis=1))


def test_theoretical_min_collision():
    assert theoretical_min_collision(21901, (181, 181)) == 1
    assert theoretical_min_collision(7, (7,)) == 0
    assert theoretical_min_collision(35, (5, 7, 11)) == 1
    assert theoretical_min_collision(35, (11, 7, 5)) == 1
    with pytest.raises(Unreachable):
        theoretical_min_collision(100, (3, 3, 3))


# --- serialization --------------------------------------------------------------


@pytest.mark.parametrize("name", preset_names())
def test_json_roundtrip(name):
    cb = build_preset(name)
    text = codes.dumps(cb)
    doc = json.loads(text)
    assert doc["version"] == 1 and doc["scheme"] == cb.scheme and doc["anti"] is False
    back = codes.loads(text)
    assert back == cb
    assert codes.dumps(back) == text == codes.dumps(build_preset(name))
    assert np.array_equal(back.table, cb.table)


def test_json_gauss_strings_and_anti():
    cb = with_anti(build_preset("cjk-gauss-6"))
    doc = json.loads(codes.dumps(cb))
    assert doc["params"]["moduli"] == ["10+9i", "10-9i", "13+2i", "13-2i", "12+7i", "12-7i"]
    assert codes.loads(codes.dumps(cb)).anti is True


def test_json_rejects_inconsistent_sizes():
    doc = json.loads(codes.dumps(build_remainder_cc(35, moduli=[5, 7])))
    doc["site_sizes"] = [5, 8]
    with pytest.raises(BadParameters):
        codes.codebook_from_dict(doc)
