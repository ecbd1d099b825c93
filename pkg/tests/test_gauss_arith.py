import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catcode.errors import InsufficientModuli, NotAModulus
from catcode.gauss_arith import (
    GaussInt,
    build_disc_embedding,
    build_modulus,
    first_quadrant,
    gauss_circle_count,
    gauss_divmod,
    gauss_gcd,
    gauss_norm,
    pairwise_coprime_gauss,
    residue_index,
    select_gauss_moduli,
)

G = GaussInt
UNITS = [G(1, 0), G(0, 1), G(-1, 0), G(0, -1)]
small = st.integers(-300, 300)
gauss = st.builds(G, small, small)
nonzero = gauss.filter(lambda z: gauss_norm(z) > 0)


def divides(m, z):
    """m | z in Z[i], checked with exact integer arithmetic."""
    n = gauss_norm(m)
    w = z * m.conj()
    return w.re % n == 0 and w.im % n == 0


@pytest.mark.parametrize("text, z", [("10+9i", G(10, 9)), ("10-9i", G(10, -9)), ("7", G(7, 0)), ("-i", G(0, -1)), ("10+i", G(10, 1)), ("-3-4i", G(-3, -4))])
def test_parse(text, z):
    assert G.parse(text) == z


@pytest.mark.parametrize("z", [G(10, 9), G(0, 0), G(-3, -1), G(5, 0)])
def test_format_roundtrip(z):
    s = str(z)
    assert " " not in s and s.endswith("i")
    assert G.parse(s) == z


def test_norm_examples():
    assert gauss_norm(G(10, 9)) == 181
    assert gauss_norm(G(0, 0)) == 0
    assert gauss_norm(G(8, 5)) == 89


def test_divmod_examples():
    assert gauss_divmod(G(5), G(1, 2)) == (G(1, -2), G(0, 0))
    assert gauss_divmod(G(7, -3), G(1)) == (G(7, -3), G(0, 0))
    q, r = gauss_divmod(G(3, 4), G(2))
    assert (q, r) == (G(2, 2), G(-1, 0))
    assert gauss_norm(r) <= 2


def test_divmod_by_zero():
    with pytest.raises(ZeroDivisionError):
        gauss_divmod(G(1, 1), G(0, 0))


def test_divmod_invariant_randomised():
    rng = random.Random(1)
    for _ in range(100_000):
        z = G(rng.randint(-10**6, 10**6), rng.randint(-10**6, 10**6))
        m = G(rng.randint(-1000, 1000), rng.randint(-1000, 1000))
        if gauss_norm(m) == 0:
            continue
        q, r = gauss_divmod(z, m)
        assert q * m + r == z
        assert 2 * gauss_norm(r) <= gauss_norm(m)


def test_gcd_examples():
    assert gauss_gcd(G(1, 2), G(1, -2)) == G(1, 0)
    assert gauss_gcd(G(-3, 5), G(0)) == first_quadrant(G(-3, 5))
    assert gauss_gcd(G(10, 9), G(13, 2)) == G(1, 0)


@given(nonzero, nonzero, gauss.filter(lambda z: gauss_norm(z) > 1))
@settings(max_examples=300, deadline=None)
def test_gcd_is_greatest_common_divisor(a, b, c):
    a, b = a * c, b * c  # force a nontrivial common factor
    g = gauss_gcd(a, b)
    assert g.re > 0 and g.im >= 0
    assert divides(g, a) and divides(g, b)
    assert divides(c, g)


def test_preset_moduli_pairwise_coprime():
    cjk = [G.parse(s) for s in ("10+9i", "10-9i", "13+2i", "13-2i", "12+7i", "12-7i")]
    assert pairwise_coprime_gauss(cjk)
    ml = [G.parse(s) for s in ("8+5i", "8-5i", "9+4i", "9-4i", "10+i", "10+3i")]
    assert [gauss_norm(m) for m in ml] == [89, 89, 97, 97, 101, 109]
    assert pairwise_coprime_gauss(ml)
    assert not pairwise_coprime_gauss([G(1, 2), G(-2, 1)])  # associates


def test_build_modulus_small():
    m = build_modulus(G(1, 1))
    assert m.norm == 2 and len(m.residues) == 2
    assert G(0, 0) in m.residues
    assert len(build_modulus(G(2)).residues) == 4
    assert len(build_modulus(G(13, 2)).residues) == 173


@pytest.mark.parametrize("p", [G(0, 0), G(1, 0), G(0, -1)])
def test_build_modulus_rejects_units(p):
    with pytest.raises(NotAModulus):
        build_modulus(p)


def test_residue_count_equals_norm_exhaustive():
    seen = 0
    for a in range(0, 23):
        for b in range(0, 23):
            n = a * a + b * b
            if 2 <= n <= 500:
                m = build_modulus(G(a, b))
                assert len(m.residues) == n
                # representatives are pairwise incongruent
                reps = m.residues
                if n <= 130:
                    assert all(not divides(m.value, reps[i] - reps[j]) for i in range(n) for j in range(i + 1, n))
                seen += 1
    assert seen > 300


def test_residue_index_examples():
    m = build_modulus(G(1, 2))
    assert residue_index(m, G(5)) == residue_index(m, G(0))
    m = build_modulus(G(10, 9))
    z = G(37, -12)
    assert residue_index(m, z) == residue_index(m, z + m.value)


def test_residue_index_congruence_randomised():
    rng = random.Random(3)
    mods = [build_modulus(G(a, b)) for a, b in [(10, 9), (13, -2), (2, 0), (1, 1), (8, 5), (12, 7)]]
    for _ in range(20_000):
        m = rng.choice(mods)
        z1 = G(rng.randint(-200, 200), rng.randint(-200, 200))
        z2 = G(rng.randint(-200, 200), rng.randint(-200, 200)) if rng.random() < 0.5 else z1 + m.value * G(rng.randint(-5, 5), rng.randint(-5, 5))
        same = residue_index(m, z1) == residue_index(m, z2)
        assert same == divides(m.value, z1 - z2)


def test_vectorised_indices_match_scalar():
    m = build_modulus(G(12, -7))
    rng = np.random.default_rng(0)
    re = rng.integers(-500, 500, 2000)
    im = rng.integers(-500, 500, 2000)
    got = m.indices(re, im)
    assert got.tolist() == [residue_index(m, G(int(a), int(b))) for a, b in zip(re, im)]


def test_disc_examples():
    d = build_disc_embedding(1)
    assert d.points == [G(0)] and d.radius_sq == 0
    d = build_disc_embedding(5)
    assert d.points == [G(0), G(1), G(0, 1), G(-1), G(0, -1)] and d.radius_sq == 1


def test_disc_cjk_radius():
    d = build_disc_embedding(21901)
    assert gauss_circle_count(d.radius_sq) >= 21901 > gauss_circle_count(d.radius_sq - 1)
    assert d.radius_sq == 6970
    assert 83**2 < d.radius_sq < 84**2
    # the published radius 82 holds too few points
    assert gauss_circle_count(82**2) < 21901


def test_disc_invariants_many_sizes():
    rng = random.Random(11)
    sizes = [2, 3, 9, 13, 100, 6040] + [rng.randint(1, 10**5) for _ in range(6)] + [10**5]
    for n in sizes:
        d = build_disc_embedding(n)
        pts = list(zip(d.re.tolist(), d.im.tolist()))
        assert len(pts) == n == len(set(pts))
        norms = [a * a + b * b for a, b in pts]
        assert norms == sorted(norms)
        assert max(norms) == d.radius_sq
        assert gauss_circle_count(d.radius_sq - 1) < n <= gauss_circle_count(d.radius_sq)


def test_select_gauss_moduli():
    got = select_gauss_moduli(21901, 2, 0.5, 6)
    assert len(got) == 6 and pairwise_coprime_gauss(got)
    four_t2 = 4 * build_disc_embedding(21901).radius_sq
    assert all(g.re > 0 and g.im >= 0 for g in got)
    assert all(gauss_norm(g) ** 2 >= four_t2 for g in got)
    norms = [gauss_norm(g) for g in got]
    assert norms == sorted(norms)
    one = select_gauss_moduli(21901, 2, 0.5, 1)
    assert len(one) == 1 and gauss_norm(one[0]) >= 2


def test_select_gauss_moduli_exhausted():
    with pytest.raises(InsufficientModuli):
        select_gauss_moduli(100, 2, 0.05, 50)
