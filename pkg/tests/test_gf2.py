import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skalab.gf2 import (
    BitVec,
    FieldConfigError,
    FieldElem,
    Gf2Error,
    Gf2Matrix,
    dense_from_rows,
    field_add,
    field_div,
    field_inv,
    field_mul,
    identity,
    irreducible_poly,
    matvec,
    rank,
    reverse_bits,
    solve_affine,
    toeplitz_from_seed,
)
from skalab.rng import SeedStream


# ---------------------------------------------------------
# BitVec basics and serialization
# ---------------------------------------------------------

def test_bitvec_bit_order():
    v = BitVec.from_bits([1, 0, 1, 1])
    assert v.n == 4 and v.v == 0b1101
    assert v.bits() == [1, 0, 1, 1]


def test_bitvec_rejects_wide_values():
    with pytest.raises(Gf2Error):
        BitVec(3, 0b1000)
    with pytest.raises(Gf2Error):
        BitVec(0, 1)


def test_hex_roundtrip_lsb_first():
    v = BitVec(12, 0b101100001111)
    assert v.to_hex() == "12:0f0b"
    assert BitVec.from_hex(v.to_hex()) == v
    assert BitVec(0, 0).to_hex() == "0:"
    assert BitVec.from_hex("0:") == BitVec(0, 0)


@given(st.integers(0, 200), st.data())
def test_hex_roundtrip_random(n, data):
    v = BitVec(n, data.draw(st.integers(0, (1 << n) - 1)) if n else 0)
    assert BitVec.from_hex(v.to_hex()) == v


def test_reverse_bits():
    assert reverse_bits(0b110, 3) == 0b011
    assert reverse_bits(0b1, 4) == 0b1000


# ---------------------------------------------------------
# matvec: spec examples
# ---------------------------------------------------------

def test_matvec_identity():
    x = BitVec.from_bits([1, 0, 1, 1])
    assert matvec(identity(4), x) == x


def test_matvec_zero_vector():
    m = toeplitz_from_seed(BitVec(8, 0b10110101), 4, 5)
    assert matvec(m, BitVec(5, 0)) == BitVec(4, 0)


def test_matvec_dense_2x3_hand_xor():
    # rows (110) and (011) as bit sequences, x = 101: output (1, 1)
    m = dense_from_rows([0b011, 0b110], 3)
    assert matvec(m, BitVec.from_bits([1, 0, 1])) == BitVec.from_bits([1, 1])


def test_matvec_dimension_mismatch():
    with pytest.raises(Gf2Error):
        matvec(identity(4), BitVec(3, 0))


@settings(max_examples=60)
@given(st.integers(1, 24), st.integers(1, 24), st.data())
def test_matvec_linearity(rows, cols, data):
    stream = SeedStream("linearity", rows, cols, data.draw(st.integers(0, 2**16)))
    m = toeplitz_from_seed(stream.bitvec(rows + cols - 1), rows, cols)
    x = stream.bitvec(cols)
    y = stream.bitvec(cols)
    assert matvec(m, x.xor(y)) == matvec(m, x).xor(matvec(m, y))


# ---------------------------------------------------------
# Toeplitz construction: spec examples
# ---------------------------------------------------------

def test_toeplitz_1x1():
    m = toeplitz_from_seed(BitVec.from_bits([1]), 1, 1)
    assert m.entry(0, 0) == 1


def test_toeplitz_2x2_diagonal_layout():
    # seed bits 1,0,1 give rows (0,1) and (1,0)
    m = toeplitz_from_seed(BitVec.from_bits([1, 0, 1]), 2, 2)
    assert [[m.entry(i, j) for j in range(2)] for i in range(2)] == [[0, 1], [1, 0]]


def test_toeplitz_seed_length_contract():
    with pytest.raises(Gf2Error):
        toeplitz_from_seed(BitVec(5, 0), 3, 4)  # needs 6 bits
    toeplitz_from_seed(BitVec(6, 0), 3, 4)


def test_toeplitz_constant_diagonals():
    stream = SeedStream("diag")
    m = toeplitz_from_seed(stream.bitvec(10), 5, 6)
    for i in range(1, 5):
        for j in range(1, 6):
            assert m.entry(i, j) == m.entry(i - 1, j - 1)


@settings(max_examples=40)
@given(st.integers(1, 16), st.integers(1, 16), st.integers(0, 10**9))
def test_toeplitz_dense_expansion_matvec_agree(rows, cols, salt):
    stream = SeedStream("expand", salt)
    m = toeplitz_from_seed(stream.bitvec(rows + cols - 1), rows, cols)
    x = stream.bitvec(cols)
    assert matvec(m, x) == matvec(m.to_dense(), x)


def test_row_block_of_toeplitz_matches_dense_slice():
    stream = SeedStream("blocks")
    m = toeplitz_from_seed(stream.bitvec(14), 8, 7)
    x = stream.bitvec(7)
    full = matvec(m, x)
    top = matvec(m.row_block(0, 3), x)
    bottom = matvec(m.row_block(3, 8), x)
    assert full == top.concat(bottom)


# ---------------------------------------------------------
# rank
# ---------------------------------------------------------

def test_rank_zero_and_identity():
    assert rank(dense_from_rows([0, 0, 0], 4)) == 0
    assert rank(identity(5)) == 5


def test_rank_duplicate_rows():
    assert rank(dense_from_rows([0b11, 0b11], 2)) == 1


def test_solve_affine_roundtrip():
    stream = SeedStream("solve")
    for _ in range(50):
        rows, cols = 1 + stream.randrange(10), 1 + stream.randrange(10)
        m = toeplitz_from_seed(stream.bitvec(rows + cols - 1), rows, cols)
        x = stream.bitvec(cols)
        t = matvec(m, x)
        sol = solve_affine(m, t)
        assert sol is not None
        particular, basis = sol
        # every element of the coset solves the system; x is among them
        assert matvec(m, BitVec(cols, particular)) == t
        for b in basis:
            assert matvec(m, BitVec(cols, particular ^ b)) == t
        span = {particular}
        for b in basis:
            span |= {s ^ b for s in span}
        assert x.v in span
        assert len(span) == 1 << (cols - rank(m))


def test_solve_affine_inconsistent():
    m = dense_from_rows([0b1, 0b1], 1)  # x = 0 and x = 1 simultaneously
    assert solve_affine(m, BitVec.from_bits([0, 1])) is None


# ---------------------------------------------------------
# GF(2^n) field
# ---------------------------------------------------------

def test_registered_polynomials_pinned():
    assert irreducible_poly(2) == 0b111
    assert irreducible_poly(3) == 0b1011
    assert irreducible_poly(4) == 0b10011
    assert irreducible_poly(8) == 0x11B
    assert irreducible_poly(16) == 0x1002B
    assert irreducible_poly(32) == (1 << 32) | 0b10001101
    assert irreducible_poly(64) == (1 << 64) | 0b11011


def test_field_degree_configuration_error():
    with pytest.raises(FieldConfigError):
        irreducible_poly(65)
    with pytest.raises(FieldConfigError):
        FieldElem(0, 1)


def test_field_mul_identity_and_spec_examples():
    x = FieldElem(0b010, 3)
    assert field_mul(x, FieldElem(1, 3)) == x
    assert field_mul(x, x) == FieldElem(0b100, 3)  # x*x = x^2, no reduction
    assert field_mul(FieldElem(0b100, 3), x) == FieldElem(0b011, 3)  # x^3 = x+1


@pytest.mark.parametrize("n", [2, 3, 4])
def test_field_axioms_exhaustive(n):
    elems = [FieldElem(v, n) for v in range(1 << n)]
    for a in elems:
        assert field_mul(a, FieldElem(1, n)) == a
        for b in elems:
            assert field_mul(a, b) == field_mul(b, a)
            ab = field_add(a, b)
            for c in elems[:: max(1, n - 1)]:
                assert field_mul(field_mul(a, b), c) == field_mul(a, field_mul(b, c))
                assert field_mul(ab, c) == field_add(field_mul(a, c), field_mul(b, c))


@pytest.mark.parametrize("n", [2, 3, 4, 8])
def test_field_inverses_exhaustive(n):
    one = FieldElem(1, n)
    for v in range(1, 1 << n):
        a = FieldElem(v, n)
        assert field_mul(a, field_inv(a)) == one
    with pytest.raises(ZeroDivisionError):
        field_inv(FieldElem(0, n))
    assert field_div(FieldElem(3, n), FieldElem(3, n)) == one


def test_matrix_serialization_roundtrip():
    stream = SeedStream("wire")
    m = toeplitz_from_seed(stream.bitvec(12), 5, 8)
    assert Gf2Matrix.deserialize(m.serialize()) == m
