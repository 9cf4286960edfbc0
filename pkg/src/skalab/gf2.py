"""Bit vectors, GF(2) matrices, and GF(2^n) field arithmetic.

Representation conventions (used everywhere in this package):

* A bit vector of length ``n`` is stored as a Python integer ``v`` with
  ``0 <= v < 2**n``.  Bit ``i`` of the vector is ``(v >> i) & 1``, i.e.
  index 0 is the least significant bit and the first bit of the sequence.
* Hex serialization is length-prefixed, ``len:hex``, where the hex digits
  encode the bytes ``v & 0xff``, ``(v >> 8) & 0xff``, ... in order
  (little-endian within byte, least significant byte first).
* A dense ``rows x cols`` matrix stores ``rows*cols`` bits; entry (i, j)
  is data bit ``i*cols + j``.
* A Toeplitz ``rows x cols`` matrix stores ``rows + cols - 1`` diagonal
  bits; entry (i, j) is diagonal bit ``i - j + cols - 1``, so every
  descending diagonal is constant.
* GF(2^n) elements are n-bit polynomials over GF(2) in the monomial basis
  (bit i = coefficient of x^i), reduced modulo the lexicographically-first
  irreducible polynomial of degree n (see ``irreducible_poly``).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache


class Gf2Error(ValueError):
    """Contract violation in a GF(2) operation (dimension or value mismatch)."""


@dataclass(frozen=True)
class BitVec:
    """Immutable bit vector: ``n`` bits stored LSB-first in the integer ``v``."""

    n: int
    v: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise Gf2Error(f"negative length {self.n}")
        if self.v < 0 or self.v >> self.n:
            raise Gf2Error(f"value {self.v:#x} does not fit in {self.n} bits")

    @staticmethod
    def zeros(n: int) -> "BitVec":
        return BitVec(n, 0)

    @staticmethod
    def from_bits(bits) -> "BitVec":
        v = 0
        n = 0
        for b in bits:
            if b:
                v |= 1 << n
            n += 1
        return BitVec(n, v)

    def bit(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise Gf2Error(f"bit index {i} out of range for length {self.n}")
        return (self.v >> i) & 1

    def bits(self) -> list[int]:
        return [(self.v >> i) & 1 for i in range(self.n)]

    def weight(self) -> int:
        return self.v.bit_count()

    def xor(self, other: "BitVec") -> "BitVec":
        if self.n != other.n:
            raise Gf2Error(f"length mismatch {self.n} != {other.n}")
        return BitVec(self.n, self.v ^ other.v)

    def concat(self, other: "BitVec") -> "BitVec":
        return BitVec(self.n + other.n, self.v | (other.v << self.n))

    def slice(self, start: int, stop: int) -> "BitVec":
        if not 0 <= start <= stop <= self.n:
            raise Gf2Error(f"slice [{start}:{stop}] out of range for length {self.n}")
        width = stop - start
        return BitVec(width, (self.v >> start) & ((1 << width) - 1))

    def to_hex(self) -> str:
        """Length-prefixed hex form ``len:hex`` (LSB-first bytes)."""
        nbytes = (self.n + 7) // 8
        return f"{self.n}:{self.v.to_bytes(nbytes, 'little').hex()}"

    @staticmethod
    def from_hex(text: str) -> "BitVec":
        length_s, _, hex_s = text.partition(":")
        n = int(length_s)
        v = int.from_bytes(bytes.fromhex(hex_s), "little") if hex_s else 0
        if v >> n:
            raise Gf2Error(f"hex payload wider than declared length in {text!r}")
        return BitVec(n, v)

    def __str__(self) -> str:
        return self.to_hex()


_REV8 = bytes(int(f"{b:08b}"[::-1], 2) for b in range(256))


def reverse_bits(v: int, width: int) -> int:
    """Reverse the low `width` bits of v."""
    r = 0
    shift = 0
    while shift < width:
        r = (r << 8) | _REV8[(v >> shift) & 0xFF]
        shift += 8
    return r >> (shift - width)


@dataclass(frozen=True)
class Gf2Matrix:
    """GF(2) matrix, dense or Toeplitz, with bit data packed in a BitVec."""

    kind: str  # "dense" | "toeplitz"
    rows: int
    cols: int
    data: BitVec

    def __post_init__(self) -> None:
        if self.kind not in ("dense", "toeplitz"):
            raise Gf2Error(f"unknown matrix kind {self.kind!r}")
        if self.rows < 0 or self.cols < 0:
            raise Gf2Error(f"negative shape {self.rows}x{self.cols}")
        if self.kind == "dense":
            want = self.rows * self.cols
        else:
            want = self.rows + self.cols - 1 if self.rows and self.cols else 0
        if self.data.n != want:
            raise Gf2Error(
                f"{self.kind} {self.rows}x{self.cols} needs {want} data bits, got {self.data.n}"
            )

    def entry(self, i: int, j: int) -> int:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise Gf2Error(f"entry ({i},{j}) out of range")
        if self.kind == "dense":
            return self.data.bit(i * self.cols + j)
        return self.data.bit(i - j + self.cols - 1)

    def row_ints(self) -> tuple:
        """Rows as packed integers (bit j of row i = entry (i, j))."""
        return _row_ints_cached(self.kind, self.rows, self.cols, self.data.v)

    def to_dense(self) -> "Gf2Matrix":
        if self.kind == "dense":
            return self
        v = 0
        for i, r in enumerate(self.row_ints()):
            v |= r << (i * self.cols)
        return Gf2Matrix("dense", self.rows, self.cols, BitVec(self.rows * self.cols, v))

    def row_block(self, start: int, stop: int) -> "Gf2Matrix":
        """Sub-matrix of rows [start, stop); stays Toeplitz for Toeplitz input."""
        if not 0 <= start <= stop <= self.rows:
            raise Gf2Error(f"row block [{start}:{stop}] out of range")
        nrows = stop - start
        if self.kind == "toeplitz":
            if nrows == 0:
                return Gf2Matrix("toeplitz", 0, self.cols, BitVec(0, 0))
            return Gf2Matrix(
                "toeplitz", nrows, self.cols, self.data.slice(start, start + nrows + self.cols - 1)
            )
        v = 0
        for i, r in enumerate(self.row_ints()[start:stop]):
            v |= r << (i * self.cols)
        return Gf2Matrix("dense", nrows, self.cols, BitVec(nrows * self.cols, v))

    def serialize(self) -> str:
        """Wire form ``kind:rows:cols:seedhex`` used in transcript logs."""
        return f"{self.kind}:{self.rows}:{self.cols}:{self.data.to_hex()}"

    @staticmethod
    def deserialize(text: str) -> "Gf2Matrix":
        kind, rows, cols, payload = text.split(":", 3)
        return Gf2Matrix(kind, int(rows), int(cols), BitVec.from_hex(payload))


@lru_cache(maxsize=4096)
def _row_ints_cached(kind: str, rows: int, cols: int, data_v: int) -> list[int]:
    mask = (1 << cols) - 1
    if kind == "dense":
        return [(data_v >> (i * cols)) & mask for i in range(rows)]
    # Toeplitz row i has bit j = d[i - j + cols - 1]: the reversed window d[i : i+cols].
    return [reverse_bits((data_v >> i) & mask, cols) for i in range(rows)]


def dense_from_rows(rows: list[int], cols: int) -> Gf2Matrix:
    v = 0
    for i, r in enumerate(rows):
        if r >> cols:
            raise Gf2Error(f"row {i} wider than {cols} bits")
        v |= r << (i * cols)
    return Gf2Matrix("dense", len(rows), cols, BitVec(len(rows) * cols, v))


def identity(n: int) -> Gf2Matrix:
    return dense_from_rows([1 << i for i in range(n)], n)


def toeplitz_from_seed(seed_bits: BitVec, rows: int, cols: int) -> Gf2Matrix:
    """Toeplitz matrix with diagonal bits taken from `seed_bits`.

    The seed must hold exactly rows + cols - 1 bits; entry (i, j) is seed
    bit i - j + cols - 1, so the matrix is fully determined by the seed.
    """
    want = rows + cols - 1 if rows and cols else 0
    if seed_bits.n != want:
        raise Gf2Error(f"toeplitz {rows}x{cols} needs seed of {want} bits, got {seed_bits.n}")
    return Gf2Matrix("toeplitz", rows, cols, seed_bits)


def matvec(m: Gf2Matrix, x: BitVec) -> BitVec:
    """GF(2) matrix-vector product; result bit i is <row i, x> mod 2."""
    if x.n != m.cols:
        raise Gf2Error(f"matvec: vector length {x.n} != cols {m.cols}")
    out = 0
    for i, r in enumerate(m.row_ints()):
        out |= ((r & x.v).bit_count() & 1) << i
    return BitVec(m.rows, out)


def _eliminate(rows: list[int], cols: int, augmented: bool = False):
    """Row-reduce packed rows; returns (reduced rows, pivot column list).

    With augmented=True the last bit position (index `cols`) is the
    right-hand side and is never chosen as a pivot.
    """
    rows = list(rows)
    pivots: list[int] = []
    rank = 0
    for j in range(cols):
        pivot = None
        for i in range(rank, len(rows)):
            if (rows[i] >> j) & 1:
                pivot = i
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for i in range(len(rows)):
            if i != rank and (rows[i] >> j) & 1:
                rows[i] ^= rows[rank]
        pivots.append(j)
        rank += 1
    return rows, pivots


def rank(m: Gf2Matrix) -> int:
    """GF(2) rank via Gaussian elimination."""
    _, pivots = _eliminate(m.row_ints(), m.cols)
    return len(pivots)


def solve_affine(m: Gf2Matrix, target: BitVec):
    """All solutions of M x = target.

    Returns (particular, kernel_basis) with everything packed as ints of
    m.cols bits, or None if the system is inconsistent.  The full solution
    set is {particular XOR any subset-XOR of kernel_basis}.
    """
    if target.n != m.rows:
        raise Gf2Error(f"solve: target length {target.n} != rows {m.rows}")
    cols = m.cols
    aug = [r | (target.bit(i) << cols) for i, r in enumerate(m.row_ints())]
    red, pivots = _eliminate(aug, cols)
    rank_ = len(pivots)
    for r in red[rank_:]:
        if (r >> cols) & 1:
            return None
    particular = 0
    for i, j in enumerate(pivots):
        if (red[i] >> cols) & 1:
            particular |= 1 << j
    pivot_set = set(pivots)
    free = [j for j in range(cols) if j not in pivot_set]
    basis = []
    for f in free:
        vec = 1 << f
        for i, j in enumerate(pivots):
            if (red[i] >> f) & 1:
                vec |= 1 << j
        basis.append(vec)
    return particular, basis


# ---------------------------------------------------------------------------
# GF(2^n) field arithmetic
# ---------------------------------------------------------------------------


class FieldConfigError(ValueError):
    """No irreducible polynomial is registered/computable for the degree."""


_MAX_FIELD_DEGREE = 64


def _poly_mulmod(a: int, b: int, f: int, n: int) -> int:
    """Carry-less multiply of a and b reduced modulo f (degree n)."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if (a >> n) & 1:
            a ^= f
    return r


def _poly_mod(a: int, f: int) -> int:
    fl = f.bit_length()
    while a.bit_length() >= fl:
        a ^= f << (a.bit_length() - fl)
    return a


def _poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _poly_mod(a, b)
    return a


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _is_irreducible(f: int, n: int) -> bool:
    # f is irreducible of degree n over GF(2) iff x^(2^n) == x (mod f) and
    # gcd(x^(2^(n/p)) - x, f) == 1 for every prime p dividing n.
    x = 0b10
    t = x
    for _ in range(n):
        t = _poly_mulmod(t, t, f, n)
    if t != x:
        return False
    for p in _prime_factors(n):
        t = x
        for _ in range(n // p):
            t = _poly_mulmod(t, t, f, n)
        if _poly_gcd(t ^ x, f) != 1:
            return False
    return True


@lru_cache(maxsize=None)
def irreducible_poly(n: int) -> int:
    """Lexicographically-first irreducible polynomial of degree n over GF(2).

    Returned as an integer with bit i = coefficient of x^i (bit n always
    set).  Fixing the lex-first choice makes every transcript reproducible.
    """
    if not 2 <= n <= _MAX_FIELD_DEGREE:
        raise FieldConfigError(f"no irreducible polynomial registered for degree {n}")
    base = 1 << n
    # Candidates need a constant term, else divisible by x.
    for low in range(1, 1 << n, 2):
        f = base | low
        if _is_irreducible(f, n):
            return f
    raise FieldConfigError(f"no irreducible polynomial found for degree {n}")


@dataclass(frozen=True)
class FieldElem:
    """Element of GF(2^n): an n-bit polynomial representative."""

    value: int
    n: int

    def __post_init__(self) -> None:
        if not 2 <= self.n <= _MAX_FIELD_DEGREE:
            raise FieldConfigError(f"unsupported field degree {self.n}")
        if not 0 <= self.value < (1 << self.n):
            raise Gf2Error(f"value {self.value:#x} not an {self.n}-bit polynomial")


def _check_same_field(a: FieldElem, b: FieldElem) -> None:
    if a.n != b.n:
        raise Gf2Error(f"field degree mismatch {a.n} != {b.n}")


def field_add(a: FieldElem, b: FieldElem) -> FieldElem:
    _check_same_field(a, b)
    return FieldElem(a.value ^ b.value, a.n)


def field_mul(a: FieldElem, b: FieldElem) -> FieldElem:
    _check_same_field(a, b)
    return FieldElem(_poly_mulmod(a.value, b.value, irreducible_poly(a.n), a.n), a.n)


def field_pow(a: FieldElem, e: int) -> FieldElem:
    r = FieldElem(1, a.n)
    base = a
    while e:
        if e & 1:
            r = field_mul(r, base)
        base = field_mul(base, base)
        e >>= 1
    return r


def field_inv(a: FieldElem) -> FieldElem:
    if a.value == 0:
        raise ZeroDivisionError("inverse of zero in GF(2^n)")
    # a^(2^n - 2) = a^{-1} in GF(2^n).
    return field_pow(a, (1 << a.n) - 2)


def field_div(a: FieldElem, b: FieldElem) -> FieldElem:
    return field_mul(a, field_inv(b))


def mul_int(a: int, b: int, n: int) -> int:
    """Field multiplication on raw n-bit ints (hot-path convenience)."""
    return _poly_mulmod(a, b, irreducible_poly(n), n)
