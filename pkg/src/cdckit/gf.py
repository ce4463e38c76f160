"""Exact arithmetic over GF(q) and its extensions GF(q^m).

Field elements are integer codes.  For GF(p^d) the code in [0, p^d) is read
as the base-p digit vector of the residue polynomial: digit i is the
coefficient of x^i.  For ExtField(GF(q), m) the code in [0, q^m) is read the
same way with base-q digits, each digit itself a GF(q) element code.

Moduli come from a fixed table (lexicographically smallest monic irreducible
polynomial, by digit code) so that element encodings are bit-exact across
runs; anything not in the table is found by the same deterministic search.
"""

from __future__ import annotations

from typing import Optional, Sequence, Tuple

from .errors import InversionOfZero, MixedFields

# (p, degree) -> coefficients (c_0, ..., c_{deg-1}) of the monic modulus
# x^deg + c_{deg-1} x^{deg-1} + ... + c_0.  Lex-smallest irreducible by code
# sum(c_i * p^i); verified by trial division in the test suite.
_MODULUS_TABLE = {
    (2, 2): (1, 1),
    (2, 3): (1, 1, 0),
    (2, 4): (1, 1, 0, 0),
    (2, 5): (1, 0, 1, 0, 0),
    (2, 6): (1, 1, 0, 0, 0, 0),
    (2, 7): (1, 1, 0, 0, 0, 0, 0),
    (2, 8): (1, 1, 0, 1, 1, 0, 0, 0),
    (2, 9): (1, 1, 0, 0, 0, 0, 0, 0, 0),
    (2, 10): (1, 0, 0, 1, 0, 0, 0, 0, 0, 0),
    (2, 11): (1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0),
    (2, 12): (1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0),
    (3, 2): (1, 0),
    (3, 3): (1, 2, 0),
    (3, 4): (2, 1, 0, 0),
    (3, 5): (1, 2, 0, 0, 0),
    (3, 6): (2, 1, 0, 0, 0, 0),
    (5, 2): (2, 0),
    (5, 3): (1, 1, 0),
    (5, 4): (2, 0, 0, 0),
    (7, 2): (1, 0),
    (7, 3): (2, 0, 0),
    (7, 4): (1, 1, 0, 0),
}


def _small_prime(p: int) -> bool:
    if p < 2:
        return False
    for f in range(2, int(p**0.5) + 1):
        if p % f == 0:
            return False
    return True


class GF:
    """The field GF(p^degree) with integer-coded elements.

    Use the :func:`gf` factory to get cached canonical instances.
    """

    def __init__(self, p: int, degree: int = 1, modulus: Optional[Sequence[int]] = None):
        if not _small_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if degree < 1:
            raise ValueError("degree must be positive")
        q = p**degree
        if q > 1 << 16:
            raise ValueError(f"field order {q} exceeds the 2^16 support limit")
        self.p = p
        self.degree = degree
        self.q = q
        if degree == 1:
            self.modulus: Tuple[int, ...] = ()
        elif modulus is not None:
            self.modulus = tuple(int(c) % p for c in modulus)
            if len(self.modulus) != degree:
                raise ValueError("modulus must list `degree` coefficients")
        elif (p, degree) in _MODULUS_TABLE:
            self.modulus = _MODULUS_TABLE[(p, degree)]
        else:
            self.modulus = _search_modulus(gf(p), degree)
        if degree > 1:
            base = gf(p)
            if not is_irreducible(self.modulus, base):
                raise ValueError(f"modulus {self.modulus} is reducible over GF({p})")
            self._exp, self._log = _build_log_tables(
                q, lambda a, b: _poly_mul_code(a, b, base, self.modulus)
            )

    def __repr__(self):
        return f"GF({self.q})"

    def __eq__(self, other):
        return (
            isinstance(other, GF)
            and self.p == other.p
            and self.degree == other.degree
            and self.modulus == other.modulus
        )

    def __hash__(self):
        return hash((self.p, self.degree, self.modulus))

    def check(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise ValueError(f"element code {a} outside [0, {self.q})")
        return a

    def add(self, a: int, b: int) -> int:
        if self.degree == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        p, out, shift = self.p, 0, 1
        while a or b:
            out += ((a + b) % p) * shift
            a //= p
            b //= p
            shift *= p
        return out

    def neg(self, a: int) -> int:
        if self.degree == 1:
            return (-a) % self.p
        if self.p == 2:
            return a
        p, out, shift = self.p, 0, 1
        while a:
            out += (-a % p) * shift
            a //= p
            shift *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.degree == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise InversionOfZero("0 has no multiplicative inverse")
        if self.degree == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if self.degree == 1:
            return pow(a, e, self.p) if e else 1 % self.p
        if a == 0:
            return 0 if e else 1
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def elements(self):
        return range(self.q)

    def digits(self, a: int) -> Tuple[int, ...]:
        """Base-p digit vector of an element code, length `degree`."""
        p = self.p
        return tuple((a // p**i) % p for i in range(self.degree))


def field_arith(field: GF, op: str, *operands: int) -> int:
    """Dispatch one field operation; all operands must share `field`."""
    for x in operands[: 2 if op != "pow" else 1]:
        field.check(x)
    if op == "add":
        return field.add(*operands)
    if op == "mul":
        return field.mul(*operands)
    if op == "neg":
        return field.neg(operands[0])
    if op == "inv":
        return field.inv(operands[0])
    if op == "pow":
        return field.pow(*operands)
    raise ValueError(f"unknown op {op!r}")


def same_field(a: GF, b: GF) -> GF:
    if a != b:
        raise MixedFields(f"operands from {a} and {b}")
    return a


_CACHE: dict = {}


def gf(q: int) -> GF:
    """Canonical GF(q) for a prime power q, with the fixed modulus table."""
    if q in _CACHE:
        return _CACHE[q]
    p, degree = _factor_prime_power(q)
    fld = GF(p, degree)
    _CACHE[q] = fld
    return fld


def _factor_prime_power(q: int) -> Tuple[int, int]:
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if _small_prime(p) and q % p == 0:
            degree = 0
            m = q
            while m % p == 0:
                m //= p
                degree += 1
            if m != 1:
                raise ValueError(f"{q} is not a prime power")
            return p, degree
    raise ValueError(f"{q} is not a prime power")


# -- polynomial helpers over an arbitrary coefficient field -----------------


def _code_to_poly(code: int, q: int) -> list:
    out = []
    while code:
        out.append(code % q)
        code //= q
    return out


def _poly_to_code(poly: Sequence[int], q: int) -> int:
    code = 0
    for c in reversed(poly):
        code = code * q + c
    return code


def _poly_mul_code(a: int, b: int, base: GF, modulus: Sequence[int]) -> int:
    """Multiply residue polynomials given as base-q digit codes."""
    q = base.q
    deg = len(modulus)
    pa = _code_to_poly(a, q)
    pb = _code_to_poly(b, q)
    prod = [0] * (len(pa) + len(pb) - 1) if pa and pb else []
    for i, ca in enumerate(pa):
        if ca == 0:
            continue
        for j, cb in enumerate(pb):
            if cb:
                prod[i + j] = base.add(prod[i + j], base.mul(ca, cb))
    # reduce by x^deg = -modulus
    for i in range(len(prod) - 1, deg - 1, -1):
        c = prod[i]
        if c == 0:
            continue
        prod[i] = 0
        for j, mj in enumerate(modulus):
            if mj:
                prod[i - deg + j] = base.sub(prod[i - deg + j], base.mul(c, mj))
    return _poly_to_code(prod, q)


def _poly_divmod(num: list, den: list, base: GF):
    num = list(num)
    dd = len(den) - 1
    lead_inv = base.inv(den[-1])
    quot = [0] * max(len(num) - dd, 0)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c == 0:
            continue
        f = base.mul(c, lead_inv)
        quot[i - dd] = f
        for j, cj in enumerate(den):
            num[i - dd + j] = base.sub(num[i - dd + j], base.mul(f, cj))
    while num and num[-1] == 0:
        num.pop()
    return quot, num


def is_irreducible(coeffs: Sequence[int], base: GF) -> bool:
    """Trial division of the monic poly x^deg + sum(coeffs[i] x^i)."""
    deg = len(coeffs)
    poly = list(coeffs) + [1]
    if deg == 0:
        return False
    if poly[0] == 0:
        return deg == 1
    q = base.q
    for ddeg in range(1, deg // 2 + 1):
        for code in range(q**ddeg):
            den = _code_to_poly(code, q)
            den += [0] * (ddeg - len(den)) + [1]
            _, rem = _poly_divmod(poly, den, base)
            if not rem:
                return False
    return True


def _search_modulus(base: GF, degree: int) -> Tuple[int, ...]:
    """Lex-smallest (by digit code) monic irreducible of given degree."""
    q = base.q
    for code in range(q**degree):
        poly = _code_to_poly(code, q)
        coeffs = tuple(poly) + (0,) * (degree - len(poly))
        if is_irreducible(coeffs, base):
            return coeffs
    raise RuntimeError("no irreducible polynomial found")  # pragma: no cover


def _factorize(n: int) -> list:
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _build_log_tables(q: int, mul):
    """exp/log tables from the smallest primitive element code."""
    factors = _factorize(q - 1)
    for g in range(2, q):
        ok = True
        for f in factors:
            e = (q - 1) // f
            # compute g^e by square-and-multiply with `mul`
            acc, b, ee = 1, g, e
            while ee:
                if ee & 1:
                    acc = mul(acc, b)
                b = mul(b, b)
                ee >>= 1
            if acc == 1:
                ok = False
                break
        if ok:
            exp = [1] * (q - 1)
            log = [0] * q
            x = 1
            for i in range(q - 1):
                exp[i] = x
                log[x] = i
                x = mul(x, g)
            return exp, log
    raise RuntimeError("no primitive element found")  # pragma: no cover


class ExtField:
    """GF(q^m) built over a base GF(q), with q-Frobenius and expansion.

    Elements are coded in [0, q^m) as base-q digit vectors over the default
    polynomial basis (1, x, ..., x^{m-1}); a custom basis (m element codes,
    linearly independent over GF(q)) changes only `expand`.
    """

    def __init__(self, base: GF, m: int, modulus: Optional[Sequence[int]] = None,
                 basis: Optional[Sequence[int]] = None):
        if m < 1:
            raise ValueError("extension degree must be positive")
        self.base = base
        self.m = m
        self.order = base.q**m
        if m == 1:
            self.modulus: Tuple[int, ...] = ()
        elif modulus is not None:
            self.modulus = tuple(modulus)
            if len(self.modulus) != m or not is_irreducible(self.modulus, base):
                raise ValueError("modulus must be monic irreducible of degree m")
        elif base.degree == 1 and (base.p, m) in _MODULUS_TABLE:
            self.modulus = _MODULUS_TABLE[(base.p, m)]
        else:
            self.modulus = _search_modulus(base, m)
        if m == 1:
            self._exp, self._log = None, None
        else:
            self._exp, self._log = _build_log_tables(
                self.order, lambda a, b: _poly_mul_code(a, b, base, self.modulus)
            )
        if basis is None:
            self.basis = tuple(base.q**i for i in range(m))
            self._expand_inv = None
        else:
            self.basis = tuple(basis)
            self._expand_inv = self._basis_inverse()

    def _basis_inverse(self):
        from .matrices import Matrix, invert

        cols = [self.expand_poly(b) for b in self.basis]
        entries = tuple(cols[j][i] for i in range(self.m) for j in range(self.m))
        return invert(Matrix(self.base, self.m, self.m, entries))

    def __repr__(self):
        return f"ExtField(GF({self.base.q}), m={self.m})"

    def add(self, a: int, b: int) -> int:
        if self.base.p == 2:
            # base-q digits are GF(2^e) codes, so whole-code XOR is digitwise add
            return a ^ b
        q, out, shift = self.base.q, 0, 1
        while a or b:
            out += self.base.add(a % q, b % q) * shift
            a //= q
            b //= q
            shift *= q
        return out

    def neg(self, a: int) -> int:
        if self.base.p == 2:
            return a
        q, out, shift = self.base.q, 0, 1
        while a:
            out += self.base.neg(a % q) * shift
            a //= q
            shift *= q
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return self.base.mul(a, b)
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise InversionOfZero("0 has no multiplicative inverse")
        if self.m == 1:
            return self.base.inv(a)
        return self._exp[(-self._log[a]) % (self.order - 1)]

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if self.m == 1:
            return self.base.pow(a, e)
        if a == 0:
            return 0 if e else 1
        return self._exp[(self._log[a] * e) % (self.order - 1)]

    def frobenius(self, a: int) -> int:
        """x -> x^q, the GF(q)-linear field automorphism."""
        return self.pow(a, self.base.q)

    def expand_poly(self, a: int) -> Tuple[int, ...]:
        q = self.base.q
        return tuple((a // q**i) % q for i in range(self.m))

    def expand(self, a: int) -> Tuple[int, ...]:
        """Coordinates of `a` over `basis`, as GF(q) element codes."""
        digits = self.expand_poly(a)
        if self._expand_inv is None:
            return digits
        from .matrices import Matrix, matmul

        col = Matrix(self.base, self.m, 1, digits)
        return tuple(matmul(self._expand_inv, col).entries)

    def elements(self):
        return range(self.order)
