"""Exact certificate products, computed independently of the Rust code.

Prints each product as a float together with the SHA-256 of its reduced
"numerator/denominator" string; the acceptance suite pins both.
"""
import hashlib
import sys
from fractions import Fraction

from sympy import primerange


def digest(q: Fraction) -> str:
    return hashlib.sha256(f"{q.numerator}/{q.denominator}".encode()).hexdigest()


def perfect_powers(bound: int) -> Fraction:
    out = Fraction(1)
    for p in primerange(2, bound + 1):
        out *= Fraction(p * p - p + 1, p * p)
    return out


def two_squares_count(m: int) -> int:
    squares = {x * x % m for x in range(m)}
    return len({(u + v) % m for u in squares for v in squares})


def two_squares(bound: int) -> Fraction:
    # cover class p = 3 mod 4 (p >= 3), plus the power of two 4096
    out = Fraction(two_squares_count(4096), 4096)
    for p in primerange(3, bound + 1):
        if p % 4 == 3:
            out *= Fraction(p * p - p + 1, p * p)
    return out


if __name__ == "__main__":
    sys.set_int_max_str_digits(0)
    for name, q in [("perfect_powers_1e4", perfect_powers(10**4)), ("two_squares_1e4", two_squares(10**4))]:
        print(name, float(q), digest(q))
