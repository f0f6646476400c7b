"""Builds the 50-form classification corpus.

Expected cases come from discriminant arithmetic alone; each entry also
records a brute-force density estimate of the value set at window 1e5, and
positive cases over Z have their progression checked against enumerated
values on a box.
"""
import json
import math
import sys

import numpy as np

WINDOW = 10**5
BOX = 1000

FORMS = [
    # non-square discriminant
    (1, 0, 1, "N"), (1, 1, 1, "N"), (1, 0, 2, "N"), (2, 1, 3, "N"), (1, 0, 3, "N"), (3, 2, 5, "N"),
    (1, 1, 2, "N"), (2, 0, 5, "N"), (1, 0, 1, "Z"), (1, 0, -2, "Z"), (1, 1, -1, "Z"), (2, -3, -1, "Z"),
    (1, 0, -3, "Z"), (-1, 1, -3, "Z"), (5, 3, 1, "N"), (1, 4, 1, "N"),
    # zero discriminant
    (1, 2, 1, "N"), (1, 0, 0, "N"), (4, 4, 1, "N"), (2, 0, 0, "Z"), (1, -2, 1, "Z"), (-3, 6, -3, "Z"),
    (9, 6, 1, "N"), (0, 0, 7, "Z"),
    # square discriminant, ac = 0
    (0, 1, 0, "Z"), (1, 1, 0, "N"), (0, 2, 3, "N"), (5, -3, 0, "Z"), (0, 4, 1, "N"), (2, 3, 0, "Z"),
    (0, -6, 0, "Z"),
    # square discriminant, ac != 0, over Z
    (1, 3, 2, "Z"), (1, 0, -1, "Z"), (2, 5, -3, "Z"), (3, -7, 2, "Z"), (-2, 1, 3, "Z"), (1, 5, 6, "Z"),
    (1, 0, -4, "Z"), (-1, 0, 9, "Z"), (6, 5, 1, "Z"),
    # square discriminant, ac != 0, over N
    (1, 3, 2, "N"), (1, 5, 6, "N"), (2, 5, 2, "N"), (1, 4, 3, "N"), (3, 10, 3, "N"), (1, 7, 6, "N"),
    (2, 7, 3, "N"), (6, 5, 1, "N"), (1, 6, 5, "N"), (4, 9, 2, "N"),
]


def expected_case(a, b, c, ambient):
    d = b * b - 4 * a * c
    q = math.isqrt(d) if d >= 0 else None
    if q is None or q * q != d:
        return "SmallNonSquareD"
    if d == 0:
        return "SmallZeroD"
    if a * c == 0:
        return "PositiveAC0"
    return "PositiveZ" if ambient == "Z" else "MixedN"


def values_n(a, b, c):
    seen = np.zeros(WINDOW + 1, dtype=bool)
    seen[0] = True
    xmax = WINDOW if a == 0 else math.isqrt(WINDOW // a)
    for x in range(xmax + 1):
        if c > 0:
            ymax = math.isqrt(WINDOW // c)
        elif b * x > 0:
            ymax = WINDOW // (b * x)
        else:
            ymax = 0
        y = np.arange(0, ymax + 1, dtype=np.int64)
        v = a * x * x + b * x * y + c * y * y
        seen[v[v <= WINDOW]] = True
    return seen


def values_z(a, b, c):
    x = np.arange(-BOX, BOX + 1, dtype=np.int64)[:, None]
    y = np.arange(-BOX, BOX + 1, dtype=np.int64)[None, :]
    v = (a * x * x + b * x * y + c * y * y).ravel()
    v = v[np.abs(v) <= WINDOW]
    seen = np.zeros(2 * WINDOW + 1, dtype=bool)
    seen[v + WINDOW] = True
    return seen


def main(out):
    assert len(FORMS) == 50 and len(set(FORMS)) == 50
    corpus = []
    for a, b, c, ambient in FORMS:
        case = expected_case(a, b, c, ambient)
        if ambient == "N":
            seen = values_n(a, b, c)
        else:
            seen = values_z(a, b, c)
            if case == "PositiveZ":
                q = math.isqrt(b * b - 4 * a * c)
                step, offset = 2 * a * q * (b - q), a * (b * b - q * q)
                for z in range(-5, 6):
                    e = offset + step * z
                    assert abs(e) > WINDOW or seen[e + WINDOW], (a, b, c, e)
        corpus.append({
            "a": a, "b": b, "c": c, "ambient": ambient,
            "discriminant": b * b - 4 * a * c,
            "expected_case": case,
            "empirical_density": round(float(seen.mean()), 6),
        })
    with open(out, "w") as f:
        json.dump(corpus, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/fixtures/form_corpus.json")
