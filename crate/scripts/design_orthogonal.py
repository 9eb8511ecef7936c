"""Exact expected decoding error of the designed orthogonal instance.

Each (u, v) pair reaches B as a distinct basis state, so the pinched decoder
projects onto the received point and splits it evenly among codewords that
share it. The expected error over random codebooks is then a finite sum,
evaluated here with rationals.
"""

import itertools
import json
import pathlib
from fractions import Fraction

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "fixtures" / "designed_orthogonal.expected.json"


def expected_error(nu, nv, m=2, l=2):
    total = Fraction(0)
    for us in itertools.product(range(nu), repeat=m):
        for vs in itertools.product(range(nv), repeat=m * l):
            count = {}
            per_message = [{} for _ in range(m)]
            for i in range(m):
                for j in range(l):
                    x = (us[i], vs[i * l + j])
                    count[x] = count.get(x, 0) + 1
                    per_message[i][x] = per_message[i].get(x, 0) + 1
            success = sum(Fraction(n * n, l * count[x]) for i in range(m) for x, n in per_message[i].items()) / m
            total += 1 - success
    return total / (nu**m * nv ** (m * l))


def main():
    table = {f"{nu}x{nv}": float(expected_error(nu, nv)) for nu, nv in [(2, 2), (2, 4), (4, 4), (2, 8)]}
    chosen = expected_error(2, 8)
    out = {
        "model": "data/models/designed_orthogonal.json",
        "strategy": "data/strategies/designed_orthogonal.json",
        "m": 2,
        "l": 2,
        "expected_error": float(chosen),
        "expected_error_fraction": str(chosen),
        "threshold": 0.1,
        "alternatives": table,
    }
    OUT.write_text(json.dumps(out, indent=1) + "\n")
    print(json.dumps(out, indent=1))


if __name__ == "__main__":
    main()
