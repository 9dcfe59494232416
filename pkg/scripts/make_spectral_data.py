"""Regenerate data/eigenforms.txt from exact q-expansions.

Level one: the forms Delta * E_{k-12} for k in 12, 16, ..., 26, each the
only eigenform of its weight.  Weight 12 at levels 2 and 3: S_12(Gamma_0(2))
is spanned by Delta(z), Delta(2z) and S_12(Gamma_0(3)) adds exactly one
newform, found as the T_2-eigenvector in span{Delta(z), Delta(3z),
eta(z)^12 eta(3z)^12}.
"""
import argparse
from pathlib import Path

from toral_rtf import qexp
from toral_rtf.spectral import format_spectral_data, level_one_datum, newform_datum

LEVEL_ONE_TWISTS = (5, 8, 12, 13, 17, 21, 24, 28, 29, -3, -4, -7, -8, -11, -15, -19, -20, -23, -24)
LEVEL_THREE_TWISTS = (5, 8, 13, 17, 29, -4, -7, -8, -11, -19, -20, -23)


def level_three_newform(n: int) -> list[int]:
    d = qexp.delta_coefficients(n)
    d3 = [d[i // 3] if i % 3 == 0 else 0 for i in range(n)]
    e = qexp.eta_product({1: 12, 3: 12}, n)
    # T_2 e = 78 e + Delta + 729 Delta(3z) and T_2 = tau(2) = -24 on the old space
    return [102 * a + b + 729 * c for a, b, c in zip(e, d, d3)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data" / "eigenforms.txt"))
    ap.add_argument("--coeffs", type=int, default=4000)
    args = ap.parse_args()
    data = []
    for k in qexp.LEVEL_ONE_WEIGHTS:
        d = level_one_datum(k, LEVEL_ONE_TWISTS, n_coeffs=args.coeffs)
        if k == 12:
            d.complete_for_level.update({2: True, 3: True})
        data.append(d)
    f3 = newform_datum("level3_k12", level_three_newform(args.coeffs), 12, 3, LEVEL_THREE_TWISTS)
    f3.complete_for_level[3] = True
    f3.provenance.insert(0, "q-expansion 102 eta(z)^12 eta(3z)^12 + Delta(z) + 729 Delta(3z)")
    data.append(f3)
    header = "# Eigenform data; regenerate with scripts/make_spectral_data.py\n"
    Path(args.out).write_text(header + format_spectral_data(data), encoding="utf-8")
    print(f"wrote {len(data)} forms to {args.out}")


if __name__ == "__main__":
    main()
