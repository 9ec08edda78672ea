#!/usr/bin/env python3
"""Compare leading division-polynomial coefficients with their closed forms."""
import argparse
from dataclasses import dataclass

from sigma_forge import ring_core as rc
from sigma_forge.nplication import cj_formula, compare_with_oracle, leading_coefficients


@dataclass(frozen=True)
class CjConfig:
    n_max: int = 7
    oracle: bool = False


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=CjConfig.n_max)
    ap.add_argument("--oracle", action="store_true", help="also compare with the recurrence")
    args = ap.parse_args(argv)
    cfg = CjConfig(args.n_max, args.oracle)
    bad = 0
    for n in range(2, cfg.n_max + 1):
        top = min(n * n - 1, 6 if n % 2 else 5)
        got = leading_coefficients(n, top)
        for j in range(top + 1):
            same = got[j] == cj_formula(n, j)
            bad += not same
            print(f"n={n} C_{j}: {rc.to_text(got[j])}{'' if same else '  MISMATCH'}")
        if cfg.oracle and n <= 5:
            print(f"n={n} series/recurrence sign: {compare_with_oracle(n).sign}")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
