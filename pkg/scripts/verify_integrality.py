#!/usr/bin/env python3
"""Report the integrality class of sigma and sigma^2 at a chosen order."""
import argparse
import time
from dataclasses import dataclass

from sigma_forge.curve_expansions import SYMBOLIC
from sigma_forge.series_engine import hurwitz_report
from sigma_forge.sigma_engine import SigmaKit


@dataclass(frozen=True)
class IntegralityConfig:
    order: int = 24


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order", type=int, default=IntegralityConfig.order)
    cfg = IntegralityConfig(ap.parse_args(argv).order)
    t0 = time.perf_counter()
    kit = SigmaKit(SYMBOLIC, cfg.order)
    for name, series in (("sigma^2", kit.sigma_sq(cfg.order)), ("sigma", kit.sigma(cfg.order))):
        rep = hurwitz_report(series)
        line = f"{name}: {rep.overall.name}"
        if rep.first_failing is not None:
            line += (f", first outside Z[mu] at u^{rep.first_failing}/{rep.first_failing}!"
                     f" (monomial {list(rep.witness)}, coefficient {rep.witness_coeff})")
        print(line)
    print(f"order {cfg.order} in {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
