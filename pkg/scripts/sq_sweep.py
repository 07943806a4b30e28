"""Sweep (s, q) along a curve of constant predicted triangle ratio and write CSV.

Every point has s q^2 = 3 r3, so the predicted r3 is the same while r4 moves.
"""

import argparse
import sys
from dataclasses import dataclass

from rocgraph.cli import run_sweep, sweep_csv


@dataclass
class Config:
    n: int = 100_000
    d: float = 20
    r3: float = 1.0
    qs: tuple[float, ...] = (0.2, 0.25, 0.3, 0.4, 0.5)
    replications: int = 5
    seed: int = 0


def points(cfg: Config) -> list[dict]:
    return [{"n": cfg.n, "d": cfg.d, "s": 3 * cfg.r3 / q ** 2, "q": q} for q in cfg.qs]


def main(cfg: Config, out) -> None:
    rows = run_sweep("roc", points(cfg), cfg.seed, cfg.replications)
    out.write(sweep_csv(rows))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=Config.n)
    ap.add_argument("--r3", type=float, default=Config.r3)
    ap.add_argument("--replications", type=int, default=Config.replications)
    ap.add_argument("-o", "--output")
    a = ap.parse_args()
    cfg = Config(n=a.n, r3=a.r3, replications=a.replications)
    if a.output:
        with open(a.output, "w") as fh:
            main(cfg, fh)
    else:
        main(cfg, sys.stdout)
