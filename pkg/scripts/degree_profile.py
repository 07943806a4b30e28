"""Clustering by degree for ROC graphs, next to the s q^2 / r prediction."""

import argparse
from dataclasses import dataclass

from rocgraph.analysis import degree_cc_profile
from rocgraph.generators import RocParams, gen_roc
from rocgraph.rng import replication_seed


@dataclass
class Config:
    n: int = 100_000
    d: float = 40
    s: float = 30
    q: float = 0.2
    replications: int = 5
    min_count: int = 200
    seed: int = 0


def main(cfg: Config) -> None:
    params = RocParams(cfg.n, cfg.d, cfg.s, cfg.q)
    graphs = (gen_roc(params, replication_seed(cfg.seed, r))[0] for r in range(cfg.replications))
    print(f"{'degree':>10}{'count':>9}{'mean C':>10}{'predicted':>11}")
    for row in degree_cc_profile(graphs, params, min_count=cfg.min_count):
        deg = f"{row.r_lo}" if row.r_lo == row.r_hi else f"{row.r_lo}-{row.r_hi}"
        print(f"{deg:>10}{row.count:>9}{row.mean_cc:>10.5f}{row.predicted:>11.5f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=Config.n)
    ap.add_argument("--d", type=float, default=Config.d)
    ap.add_argument("--replications", type=int, default=Config.replications)
    a = ap.parse_args()
    main(Config(n=a.n, d=a.d, replications=a.replications))
