"""Mean clustering of G(n, p) against two ROC graphs with the same average degree."""

import argparse
from dataclasses import dataclass

from rocgraph.analysis import mean_clustering, predict_roc_stats
from rocgraph.generators import RocParams, gen_er, gen_roc
from rocgraph.rng import replication_seed


@dataclass
class Config:
    n: int = 10_000
    d: float = 25
    s: float = 30
    qs: tuple[float, ...] = (0.2, 0.1)
    replications: int = 20
    seed: int = 1


def main(cfg: Config) -> None:
    seeds = [replication_seed(cfg.seed, r) for r in range(cfg.replications)]
    p = cfg.d / (cfg.n - 1)
    er = mean_clustering([gen_er(cfg.n, p, s) for s in seeds])
    print(f"{'model':<22}{'mean C':>10}{'s q^2 / d':>12}")
    print(f"{'G(n, p)':<22}{er:>10.5f}{p:>12.5f}")
    for q in cfg.qs:
        params = RocParams(cfg.n, cfg.d, cfg.s, q)
        cc = mean_clustering([gen_roc(params, s)[0] for s in seeds])
        label = f"ROC(s={cfg.s:g}, q={q:g})"
        print(f"{label:<22}{cc:>10.5f}{predict_roc_stats(params).cc_pred:>12.5f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=Config.n)
    ap.add_argument("--replications", type=int, default=Config.replications)
    ap.add_argument("--seed", type=int, default=Config.seed)
    a = ap.parse_args()
    main(Config(n=a.n, replications=a.replications, seed=a.seed))
