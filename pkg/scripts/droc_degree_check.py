"""Per-vertex DROC degree means at the acceptance parameters, with sampling error.

Prints, for each checked vertex, the relative deviation from t s/(s-1), the
standard error of the mean, and the number of seeds at which two standard
errors would fit inside a 5% band.
"""

import argparse
from dataclasses import dataclass

import numpy as np

from rocgraph import acceptance as acc
from rocgraph.generators import DrocSpec, gen_droc
from rocgraph.rng import replication_seed


@dataclass
class Config:
    replications: int = 200
    band: float = 0.05


def main(cfg: Config) -> None:
    spec = DrocSpec(acc.DROC_N, acc.droc_targets(), acc.DROC_S, acc.DROC_Q)
    s1 = np.zeros(spec.n)
    s2 = np.zeros(spec.n)
    for r in range(cfg.replications):
        deg = gen_droc(spec, replication_seed(acc.BASE_SEED + 90, r))[0].degrees
        s1 += deg
        s2 += deg.astype(np.float64) ** 2
    mean = s1 / cfg.replications
    sd = np.sqrt(np.maximum(s2 / cfg.replications - mean ** 2, 0) * cfg.replications / (cfg.replications - 1))
    expected = spec.targets * spec.s / (spec.s - 1)
    print(f"{'vertex':>7}{'target':>8}{'mean':>9}{'rel dev':>9}{'rel se':>8}{'z':>7}{'seeds for 2se<band':>20}")
    for v in acc.droc_checked_vertices(spec.targets):
        rel_se = sd[v] / np.sqrt(cfg.replications) / expected[v]
        z = (mean[v] - expected[v]) / (sd[v] / np.sqrt(cfg.replications))
        need = int(np.ceil((2 * sd[v] / (cfg.band * expected[v])) ** 2))
        print(f"{v:>7}{spec.targets[v]:>8.0f}{mean[v]:>9.3f}{mean[v] / expected[v] - 1:>9.3f}"
              f"{rel_se:>8.3f}{z:>7.2f}{need:>20}")
    for t in np.unique(spec.targets)[:5]:
        sel = spec.targets == t
        print(f"pooled t={t:g}: {sel.sum()} vertices, mean/expected - 1 = {mean[sel].mean() / expected[sel][0] - 1:+.4f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--replications", type=int, default=Config.replications)
    main(Config(replications=ap.parse_args().replications))
