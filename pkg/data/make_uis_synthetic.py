"""Generate ``uis_synthetic.csv``: a stand-in with the column layout of the
UIS drug treatment study (Hosmer and Lemeshow, Applied Survival Analysis,
1998). Values are simulated; ``time`` mimics days to relapse."""

import csv
from pathlib import Path

import numpy as np

N = 628


def main(path=Path(__file__).with_name("uis_synthetic.csv"), seed=628):
    rng = np.random.default_rng(seed)
    time = np.maximum(np.rint(rng.weibull(1.1, N) * 240.0), 2).astype(int)
    time = np.minimum(time, 1172)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "age", "beck", "ivhx", "ndrugtx", "race", "treat", "site", "time", "censor"])
        for i in range(N):
            w.writerow([
                i + 1,
                int(rng.integers(20, 57)),
                round(float(rng.uniform(0, 54)), 1),
                int(rng.integers(1, 4)),
                int(rng.integers(0, 41)),
                int(rng.integers(0, 2)),
                int(rng.integers(0, 2)),
                int(rng.integers(0, 2)),
                int(time[i]),
                int(rng.random() < 0.8),
            ])


if __name__ == "__main__":
    main()
