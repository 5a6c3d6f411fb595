"""Time the compiled core against the numpy fallback.

    python benchmarks/bench_core.py [--repeat 5]

Both backends are run on identical inputs. The script checks that they agree
and prints the best-of-N wall time for each workload.
"""

import argparse
import time

import numpy as np

from mrlsmooth import _backend
from mrlsmooth.kernel import EPANECHNIKOV, GAUSSIAN
from mrlsmooth.transform import EXP


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def workloads(rng):
    y = np.log(rng.gamma(2.0, 3.0, 500))
    x = np.linspace(-3.0, 3.5, 200)
    hs = np.geomspace(0.05, 2.0, 40)
    for kernel in (EPANECHNIKOV, GAUSSIAN):
        yield (
            f"transformed sums, {kernel.family}, n=500, 200 points",
            lambda core, k=kernel: core.transformed_sums(x, y, 0.3, k.code, EXP, 0.0, np.inf),
        )
        yield (
            f"LSCV scores, {kernel.family}, n=500, 40 bandwidths",
            lambda core, k=kernel: core.lscv_scores(y, hs, k.code),
        )


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    names = _backend.available()
    if "cython" not in names:
        print("compiled core not built; only the numpy fallback is available")
    rng = np.random.default_rng(0)
    print(f"{'workload':<48}" + "".join(f"{n:>12}" for n in names) + f"{'speed-up':>10}")
    for label, fn in workloads(rng):
        results = {}
        for name in names:
            core = _backend.get(name)
            results[name] = _best(lambda: fn(core), args.repeat)
        if len(names) > 1:
            a = np.concatenate([np.ravel(v) for v in results["python"][1]])
            b = np.concatenate([np.ravel(v) for v in results["cython"][1]])
            np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-12)
            ratio = results["python"][0] / results["cython"][0]
        else:
            ratio = float("nan")
        cells = "".join(f"{results[n][0] * 1e3:>10.1f}ms" for n in names)
        print(f"{label:<48}{cells}{ratio:>9.1f}x")


if __name__ == "__main__":
    main()
