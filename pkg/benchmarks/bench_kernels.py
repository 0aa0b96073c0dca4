"""Time the compiled and pure-Python kernels on the same workloads.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each workload runs through the public API with ``backend`` pinned, so the
numbers include the same Python-level driver code in both columns.
"""

import argparse
import time

import numpy as np

from sparseising import _backend
from sparseising.baselines import fit_node_logistic, node_lambda_max
from sparseising.cma import SolverConfig, fit_lasso, fit_scad_cma, lambda_max
from sparseising.simulate import GibbsConfig, gen_truth, gibbs_sample, lattice_graph


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def workloads(X, truth):
    lam = 0.1 * lambda_max(X)
    init = fit_lasso(X, lam).beta
    node_lam = 0.1 * node_lambda_max(X, 0)
    return {
        "lasso fit (K=30, N=300)": lambda b: fit_lasso(X, lam, cfg=SolverConfig(backend=b)),
        "SCAD-CMA fit": lambda b: fit_scad_cma(X, lam, init=init, cfg=SolverConfig(backend=b)),
        "node logistic fit": lambda b: fit_node_logistic(X, 0, node_lam,
                                                         cfg=SolverConfig(backend=b)),
        "Gibbs, 3000 sweeps": lambda b: gibbs_sample(truth, 200, GibbsConfig(1000, 10, 1),
                                                     backend=b),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if _backend.BACKEND != "cython":
        raise SystemExit("compiled extension not built; run `python3 setup.py build_ext --inplace`")

    truth = gen_truth(lattice_graph(30), 0)
    X = gibbs_sample(truth, 300, GibbsConfig(seed=0))
    print(f"{'workload':<26}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}")
    for name, run in workloads(X, truth).items():
        py = best_of(lambda: run("python"), args.repeat)
        cy = best_of(lambda: run("cython"), args.repeat)
        print(f"{name:<26}{py:>12.4f}{cy:>12.4f}{py / cy:>9.1f}x")
    a = fit_lasso(X, 0.1 * lambda_max(X), cfg=SolverConfig(backend="python")).beta
    b = fit_lasso(X, 0.1 * lambda_max(X), cfg=SolverConfig(backend="cython")).beta
    print(f"max |beta_python - beta_cython| on the lasso fit: {np.max(np.abs(a - b)):.1e}")


if __name__ == "__main__":
    main()
