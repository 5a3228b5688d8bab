"""Time the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--quick] [--repeat N]

Every case is checked for agreement between backends (final states to 1e-9,
statuses and codes exactly; iteration counts may differ by rounding) before it
is timed;
numba compilation is excluded by a warm-up call.
"""
import argparse
import time

import numpy as np

from bsbnet import BsbParams, train
from bsbnet.kernels import get_backend


def _patterns(rng, m, d):
    return rng.choice([-1.0, 1.0], size=(m, d))


def cases(quick):
    rng = np.random.default_rng(0)
    p = BsbParams()
    g = (p.gamma, p.eta, p.theta)
    it = (p.max_iters, p.convergence_tol)

    d_rec, n_rec = (64, 500) if quick else (128, 5000)
    net = train(_patterns(rng, 4, d_rec))
    probes = _patterns(rng, n_rec, d_rec)
    yield (f"recall_batch d={d_rec} n={n_rec}",
           lambda k: k.recall_batch(probes, net.w, net.b, *g, *it),
           lambda a, b: _close(a[0], b[0]) and np.array_equal(a[2], b[2]))

    d_fp = 14 if quick else 20
    net_fp = train(_patterns(rng, 3, d_fp))
    yield (f"fixed_point_mask d={d_fp}",
           lambda k: k.fixed_point_mask(d_fp, net_fp.w, net_fp.b, *g),
           np.array_equal)

    d_b = 10 if quick else 14
    net_b = train(_patterns(rng, 2, d_b))
    yield (f"basin_codes d={d_b}",
           lambda k: k.basin_codes(d_b, net_b.w, net_b.b, *g, *it),
           np.array_equal)

    probe = _patterns(rng, 1, d_rec)[0]
    probe[: d_rec // 8] *= -1
    yield (f"recall x200 d={d_rec}",
           lambda k: [k.recall(probe, net.w, net.b, *g, *it, True) for _ in range(200)],
           lambda a, b: all(_close(x[0], y[0]) and x[2] == y[2] for x, y in zip(a, b)))


def _close(a, b):
    return np.allclose(a, b, rtol=0, atol=1e-9)


def _time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true", help="small sizes, for smoke testing")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    nb, npy = get_backend("numba"), get_backend("numpy")
    rows = []
    for name, run, agree in cases(args.quick):
        out_nb = run(nb)  # warm-up / compile
        out_np = run(npy)
        if not agree(out_nb, out_np):
            raise SystemExit(f"backends disagree on {name}")
        t_nb = _time(lambda: run(nb), args.repeat)
        t_np = _time(lambda: run(npy), args.repeat)
        rows.append((name, t_nb, t_np))

    width = max(len(r[0]) for r in rows)
    print(f"{'case':<{width}}  {'numba s':>10}  {'numpy s':>10}  {'speedup':>8}")
    for name, t_nb, t_np in rows:
        print(f"{name:<{width}}  {t_nb:>10.4f}  {t_np:>10.4f}  {t_np / t_nb:>7.1f}x")
    return rows


if __name__ == "__main__":
    main()
