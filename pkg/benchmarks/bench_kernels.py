"""Compare the compiled trace-matrix kernels against the pure-Python ones.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--out FILE]

Writes CSV rows: workload, backend, seconds (best of N), speedup over python.
"""
import argparse
import csv
import random
import sys
import timeit

from muforge import _pykernels, corpus

try:
    from muforge import _ckernels
except ImportError:
    _ckernels = None


def random_matrix(rng, n, bits=6):
    return tuple(tuple(rng.getrandbits(bits) if rng.random() < 0.4 else 0 for _ in range(n))
                 for _ in range(n))


def workloads(k):
    rng = random.Random(0)
    mats = {n: [random_matrix(rng, n) for _ in range(8)] for n in (8, 24, 48)}

    def compose_chain(n):
        def run():
            m = mats[n][0]
            for x in mats[n][1:]:
                m = k.compose(m, x)
            return m
        return run

    def mu_trace(n):
        def run():
            return [k.has_mu_trace(1, m) for m in mats[n]]
        return run

    def maxcomb():
        xs = [rng.getrandbits(16) for _ in range(2000)]
        return lambda: [k.maxcomb(a, b) for a, b in zip(xs, xs[1:])]

    def tableau():
        # the end-to-end equivalence check spends its time in the kernels
        from muforge.tableau import core_equivalent, core_of
        from muforge import kernels
        saved = {name: getattr(kernels, name) for name in ("compose", "union", "step", "has_mu_trace",
                                                          "identity", "maxcomb")}

        def run():
            for name in saved:
                setattr(kernels, name, getattr(k, name))
            try:
                return core_equivalent(core_of(corpus.gen_alpha()), core_of(corpus.gen_beta()))
            finally:
                for name, fn in saved.items():
                    setattr(kernels, name, fn)
        return run

    out = {f"compose_chain_{n}": compose_chain(n) for n in mats}
    out.update({f"has_mu_trace_{n}": mu_trace(n) for n in mats})
    out["maxcomb_2000"] = maxcomb()
    out["core_equivalent_alpha_beta"] = tableau()
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--out", help="CSV file (default: stdout)")
    args = ap.parse_args(argv)
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    if _ckernels is None:
        print("compiled kernels not built; timing the Python fallback only", file=sys.stderr)
    times = {}
    for name, k in backends:
        for label, fn in workloads(k).items():
            times[(label, name)] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["workload", "backend", "seconds", "speedup"])
    for (label, name), t in sorted(times.items()):
        base = times[(label, "python")]
        w.writerow([label, name, f"{t:.6f}", f"{base / t:.2f}"])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
