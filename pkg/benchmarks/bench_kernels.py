"""Compare the compiled and numpy occupation-basis kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Times ``ladder_coo`` (sparse operator construction, cache bypassed) and
``ladder_apply`` on a few Fock spaces, checks both backends agree, and
prints one row per case.
"""

import argparse
import timeit

import numpy as np

from relqi import kernels

CASES = [
    ("boson 2 modes, 17 levels", (17, 17), False),
    ("boson 4 modes, 6 levels", (6, 6, 6, 6), False),
    ("boson 6 modes, 4 levels", (4,) * 6, False),
    ("fermion 12 modes", (2,) * 12, True),
]


def _time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench(dims, fermionic, repeat, rng):
    size = int(np.prod(dims))
    amps = rng.normal(size=size) + 1j * rng.normal(size=size)
    mode = len(dims) // 2
    out, ref = {}, {}
    for name in kernels.available_backends():
        kernels.use_backend(name)
        table = kernels.occupation_table(dims)  # warm the occupation cache, shared by both timings
        coo = _time(lambda: kernels.ladder_coo(dims, mode, True, fermionic), repeat)
        app = _time(lambda: kernels.ladder_apply(amps, dims, mode, True, fermionic), repeat)
        ref[name] = kernels.ladder_apply(amps, dims, mode, True, fermionic)
        out[name] = (coo, app, table.shape[0])
    if len(ref) == 2:
        a, b = ref["compiled"], ref["python"]
        assert np.allclose(a[0], b[0], atol=1e-12) and abs(a[1] - b[1]) < 1e-9, "backends disagree"
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=7)
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    previous = kernels.backend_name()
    print(f"backends: {', '.join(kernels.available_backends())}")
    header = f"{'case':28s} {'dim':>8s} {'backend':>9s} {'coo [ms]':>10s} {'apply [ms]':>11s}"
    print(header)
    print("-" * len(header))
    try:
        for label, dims, fermionic in CASES:
            res = bench(dims, fermionic, args.repeat, rng)
            for name, (coo, app, dim) in sorted(res.items()):
                print(f"{label:28s} {dim:8d} {name:>9s} {1e3 * coo:10.3f} {1e3 * app:11.3f}")
            if len(res) == 2:
                speed = res["python"][1] / res["compiled"][1]
                print(f"{'':28s} {'':8s} {'speedup':>9s} {res['python'][0] / res['compiled'][0]:10.1f}x "
                      f"{speed:10.1f}x")
    finally:
        kernels.use_backend(previous)


if __name__ == "__main__":
    main()
