"""Compare the compiled integer kernels against the pure Python ones.

Micro section: direct calls to det/rank/sign-range on seeded random
integer matrices sized to stay inside the compiled caps. Macro section:
shadow hulls of a zonotope through the normal dispatch, once as-is and
once with the compiled core disabled, so the numbers include the
dispatch overhead real callers pay.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import random
import sys
import time

import shadowlab._kernels_py as py
import shadowlab.kernels as kernels

try:
    import shadowlab._core as core
except ImportError:
    core = None


def _matrices(size, count, bound, seed):
    rng = random.Random(f"bench:{size}:{seed}")
    return [
        tuple(
            tuple(rng.randint(-bound, bound) for _ in range(size))
            for _ in range(size)
        )
        for _ in range(count)
    ]


def _time(fn, args_list, repeat):
    best = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        for args in args_list:
            fn(args)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best / len(args_list)


def micro(repeat):
    print(f"{'kernel':>12} {'size':>4} {'pure us':>9} {'compiled us':>12} {'speedup':>8}")
    for size in (3, 4, 5, 6, 7, 8):
        bound = min(kernels._CAPS[size], 1 << 14)
        mats = _matrices(size, 200, bound, 0)
        t_py = _time(py.det_int, mats, repeat)
        row = f"{'det_int':>12} {size:>4} {t_py * 1e6:>9.2f}"
        if core is not None:
            t_c = _time(core.det_int, mats, repeat)
            row += f" {t_c * 1e6:>12.2f} {t_py / t_c:>7.1f}x"
        print(row)
    for shape in ((6, 4), (10, 5), (20, 4)):
        rows, cols = shape
        rng = random.Random(f"rank:{shape}")
        mats = [
            tuple(
                tuple(rng.randint(-500, 500) for _ in range(cols))
                for _ in range(rows)
            )
            for _ in range(200)
        ]
        t_py = _time(py.rank_int, mats, repeat)
        row = f"{'rank_int':>12} {rows}x{cols:<2} {t_py * 1e6:>8.2f}"
        if core is not None:
            t_c = _time(core.rank_int, mats, repeat)
            row += f" {t_c * 1e6:>12.2f} {t_py / t_c:>7.1f}x"
        print(row)
    rng = random.Random("signs")
    batches = [
        (
            tuple(
                tuple(rng.randint(-1000, 1000) for _ in range(3))
                for _ in range(30)
            ),
            tuple(rng.randint(-1000, 1000) for _ in range(3)),
            rng.randint(-1000, 1000),
        )
        for _ in range(200)
    ]
    t_py = _time(lambda b: py.sign_range(*b), batches, repeat)
    row = f"{'sign_range':>12} {'30x3':>4} {t_py * 1e6:>9.2f}"
    if core is not None:
        t_c = _time(lambda b: core.sign_range(*b), batches, repeat)
        row += f" {t_c * 1e6:>12.2f} {t_py / t_c:>7.1f}x"
    print(row)


def _toggle_compare(label, run, repeat):
    with_core = min(run() for _ in range(repeat))
    saved = kernels._compiled
    kernels._compiled = None
    try:
        without = min(run() for _ in range(repeat))
    finally:
        kernels._compiled = saved
    print(f"\n{label}:")
    tag = "compiled core" if saved is not None else "pure (no compiled core built)"
    print(f"  {tag:>22}: {with_core * 1e3:8.1f} ms")
    print(f"  {'pure kernels forced':>22}: {without * 1e3:8.1f} ms")
    if saved is not None and with_core > 0:
        print(f"  {'speedup':>22}: {without / with_core:8.1f}x")


def macro(repeat):
    import shadowlab.families as fam
    import shadowlab.polytope as pt
    import shadowlab.shadow as sh

    p = fam.zonotope(fam.random_generators(5, 4, 0))
    planes = sh.sample_admissible(p, 3, 20)

    def shadows():
        t0 = time.perf_counter()
        ks = {sh.shadow(p, w).k for w in planes}
        assert ks == {10}
        return time.perf_counter() - t0

    # hull work is Fraction arithmetic, so little moves through the kernels
    _toggle_compare("20 zonotope shadows (d=4, 30 vertices)", shadows, repeat)

    verts = list(fam.hypercube(4).vertices)

    def build():
        t0 = time.perf_counter()
        q = pt.build(verts)
        assert len(pt.k_faces(q, 2)) == 24
        return time.perf_counter() - t0

    # facet scan + face lattice: sign_range and rank_int dominate
    _toggle_compare("4-cube build with full face lattice", build, repeat)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5, help="timing repetitions, best-of")
    ns = ap.parse_args(argv)
    print(f"compiled core available: {core is not None}")
    micro(ns.repeat)
    macro(ns.repeat)
    return 0


if __name__ == "__main__":
    sys.exit(main())
