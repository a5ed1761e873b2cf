"""Benchmark: compiled stepping kernel vs the pure-numpy fallback.

Runs the three vector-field kinds on representative workloads and
prints per-call times and speedups.  Usage: python benchmarks/bench_kernel.py
"""

import time

import numpy as np

import gstokes.kernel as K
from gstokes.dmt import build_dmt_form
from gstokes.liealg import CartanElement, build_root_system


def timeit(fn, repeat):
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def connection_workload():
    datum, basis = build_root_system("A", 2)
    a0 = datum.embed_cartan(CartanElement([2.0, 0.7]))
    rng = np.random.default_rng(0)
    b = sum((rng.normal() + 1j * rng.normal()) * 0.4 * basis.e[i]
            for i in range(datum.n_roots))
    term = K.ConnectionTerm(path=K.ArcPath(0j, 1.0 + 0j, 0.0, 2 * np.pi),
                            mats=np.stack([a0, b]), powers=np.array([-2, -1]))
    y0 = np.eye(3, dtype=complex)
    return "connection arc (sl3, full loop)", term, y0


def dmt_workload():
    datum, _ = build_root_system("B", 2)
    form = build_dmt_form(datum, "adjoint", coupling=0.4)
    piece = K.LinePath(np.array([2.0, 0.7]), np.array([2.0 + 0.4j, 1.1]))
    term = K.CartanLinearTerm(path=piece, coeff_mats=form.coeff_mats,
                              root_rows=form.root_rows, scale=form.coupling)
    y0 = np.eye(form.rep.dimension, dtype=complex)
    return "flat-connection transport (so5 adjoint)", term, y0


def imd_workload():
    datum, basis = build_root_system("A", 2)
    rng = np.random.default_rng(1)
    b0 = sum((rng.normal() + 1j * rng.normal()) * 0.4 * basis.e[i]
             for i in range(datum.n_roots)).astype(complex)
    nr = datum.n_roots
    # semicircle around the wall midpoint, endpoints safely regular
    mid = np.array([1.35, 1.35])
    piece = K.ArcPath(mid, 0.5 * (np.array([2.0, 0.7]) - mid), 0.0, np.pi)
    term = K.IMDTerm(path=piece, extract=datum._dual[:nr],
                     rootvec=np.stack([basis.e[i] for i in range(nr)]),
                     root_rows=np.array([r.coords for r in datum.roots],
                                        dtype=complex))
    return "deformation flow semicircle (sl3)", term, b0


def main():
    if not K.HAVE_NATIVE:
        print("native kernel not built; nothing to compare")
        return
    print(f"{'workload':45s} {'native':>10s} {'fallback':>10s} {'speedup':>8s}")
    for make in (connection_workload, dmt_workload, imd_workload):
        name, term, y0 = make()
        run_nat = lambda: K.propagate(term, y0, rtol=1e-10, atol=1e-13)
        run_fb = lambda: K.propagate(term, y0, rtol=1e-10, atol=1e-13,
                                     force_fallback=True)
        y_nat, stats = run_nat()
        y_fb, _ = run_fb()
        assert np.max(np.abs(y_nat - y_fb)) < 1e-9, "lane mismatch"
        t_nat = timeit(run_nat, 20)
        t_fb = timeit(run_fb, 3)
        print(f"{name:45s} {t_nat * 1e3:8.2f}ms {t_fb * 1e3:8.2f}ms "
              f"{t_fb / t_nat:7.1f}x   ({stats['n_accept']} steps)")


if __name__ == "__main__":
    main()
