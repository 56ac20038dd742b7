"""Edge-element Maxwell scattering laboratory.

The compiled core exposes mesh construction, operator assembly, the discrete
linear systems, and the benchmark driver; this package adds thin conveniences
on top (scipy interop, keyword-style case construction).
"""

from ._core import (  # noqa: F401
    BenchCase,
    BenchResult,
    CsrComplex,
    CsrReal,
    DimensionError,
    IoError,
    Mesh,
    Operators,
    SingularMatrixError,
    __version__,
    assemble,
    build_complex_system,
    build_mesh,
    build_split_system,
    cells_for_wavelength,
    emit_table,
    nodal_to_edge_interpolation,
    parse_cases_toml,
    points_per_wavelength,
    run_case,
    run_suite,
    set_thread_budget,
    suite_cases,
    suite_names,
    thread_budget,
)


def solve(**kwargs):
    """Run a single benchmark case built from keyword arguments.

    Keywords mirror the BenchCase fields: k, ppw, scale, n, solver, rtol,
    max_iter, threads, expect_maxed, record_history, label.

    >>> result = solve(k=1.0, n=4, solver="lu")
    >>> result.converged
    True
    """
    case = BenchCase()
    for key, value in kwargs.items():
        if not hasattr(case, key):
            raise TypeError(f"unknown case field {key!r}")
        setattr(case, key, value)
    return run_case(case)


def to_scipy(a):
    """Convert a bound CSR matrix to scipy.sparse.csr_matrix."""
    from scipy.sparse import csr_matrix

    return csr_matrix((a.data, a.indices, a.indptr), shape=a.shape)
