// Python bindings: mesh construction, operator assembly, the discrete
// linear systems, and the benchmark driver.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <sstream>

#include "maxlab/assembly.hpp"
#include "maxlab/bench.hpp"
#include "maxlab/csr.hpp"
#include "maxlab/mesh.hpp"
#include "maxlab/systems.hpp"
#include "maxlab/types.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace maxlab;

namespace {

template <class T>
py::array_t<T> as_array(const std::vector<T>& v) {
  py::array_t<T> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

template <class T, size_t N>
py::array_t<T> as_array_2d(const std::vector<std::array<T, N>>& v) {
  py::array_t<T> a({static_cast<py::ssize_t>(v.size()), static_cast<py::ssize_t>(N)});
  T* out = a.mutable_data();
  for (const auto& row : v) out = std::copy(row.begin(), row.end(), out);
  return a;
}

template <class T>
void bind_csr(py::module_& m, const char* name) {
  py::class_<CsrMatrix<T>>(m, name)
      .def_readonly("rows", &CsrMatrix<T>::rows)
      .def_readonly("cols", &CsrMatrix<T>::cols)
      .def_property_readonly("shape",
                             [](const CsrMatrix<T>& a) { return py::make_tuple(a.rows, a.cols); })
      .def_property_readonly("nnz", [](const CsrMatrix<T>& a) { return a.nnz(); })
      .def_property_readonly("indptr", [](const CsrMatrix<T>& a) { return as_array(a.row_ptr); })
      .def_property_readonly("indices", [](const CsrMatrix<T>& a) { return as_array(a.col_idx); })
      .def_property_readonly("data", [](const CsrMatrix<T>& a) { return as_array(a.values); })
      .def(
          "matvec",
          [](const CsrMatrix<T>& a, const std::vector<T>& x) { return as_array(spmv(a, x)); },
          py::arg("x"), "Matrix-vector product a @ x.")
      .def("__repr__", [name](const CsrMatrix<T>& a) {
        std::ostringstream os;
        os << "<" << name << " " << a.rows << "x" << a.cols << ", nnz=" << a.nnz() << ">";
        return os.str();
      });
}

Vec3 to_vec3(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Edge-element Maxwell scattering laboratory: meshes, operators, solvers";
#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif

  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<SingularMatrixError>(m, "SingularMatrixError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  bind_csr<double>(m, "CsrReal");
  bind_csr<complex_t>(m, "CsrComplex");

  py::class_<Mesh>(m, "Mesh")
      .def_readonly("n", &Mesh::n, "Cells per axis.")
      .def_readonly("scale", &Mesh::scale)
      .def_readonly("has_scatterer", &Mesh::has_scatterer)
      .def_property_readonly("h", &Mesh::h, "Cell edge length scale / n.")
      .def_property_readonly("num_vertices", &Mesh::num_vertices)
      .def_property_readonly("num_edges", &Mesh::num_edges)
      .def_property_readonly("num_tets", &Mesh::num_tets)
      .def_readonly("removed_cells", &Mesh::removed_cells)
      .def_readonly("removed_volume", &Mesh::removed_volume)
      .def_property_readonly(
          "vertices", [](const Mesh& mesh) { return as_array_2d(mesh.vertices); },
          "Vertex coordinates, shape (num_vertices, 3).")
      .def_property_readonly(
          "edges", [](const Mesh& mesh) { return as_array_2d(mesh.edges); },
          "Edge endpoint ids, shape (num_edges, 2), ascending pairs.")
      .def("__repr__", [](const Mesh& mesh) {
        std::ostringstream os;
        os << "<Mesh n=" << mesh.n << " vertices=" << mesh.num_vertices()
           << " edges=" << mesh.num_edges() << " tets=" << mesh.num_tets() << ">";
        return os.str();
      });

  m.def(
      "build_mesh",
      [](int n, double scale, bool scatterer) {
        MeshParams p;
        p.n = n;
        p.scale = scale;
        p.scatterer = scatterer;
        return build_mesh(p);
      },
      py::arg("n"), py::arg("scale") = 1.0, py::arg("scatterer") = true,
      "Tetrahedral mesh of the cube with the L-shaped scatterer carved out.");

  m.def("cells_for_wavelength", &cells_for_wavelength, py::arg("k"), py::arg("ppw"),
        py::arg("scale") = 1.0,
        "Smallest admissible cells-per-axis resolving wavenumber k at the "
        "requested points per wavelength.");
  m.def("points_per_wavelength", &points_per_wavelength, py::arg("n"), py::arg("k"),
        py::arg("scale") = 1.0, "Mesh points per wavelength at resolution n.");

  py::class_<MaxwellOperators>(m, "Operators")
      .def_readonly("n_free_edges", &MaxwellOperators::n_free_edges)
      .def_readonly("n_free_vertices", &MaxwellOperators::n_free_vertices)
      .def_readonly("C", &MaxwellOperators::C, "Curl-curl stiffness on free edges.")
      .def_readonly("M", &MaxwellOperators::M, "k^2-scaled edge mass matrix.")
      .def_readonly("B", &MaxwellOperators::B, "Impedance surface mass on the outer boundary.")
      .def_readonly("G", &MaxwellOperators::G, "Nodal gradient into the edge space.")
      .def_readonly("lap_scalar", &MaxwellOperators::lap_scalar,
                    "Scalar Laplacian on free vertices.")
      .def_readonly("mass_scalar", &MaxwellOperators::mass_scalar,
                    "Scalar mass matrix on free vertices.")
      .def_property_readonly("s_re",
                             [](const MaxwellOperators& o) { return as_array(o.s_re); })
      .def_property_readonly("s_im",
                             [](const MaxwellOperators& o) { return as_array(o.s_im); })
      .def_property_readonly("k",
                             [](const MaxwellOperators& o) { return o.options.k; })
      .def_property_readonly(
          "free_edges", [](const MaxwellOperators& o) { return as_array(o.free_edges); },
          "Free index -> mesh edge id.")
      .def_property_readonly(
          "free_vertices", [](const MaxwellOperators& o) { return as_array(o.free_vertices); },
          "Free index -> mesh vertex id.")
      .def("__repr__", [](const MaxwellOperators& o) {
        std::ostringstream os;
        os << "<Operators k=" << o.options.k << " free_edges=" << o.n_free_edges
           << " free_vertices=" << o.n_free_vertices << ">";
        return os.str();
      });

  m.def(
      "assemble",
      [](const Mesh& mesh, double k, bool plane_wave, std::array<double, 3> direction,
         std::array<double, 3> polarization) {
        AssemblyOptions opt;
        opt.k = k;
        if (!plane_wave) return assemble_operators(mesh, opt, nullptr);
        const SourceSpec src = plane_wave_source(k, to_vec3(direction), to_vec3(polarization));
        return assemble_operators(mesh, opt, &src);
      },
      py::arg("mesh"), py::arg("k"), py::arg("plane_wave") = true,
      py::arg("direction") = std::array<double, 3>{0, 0, 1},
      py::arg("polarization") = std::array<double, 3>{1, 0, 0},
      "Edge-element operators C, M, B and the plane-wave right-hand side.");

  m.def("nodal_to_edge_interpolation", &nodal_to_edge_interpolation, py::arg("mesh"),
        py::arg("ops"), "Edge interpolation of vector nodal fields (component-major columns).");

  m.def(
      "build_complex_system",
      [](const MaxwellOperators& ops) {
        ComplexSystem s = build_complex_system(ops);
        return py::make_tuple(std::move(s.A), as_array(s.b));
      },
      py::arg("ops"), "Complex system (A, b) with A = C - M - iB.");

  m.def(
      "build_split_system",
      [](const MaxwellOperators& ops) {
        SplitSystem s = build_split_system(ops);
        return py::make_tuple(std::move(s.A), as_array(s.b));
      },
      py::arg("ops"), "Equivalent real 2n x 2n system (A, b) splitting real and imaginary parts.");

  m.def("set_thread_budget", &set_thread_budget, py::arg("n"),
        "Cap worker threads (0 restores the hardware default).");
  m.def("thread_budget", &thread_budget);

  py::class_<BenchCase>(m, "BenchCase")
      .def(py::init<>())
      .def_readwrite("label", &BenchCase::label)
      .def_readwrite("k", &BenchCase::k)
      .def_readwrite("ppw", &BenchCase::ppw)
      .def_readwrite("scale", &BenchCase::scale)
      .def_readwrite("n", &BenchCase::n)
      .def_readwrite("solver", &BenchCase::solver)
      .def_readwrite("rtol", &BenchCase::rtol)
      .def_readwrite("max_iter", &BenchCase::max_iter)
      .def_readwrite("threads", &BenchCase::threads)
      .def_readwrite("expect_maxed", &BenchCase::expect_maxed)
      .def_readwrite("record_history", &BenchCase::record_history)
      .def("__repr__", [](const BenchCase& c) {
        std::ostringstream os;
        os << "<BenchCase solver=" << c.solver << " k=" << c.k << " n=" << c.n << ">";
        return os.str();
      });

  py::class_<BenchResult>(m, "BenchResult")
      .def_readonly("case", &BenchResult::def)
      .def_readonly("n", &BenchResult::n)
      .def_readonly("dofs", &BenchResult::dofs)
      .def_readonly("split", &BenchResult::split)
      .def_readonly("direct", &BenchResult::direct)
      .def_readonly("converged", &BenchResult::converged)
      .def_readonly("maxed", &BenchResult::maxed)
      .def_readonly("iterations", &BenchResult::iterations)
      .def_readonly("setup_seconds", &BenchResult::setup_seconds)
      .def_readonly("solve_seconds", &BenchResult::solve_seconds)
      .def_readonly("true_residual", &BenchResult::true_residual)
      .def_readonly("inner", &BenchResult::inner)
      .def_readonly("compression", &BenchResult::compression)
      .def_readonly("error", &BenchResult::error)
      .def_property_readonly("history",
                             [](const BenchResult& r) { return as_array(r.history); })
      .def_property_readonly("ok", &BenchResult::ok,
                             "True when the case converged or was expected not to.")
      .def("__repr__", [](const BenchResult& r) {
        std::ostringstream os;
        os << "<BenchResult " << r.def.solver << " dofs=" << r.dofs;
        if (!r.error.empty())
          os << " error=\"" << r.error << "\"";
        else if (r.direct)
          os << " direct residual=" << r.true_residual;
        else
          os << " iterations=" << r.iterations << " residual=" << r.true_residual;
        os << ">";
        return os.str();
      });

  m.def("run_case", &run_case, py::arg("case"),
        py::call_guard<py::gil_scoped_release>(),
        "Assemble and solve one case; failures land in the result's error field.");
  m.def("suite_names", &suite_names, "Names of the built-in benchmark suites.");
  m.def("suite_cases", &suite_cases, py::arg("name"), "Case list of a built-in suite.");
  m.def("run_suite", &run_suite, py::arg("name"),
        py::call_guard<py::gil_scoped_release>(), "Run every case of a built-in suite.");
  m.def("emit_table", &emit_table, py::arg("rows"), py::arg("format") = "csv",
        "Render results as 'csv' or 'markdown'.");
  m.def("parse_cases_toml", &parse_cases_toml, py::arg("text"),
        "Parse [[case]] tables from a TOML subset.");
}
