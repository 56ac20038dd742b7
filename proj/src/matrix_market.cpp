#include "maxlab/matrix_market.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace maxlab {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Header {
  std::string object, format, field, symmetry;
};

// Reads the banner and positions the stream at the size line.
Header read_banner(std::ifstream& in, const std::string& path, std::string& size_line) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  std::istringstream hs(line);
  std::string tag;
  Header h;
  hs >> tag >> h.object >> h.format >> h.field >> h.symmetry;
  if (tag != "%%MatrixMarket" || h.object != "matrix")
    throw IoError(path + ": missing MatrixMarket banner");
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '%') continue;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    size_line = line;
    return h;
  }
  throw IoError(path + ": missing size line");
}

template <class T>
void write_coordinate(const std::string& path, const CsrMatrix<T>& a, const char* field,
                      const std::function<std::string(const T&)>& entry) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << "%%MatrixMarket matrix coordinate " << field << " general\n";
  out << a.rows << " " << a.cols << " " << a.nnz() << "\n";
  for (index_t i = 0; i < a.rows; ++i)
    for (index_t k = a.row_ptr[static_cast<size_t>(i)]; k < a.row_ptr[static_cast<size_t>(i) + 1]; ++k)
      out << (i + 1) << " " << (a.col_idx[static_cast<size_t>(k)] + 1) << " "
          << entry(a.values[static_cast<size_t>(k)]) << "\n";
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace

void write_matrix_market(const std::string& path, const CsrMatrix<double>& a) {
  write_coordinate<double>(path, a, "real", [](const double& v) { return fmt17(v); });
}

void write_matrix_market(const std::string& path, const CsrMatrix<complex_t>& a) {
  write_coordinate<complex_t>(path, a, "complex",
                              [](const complex_t& v) { return fmt17(v.real()) + " " + fmt17(v.imag()); });
}

CsrMatrix<double> read_matrix_market_real(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open");
  std::string size_line;
  const Header h = read_banner(in, path, size_line);
  if (h.format != "coordinate" || h.field != "real" || h.symmetry != "general")
    throw IoError(path + ": expected 'coordinate real general', got '" + h.format + " " + h.field + " " + h.symmetry + "'");
  std::istringstream ss(size_line);
  long rows = 0, cols = 0, nnz = 0;
  if (!(ss >> rows >> cols >> nnz)) throw IoError(path + ": malformed size line");
  CsrBuilder<double> bld(static_cast<index_t>(rows), static_cast<index_t>(cols));
  bld.reserve(static_cast<size_t>(nnz));
  for (long k = 0; k < nnz; ++k) {
    long i = 0, j = 0;
    double v = 0;
    if (!(in >> i >> j >> v)) throw IoError(path + ": truncated entry list at entry " + std::to_string(k + 1));
    if (i < 1 || j < 1 || i > rows || j > cols)
      throw IoError(path + ": entry " + std::to_string(k + 1) + " has index (" + std::to_string(i) + ", " +
                    std::to_string(j) + ") outside the 1-based range");
    bld.add(static_cast<index_t>(i - 1), static_cast<index_t>(j - 1), v);
  }
  return bld.build();
}

CsrMatrix<complex_t> read_matrix_market_complex(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open");
  std::string size_line;
  const Header h = read_banner(in, path, size_line);
  if (h.format != "coordinate" || h.field != "complex" || h.symmetry != "general")
    throw IoError(path + ": expected 'coordinate complex general', got '" + h.format + " " + h.field + " " + h.symmetry + "'");
  std::istringstream ss(size_line);
  long rows = 0, cols = 0, nnz = 0;
  if (!(ss >> rows >> cols >> nnz)) throw IoError(path + ": malformed size line");
  CsrBuilder<complex_t> bld(static_cast<index_t>(rows), static_cast<index_t>(cols));
  bld.reserve(static_cast<size_t>(nnz));
  for (long k = 0; k < nnz; ++k) {
    long i = 0, j = 0;
    double re = 0, im = 0;
    if (!(in >> i >> j >> re >> im)) throw IoError(path + ": truncated entry list at entry " + std::to_string(k + 1));
    if (i < 1 || j < 1 || i > rows || j > cols)
      throw IoError(path + ": entry " + std::to_string(k + 1) + " has index (" + std::to_string(i) + ", " +
                    std::to_string(j) + ") outside the 1-based range");
    bld.add(static_cast<index_t>(i - 1), static_cast<index_t>(j - 1), complex_t(re, im));
  }
  return bld.build();
}

void write_matrix_market_vector(const std::string& path, const std::vector<double>& v) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << "%%MatrixMarket matrix array real general\n";
  out << v.size() << " 1\n";
  for (double x : v) out << fmt17(x) << "\n";
  if (!out) throw IoError(path + ": write failed");
}

std::vector<double> read_matrix_market_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open");
  std::string size_line;
  const Header h = read_banner(in, path, size_line);
  if (h.format != "array" || h.field != "real")
    throw IoError(path + ": expected 'array real', got '" + h.format + " " + h.field + "'");
  std::istringstream ss(size_line);
  long rows = 0, cols = 0;
  if (!(ss >> rows >> cols) || cols != 1) throw IoError(path + ": expected an n x 1 array");
  std::vector<double> v(static_cast<size_t>(rows));
  for (long i = 0; i < rows; ++i)
    if (!(in >> v[static_cast<size_t>(i)])) throw IoError(path + ": truncated array at entry " + std::to_string(i + 1));
  return v;
}

}  // namespace maxlab
