#pragma once

#include <string>
#include <vector>

#include "maxlab/csr.hpp"
#include "maxlab/types.hpp"

namespace maxlab {

// Matrix Market coordinate files, 1-based indices, written with 17 significant
// digits so values round-trip exactly.
void write_matrix_market(const std::string& path, const CsrMatrix<double>& a);
void write_matrix_market(const std::string& path, const CsrMatrix<complex_t>& a);

CsrMatrix<double> read_matrix_market_real(const std::string& path);
CsrMatrix<complex_t> read_matrix_market_complex(const std::string& path);

// Dense vectors as Matrix Market array files (n x 1).
void write_matrix_market_vector(const std::string& path, const std::vector<double>& v);
std::vector<double> read_matrix_market_vector(const std::string& path);

}  // namespace maxlab
