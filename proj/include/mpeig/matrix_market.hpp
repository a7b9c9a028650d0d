#pragma once

#include <complex>
#include <string>

#include "mpeig/csr_matrix.hpp"
#include "mpeig/precision.hpp"

namespace mpeig {

// Coordinate-format Matrix Market, Hermitian operands only: the banner must
// declare "real symmetric" or "complex hermitian"; anything else (including
// "general") is rejected rather than silently symmetrized. The stored
// triangle is expanded to the full pattern and duplicates are summed.

Field matrix_market_field(const std::string& path);

CsrMatrix<double> read_matrix_market_real(const std::string& path);
CsrMatrix<std::complex<double>> read_matrix_market_complex(const std::string& path);

// Lower triangle, values printed with shortest round-trip formatting so a
// write-then-read cycle reproduces the CSR arrays bit-exactly.
void write_matrix_market(const std::string& path, const CsrMatrix<double>& A);
void write_matrix_market(const std::string& path,
                         const CsrMatrix<std::complex<double>>& A);

}  // namespace mpeig
