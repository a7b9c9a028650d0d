#include "mpeig/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "mpeig/errors.hpp"

namespace mpeig {

namespace {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  std::size_t line_no;
};

void skip_blanks(Cursor& c) {
  while (c.pos < c.text.size() &&
         (c.text[c.pos] == ' ' || c.text[c.pos] == '\t' || c.text[c.pos] == '\r'))
    ++c.pos;
}

std::string next_token(Cursor& c) {
  skip_blanks(c);
  const std::size_t start = c.pos;
  while (c.pos < c.text.size() && !std::isspace(static_cast<unsigned char>(c.text[c.pos])))
    ++c.pos;
  if (c.pos == start)
    throw ParseError(c.line_no, start + 1, "expected a token");
  return c.text.substr(start, c.pos - start);
}

void expect_end(Cursor& c) {
  skip_blanks(c);
  if (c.pos < c.text.size())
    throw ParseError(c.line_no, c.pos + 1, "trailing characters");
}

index_t parse_index(Cursor& c) {
  skip_blanks(c);
  const std::size_t col = c.pos + 1;
  index_t v = 0;
  const char* begin = c.text.data() + c.pos;
  const char* end = c.text.data() + c.text.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr == begin)
    throw ParseError(c.line_no, col, "expected an integer");
  c.pos = static_cast<std::size_t>(ptr - c.text.data());
  return v;
}

double parse_real(Cursor& c) {
  skip_blanks(c);
  const std::size_t col = c.pos + 1;
  double v = 0.0;
  const char* begin = c.text.data() + c.pos;
  const char* end = c.text.data() + c.text.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr == begin)
    throw ParseError(c.line_no, col, "expected a number");
  c.pos = static_cast<std::size_t>(ptr - c.text.data());
  return v;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

struct Header {
  Field field;
  index_t rows, cols, nnz;
};

// Banner + size line; leaves the stream positioned at the first entry.
Header read_header(std::istream& in, std::size_t& line_no) {
  std::string text;
  if (!std::getline(in, text)) throw ParseError(1, 1, "empty file");
  line_no = 1;
  Cursor c{text, 0, line_no};
  if (lower(next_token(c)) != "%%matrixmarket")
    throw ParseError(1, 1, "missing %%MatrixMarket banner");
  if (lower(next_token(c)) != "matrix")
    throw ParseError(1, c.pos + 1, "object must be 'matrix'");
  if (lower(next_token(c)) != "coordinate")
    throw ParseError(1, c.pos + 1, "format must be 'coordinate'");
  const std::string field_tok = lower(next_token(c));
  const std::string sym_tok = lower(next_token(c));

  Header h{};
  if (field_tok == "real") {
    h.field = Field::Real;
    if (sym_tok != "symmetric") throw NotSymmetricHeader(sym_tok);
  } else if (field_tok == "complex") {
    h.field = Field::Complex;
    if (sym_tok != "hermitian") throw NotSymmetricHeader(sym_tok);
  } else {
    throw ParseError(1, 1, "field must be 'real' or 'complex', got '" + field_tok + "'");
  }

  while (std::getline(in, text)) {
    ++line_no;
    if (!text.empty() && text[0] == '%') continue;
    Cursor s{text, 0, line_no};
    skip_blanks(s);
    if (s.pos == text.size()) continue;  // blank line before sizes
    h.rows = parse_index(s);
    h.cols = parse_index(s);
    h.nnz = parse_index(s);
    expect_end(s);
    if (h.rows != h.cols)
      throw NotSquare("matrix is " + std::to_string(h.rows) + "x" +
                      std::to_string(h.cols));
    if (h.rows < 0 || h.nnz < 0)
      throw ParseError(line_no, 1, "negative size");
    return h;
  }
  throw ParseError(line_no + 1, 1, "missing size line");
}

template <class T, class ReadValue>
CsrMatrix<T> read_entries(const std::string& path, ReadValue&& read_value) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, 0, "cannot open '" + path + "'");
  std::size_t line_no = 0;
  const Header h = read_header(in, line_no);

  std::vector<Triplet<T>> trip;
  trip.reserve(static_cast<std::size_t>(2 * h.nnz));
  std::string text;
  index_t seen = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (!text.empty() && text[0] == '%') continue;
    Cursor c{text, 0, line_no};
    skip_blanks(c);
    if (c.pos == text.size()) continue;
    const index_t i = parse_index(c);
    const index_t j = parse_index(c);
    const T v = read_value(c);
    expect_end(c);
    if (i < 1 || i > h.rows || j < 1 || j > h.cols)
      throw ParseError(line_no, 1, "index out of range");
    if (++seen > h.nnz) throw ParseError(line_no, 1, "more entries than declared");
    trip.push_back({i - 1, j - 1, v});
    if (i != j) trip.push_back({j - 1, i - 1, conj_s(v)});
  }
  if (seen != h.nnz)
    throw ParseError(line_no + 1, 1, "fewer entries than declared");
  return CsrMatrix<T>::from_triplets(static_cast<std::size_t>(h.rows), trip);
}

void print_value(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  out.append(buf, ptr);
}

template <class T>
void write_impl(const std::string& path, const CsrMatrix<T>& A,
                const char* banner) {
  // count the lower triangle
  index_t nnz_lower = 0;
  for (std::size_t i = 0; i < A.n(); ++i)
    for (index_t p = A.row_ptr()[i]; p < A.row_ptr()[i + 1]; ++p)
      if (A.col_idx()[p] <= static_cast<index_t>(i)) ++nnz_lower;

  std::ofstream out(path);
  if (!out) throw ParseError(0, 0, "cannot open '" + path + "' for writing");
  out << banner << "\n" << A.n() << " " << A.n() << " " << nnz_lower << "\n";
  std::string line;
  for (std::size_t i = 0; i < A.n(); ++i) {
    for (index_t p = A.row_ptr()[i]; p < A.row_ptr()[i + 1]; ++p) {
      const index_t j = A.col_idx()[p];
      if (j > static_cast<index_t>(i)) break;  // columns sorted within the row
      line.clear();
      line += std::to_string(i + 1);
      line += ' ';
      line += std::to_string(j + 1);
      line += ' ';
      if constexpr (is_complex_v<T>) {
        print_value(line, A.values()[p].real());
        line += ' ';
        print_value(line, A.values()[p].imag());
      } else {
        print_value(line, A.values()[p]);
      }
      line += '\n';
      out << line;
    }
  }
}

}  // namespace

Field matrix_market_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, 0, "cannot open '" + path + "'");
  std::size_t line_no = 0;
  return read_header(in, line_no).field;
}

CsrMatrix<double> read_matrix_market_real(const std::string& path) {
  if (matrix_market_field(path) != Field::Real)
    throw ParseError(1, 1, "'" + path + "' is not a real matrix");
  return read_entries<double>(path, [](Cursor& c) { return parse_real(c); });
}

CsrMatrix<std::complex<double>> read_matrix_market_complex(const std::string& path) {
  if (matrix_market_field(path) != Field::Complex)
    throw ParseError(1, 1, "'" + path + "' is not a complex matrix");
  return read_entries<std::complex<double>>(path, [](Cursor& c) {
    const double re = parse_real(c);
    const double im = parse_real(c);
    return std::complex<double>(re, im);
  });
}

void write_matrix_market(const std::string& path, const CsrMatrix<double>& A) {
  write_impl(path, A, "%%MatrixMarket matrix coordinate real symmetric");
}

void write_matrix_market(const std::string& path,
                         const CsrMatrix<std::complex<double>>& A) {
  write_impl(path, A, "%%MatrixMarket matrix coordinate complex hermitian");
}

}  // namespace mpeig
