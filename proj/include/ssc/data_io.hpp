#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ssc/rng.hpp"
#include "ssc/types.hpp"

namespace ssc {

enum class MatrixFormat { CsvColumns, CsvRows, RawF64 };

inline MatrixFormat parse_matrix_format(const std::string& name) {
  if (name == "csv" || name == "csv-columns") return MatrixFormat::CsvColumns;
  if (name == "csv-rows") return MatrixFormat::CsvRows;
  if (name == "raw") return MatrixFormat::RawF64;
  throw std::invalid_argument("unknown matrix format: " + name);
}

/// Subspace intercepts mu^(l): all zero (linear subspaces) or uniform on the
/// unit sphere (proper affine subspaces).
enum class MuMode { Zero, RandomUnit };

/// Union-of-subspaces sampling model: x_i = U^(l) z_i + mu^(l) + v_i with
/// orthonormal bases U^(l), z_i standard normal and v_i ~ N(0, sigma^2 I).
struct SyntheticSpec {
  Index p = 0;                 ///< ambient dimension
  int K = 0;                   ///< number of subspaces
  std::vector<Index> r;        ///< per-subspace dimension (size K)
  std::vector<Index> n_per;    ///< points per subspace (size K)
  double sigma = 0.0;          ///< noise standard deviation
  MuMode mu_mode = MuMode::Zero;
  Index shared_dim = 0;        ///< dimensions common to every pair of bases
  std::uint64_t rng_seed = 0;

  Index total_points() const {
    Index n = 0;
    for (Index c : n_per) n += c;
    return n;
  }

  void validate() const {
    if (p < 1) throw std::invalid_argument("synthetic: p must be >= 1");
    if (K < 1) throw std::invalid_argument("synthetic: K must be >= 1");
    if (static_cast<int>(r.size()) != K || static_cast<int>(n_per.size()) != K)
      throw std::invalid_argument("synthetic: r and n_per must have K entries");
    if (sigma < 0.0) throw std::invalid_argument("synthetic: sigma must be >= 0");
    if (shared_dim < 0) throw std::invalid_argument("synthetic: shared_dim must be >= 0");
    Index needed = shared_dim;
    for (Index rl : r) {
      if (rl < 1 || rl > p) throw std::invalid_argument("synthetic: need 1 <= r_l <= p");
      if (shared_dim > rl)
        throw std::invalid_argument("synthetic: shared_dim must be <= min r_l");
      needed += rl - shared_dim;
    }
    if (needed > p)
      throw std::invalid_argument("synthetic: bases need more orthonormal vectors than p");
    for (Index c : n_per) {
      if (c < 1) throw std::invalid_argument("synthetic: n_per entries must be >= 1");
    }
  }
};

struct Dataset {
  Matrix X;  ///< p x n, points as columns
  std::optional<Labels> truth;
  std::string provenance;
};

namespace detail {

inline Matrix normal_matrix(Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.next_normal();
  return m;
}

}  // namespace detail

/// Draws a dataset from the union-of-subspaces model. Deterministic in
/// rng_seed; the noise stream is consumed even at sigma = 0, so runs that
/// differ only in sigma share the same subspaces and coefficients.
inline Dataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.rng_seed);

  // One shared orthonormal pool via QR of a Gaussian block; the first
  // shared_dim columns are common to every basis.
  Index needed = spec.shared_dim;
  for (Index rl : spec.r) needed += rl - spec.shared_dim;
  Rng basis_rng = rng.derive(1);
  const Matrix gauss = detail::normal_matrix(basis_rng, spec.p, needed);
  const Matrix pool = Eigen::HouseholderQR<Matrix>(gauss).householderQ() *
                      Matrix::Identity(spec.p, needed);

  std::vector<Matrix> bases(spec.K);
  Index next_col = spec.shared_dim;
  for (int l = 0; l < spec.K; ++l) {
    Matrix basis(spec.p, spec.r[l]);
    basis.leftCols(spec.shared_dim) = pool.leftCols(spec.shared_dim);
    const Index own = spec.r[l] - spec.shared_dim;
    basis.rightCols(own) = pool.middleCols(next_col, own);
    next_col += own;
    bases[l] = std::move(basis);
  }

  Rng mu_rng = rng.derive(2);
  std::vector<Vector> intercepts(spec.K, Vector::Zero(spec.p));
  if (spec.mu_mode == MuMode::RandomUnit) {
    for (int l = 0; l < spec.K; ++l) {
      Vector g(spec.p);
      for (Index i = 0; i < spec.p; ++i) g[i] = mu_rng.next_normal();
      intercepts[l] = g / g.norm();
    }
  }

  const Index n = spec.total_points();
  Matrix X(spec.p, n);
  Labels truth(static_cast<std::size_t>(n));
  Rng point_rng = rng.derive(3);
  Index col = 0;
  for (int l = 0; l < spec.K; ++l) {
    for (Index t = 0; t < spec.n_per[l]; ++t, ++col) {
      Vector z(spec.r[l]);
      for (Index i = 0; i < spec.r[l]; ++i) z[i] = point_rng.next_normal();
      Vector noise(spec.p);
      for (Index i = 0; i < spec.p; ++i) noise[i] = point_rng.next_normal();
      X.col(col) = bases[l] * z + intercepts[l] + spec.sigma * noise;
      truth[static_cast<std::size_t>(col)] = l;
    }
  }

  std::ostringstream prov;
  prov << "synthetic(seed=" << spec.rng_seed << ",p=" << spec.p << ",K=" << spec.K
       << ",n=" << n << ",sigma=" << spec.sigma << ",shared=" << spec.shared_dim << ")";
  return Dataset{std::move(X), std::move(truth), prov.str()};
}

namespace detail {

constexpr char kRawMagic[8] = {'S', 'S', 'C', 'M', 'A', 'T', '0', '1'};

inline void put_u32_le(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32_le(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& tok, const std::string& path, std::size_t line,
                           std::size_t column) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (end && *end == ' ') ++end;
  if (end == begin || (end && *end != '\0')) {
    throw IoError(path + ": line " + std::to_string(line) + ", field " +
                  std::to_string(column) + ": cannot parse '" + tok + "' as a number");
  }
  if (!std::isfinite(v)) {
    throw IoError(path + ": line " + std::to_string(line) + ", field " +
                  std::to_string(column) + ": non-finite value rejected");
  }
  return v;
}

inline Matrix read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    std::size_t field = 0;
    while (std::getline(ss, tok, ',')) {
      ++field;
      row.push_back(parse_double(tok, path, lineno, field));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw IoError(path + ": line " + std::to_string(lineno) + ": expected " +
                    std::to_string(rows.front().size()) + " fields, got " +
                    std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path + ": empty matrix file");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

inline void write_csv(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

inline Matrix read_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kRawMagic, 8) != 0)
    throw IoError(path + ": bad RawF64 header magic");
  const std::uint32_t p = get_u32_le(in);
  const std::uint32_t n = get_u32_le(in);
  if (!in || p == 0 || n == 0) throw IoError(path + ": bad RawF64 dimensions");
  Matrix m(static_cast<Index>(p), static_cast<Index>(n));
  static_assert(sizeof(double) == 8);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * p * n));
  if (!in) throw IoError(path + ": truncated RawF64 payload");
  if (!m.allFinite()) throw IoError(path + ": non-finite value rejected");
  return m;
}

inline void write_raw(const Matrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out.write(kRawMagic, 8);
  put_u32_le(out, static_cast<std::uint32_t>(m.rows()));
  put_u32_le(out, static_cast<std::uint32_t>(m.cols()));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace detail

/// Loads a p x n data matrix. CsvColumns reads file rows as matrix rows
/// (points are columns); CsvRows reads a samples-as-rows file and transposes.
/// RawF64 is the little-endian column-major binary format with a 16-byte
/// header (magic "SSCMAT01", u32 p, u32 n).
inline Dataset load_matrix(const std::string& path, MatrixFormat format) {
  Matrix m;
  switch (format) {
    case MatrixFormat::CsvColumns: m = detail::read_csv(path); break;
    case MatrixFormat::CsvRows: m = detail::read_csv(path).transpose(); break;
    case MatrixFormat::RawF64: m = detail::read_raw(path); break;
  }
  return Dataset{std::move(m), std::nullopt, path};
}

inline void save_matrix(const Matrix& m, const std::string& path, MatrixFormat format) {
  switch (format) {
    case MatrixFormat::CsvColumns: detail::write_csv(m, path); break;
    case MatrixFormat::CsvRows: detail::write_csv(m.transpose(), path); break;
    case MatrixFormat::RawF64: detail::write_raw(m, path); break;
  }
}

/// Scales every data point (column) to unit Euclidean norm, the usual
/// preprocessing before sparse self-expression. Zero columns are left alone.
inline Matrix normalize_columns(const Matrix& X) {
  Matrix out = X;
  for (Index j = 0; j < out.cols(); ++j) {
    const double norm = out.col(j).norm();
    if (norm > 0.0) out.col(j) /= norm;
  }
  return out;
}

/// Per-feature (row) standardization to mean 0 and unit sample standard
/// deviation (n-1 divisor). Constant rows map to all zeros and are reported
/// through constant_rows when non-null.
inline Matrix zscore_normalize(const Matrix& X, std::vector<Index>* constant_rows = nullptr) {
  const Index n = X.cols();
  if (n < 2) throw std::invalid_argument("zscore_normalize: need at least 2 samples");
  Matrix out(X.rows(), n);
  if (constant_rows) constant_rows->clear();
  for (Index i = 0; i < X.rows(); ++i) {
    if (X.row(i).maxCoeff() == X.row(i).minCoeff()) {
      out.row(i).setZero();
      if (constant_rows) constant_rows->push_back(i);
      continue;
    }
    const double mean = X.row(i).mean();
    const double ss = (X.row(i).array() - mean).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    out.row(i) = (X.row(i).array() - mean) / sd;
  }
  return out;
}

/// Sparse coefficient persistence: header "n nnz", then one "i j value" line
/// per stored entry (0-based, column-major order, 17 significant digits so
/// doubles round-trip exactly).
inline void save_coefficients(const SparseMatrix& C, const std::string& path) {
  if (C.rows() != C.cols()) throw std::invalid_argument("save_coefficients: C must be square");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << C.rows() << ' ' << C.nonZeros() << '\n';
  for (Index j = 0; j < C.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(C, j); it; ++it) {
      out << it.row() << ' ' << j << ' ' << detail::format_double(it.value()) << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

inline SparseMatrix load_coefficients(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": missing header");
  Index n = 0;
  long long nnz = -1;
  {
    std::stringstream ss(line);
    if (!(ss >> n >> nnz) || n < 0 || nnz < 0)
      throw IoError(path + ": malformed header '" + line + "'");
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(nnz));
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    Index i = -1, j = -1;
    std::string value_tok;
    if (!(ss >> i >> j >> value_tok))
      throw IoError(path + ": line " + std::to_string(lineno) + ": malformed triplet");
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw IoError(path + ": line " + std::to_string(lineno) + ": index out of range");
    triplets.emplace_back(i, j, detail::parse_double(value_tok, path, lineno, 3));
  }
  if (static_cast<long long>(triplets.size()) != nnz)
    throw IoError(path + ": header promises " + std::to_string(nnz) + " entries, found " +
                  std::to_string(triplets.size()));
  SparseMatrix C(n, n);
  C.setFromTriplets(triplets.begin(), triplets.end());
  return C;
}

inline void save_labels(const Labels& labels, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (int v : labels) out << v << '\n';
  if (!out) throw IoError("write failed: " + path);
}

inline Labels load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  Labels labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      std::size_t used = 0;
      const int v = std::stoi(line, &used);
      if (used != line.size() || v < 0) throw std::invalid_argument("");
      labels.push_back(v);
    } catch (const std::exception&) {
      throw IoError(path + ": line " + std::to_string(lineno) + ": bad label '" + line + "'");
    }
  }
  return labels;
}

}  // namespace ssc
