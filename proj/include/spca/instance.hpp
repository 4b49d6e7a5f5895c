// Problem data: validated symmetric PSD covariance/correlation matrices,
// CSV ingestion and the bundled reference datasets.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spca/linalg.hpp"
#include "spca/types.hpp"

namespace spca {

enum class Source { RawCovariance, CorrelationFromData, Bundled };

inline std::string_view source_name(Source s) {
  switch (s) {
    case Source::RawCovariance: return "raw-covariance";
    case Source::CorrelationFromData: return "correlation-from-data";
    case Source::Bundled: return "bundled";
  }
  return "?";
}

// Immutable after construction; safe for concurrent shared reads.
template <typename Scalar>
struct Instance {
  std::string name;
  Source source = Source::RawCovariance;
  Matrix<Scalar> sigma;
  bool psd_clipped = false;  // near-PSD input was eigenvalue-clipped on load
  Scalar lambda_max = Scalar(0);

  Index p() const { return static_cast<Index>(sigma.rows()); }

  // Validates symmetry and positive semidefiniteness. Inputs with
  // lambda_min in [-1e-6 * lambda_max, 0) are clipped to the nearest PSD
  // matrix and flagged; anything more indefinite is rejected.
  static Instance from_matrix(Matrix<Scalar> m, Source source,
                              std::string name) {
    if (m.rows() != m.cols())
      throw ValidationError("matrix must be square, got " +
                            std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
    if (!m.allFinite())
      throw ValidationError("matrix contains non-finite entries");
    const Scalar scale = std::max(Scalar(1), m.cwiseAbs().maxCoeff());
    const Scalar asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > Scalar(1e-12) * scale)
      throw ValidationError("matrix not symmetric: max|S - S^T| = " +
                            std::to_string(double(asym)));
    Matrix<Scalar> sym(m.rows(), m.cols());
    for (Index i = 0; i < m.rows(); ++i) {
      sym(i, i) = m(i, i);
      for (Index j = 0; j < i; ++j) {
        const Scalar v = (m(i, j) + m(j, i)) / Scalar(2);
        sym(i, j) = v;
        sym(j, i) = v;
      }
    }

    Instance inst;
    inst.name = std::move(name);
    inst.source = source;

    EigenDecomposition<Scalar> ed = sym_eig(sym);
    const Scalar lmax = std::max(ed.values(ed.values.size() - 1), Scalar(0));
    const Scalar lmin = ed.values(0);
    const Scalar lscale = std::max(lmax, Scalar(1e-30));
    if (lmin < -Scalar(1e-6) * lscale)
      throw ValidationError(
          "matrix is not positive semidefinite: lambda_min = " +
          std::to_string(double(lmin)) + ", lambda_max = " +
          std::to_string(double(lmax)));
    if (lmin < Scalar(0)) {
      Vector<Scalar> clipped = ed.values.cwiseMax(Scalar(0));
      sym = ed.vectors * clipped.asDiagonal() * ed.vectors.transpose();
      sym = ((sym + sym.transpose()) / Scalar(2)).eval();
      inst.psd_clipped = true;
    }
    inst.sigma = std::move(sym);
    inst.lambda_max = lmax;

    if (inst.source == Source::CorrelationFromData ||
        inst.source == Source::Bundled) {
      for (Index i = 0; i < inst.p(); ++i)
        if (std::abs(inst.sigma(i, i) - Scalar(1)) > Scalar(1e-10))
          throw ValidationError("correlation matrix diagonal entry " +
                                std::to_string(i + 1) + " is " +
                                std::to_string(double(inst.sigma(i, i))) +
                                ", expected 1");
    }
    return inst;
  }
};

enum class CsvMode { DataMatrix, Covariance };

namespace detail {

inline bool parse_double(std::string_view tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

// Parses a rectangular numeric table. A non-numeric first row is treated as
// a header and skipped.
inline std::vector<std::vector<double>> read_csv_table(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool first_content_row = true;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    auto cells = split_csv_line(sv);
    std::vector<double> row(cells.size());
    bool all_numeric = true;
    std::size_t bad_col = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], row[c])) {
        all_numeric = false;
        bad_col = c;
        break;
      }
    }
    if (!all_numeric) {
      if (first_content_row) {  // header row
        first_content_row = false;
        continue;
      }
      throw ParseError("non-numeric cell at row " + std::to_string(lineno) +
                       ", column " + std::to_string(bad_col + 1) + ": '" +
                       std::string(cells[bad_col]) + "'");
    }
    first_content_row = false;
    if (!rows.empty() && rows.front().size() != row.size())
      throw ParseError("row " + std::to_string(lineno) + " has " +
                       std::to_string(row.size()) + " cells, expected " +
                       std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("no numeric rows in file: " + path);
  return rows;
}

inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

// Loads a CSV file either as an n x p data matrix (columns centered, and
// with normalize also scaled to unit sample standard deviation, then
// Sigma = A^T A / (n-1)) or directly as a p x p covariance matrix.
template <typename Scalar>
Instance<Scalar> load_csv(const std::string& path, CsvMode mode,
                          bool normalize) {
  auto rows = detail::read_csv_table(path);
  const Index nrows = static_cast<Index>(rows.size());
  const Index ncols = static_cast<Index>(rows.front().size());
  Matrix<Scalar> table(nrows, ncols);
  for (Index i = 0; i < nrows; ++i)
    for (Index j = 0; j < ncols; ++j) table(i, j) = Scalar(rows[i][j]);

  if (mode == CsvMode::Covariance) {
    if (nrows != ncols)
      throw ParseError("covariance matrix must be square, got " +
                       std::to_string(nrows) + "x" + std::to_string(ncols));
    return Instance<Scalar>::from_matrix(std::move(table),
                                         Source::RawCovariance, path);
  }

  if (nrows < 2)
    throw ValidationError("data matrix needs at least 2 rows, got " +
                          std::to_string(nrows));
  const Scalar divisor = Scalar(nrows - 1);
  for (Index j = 0; j < ncols; ++j) {
    const Scalar mean = table.col(j).mean();
    table.col(j).array() -= mean;
    if (normalize) {
      const Scalar ssd = table.col(j).squaredNorm();
      if (ssd == Scalar(0))
        throw ValidationError("column " + std::to_string(j + 1) +
                              " has zero variance; cannot normalize");
      table.col(j) /= std::sqrt(ssd / divisor);
    }
  }
  Matrix<Scalar> sigma = (table.transpose() * table) / divisor;
  return Instance<Scalar>::from_matrix(
      std::move(sigma),
      normalize ? Source::CorrelationFromData : Source::RawCovariance, path);
}

// Writes sigma as CSV with shortest round-trip formatting, so that
// load_csv(Covariance) reproduces the matrix bit for bit.
template <typename Scalar>
void save_csv(const Instance<Scalar>& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open file for writing: " + path);
  for (Index i = 0; i < inst.p(); ++i) {
    for (Index j = 0; j < inst.p(); ++j) {
      if (j) out << ',';
      out << detail::format_double(double(inst.sigma(i, j)));
    }
    out << '\n';
  }
}

namespace detail {

// Correlation matrix of the 13 pitprops variables (Jeffers 1967), the
// standard small benchmark for sparse PCA. Lower triangle, row by row.
inline constexpr double kPitprops[13][13] = {
    {1.0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0.954, 1.0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0.364, 0.297, 1.0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0.342, 0.284, 0.882, 1.0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {-0.129, -0.118, -0.148, 0.220, 1.0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0.313, 0.291, 0.153, 0.381, 0.364, 1.0, 0, 0, 0, 0, 0, 0, 0},
    {0.496, 0.503, -0.029, 0.174, 0.296, 0.813, 1.0, 0, 0, 0, 0, 0, 0},
    {0.424, 0.419, -0.054, -0.059, 0.004, 0.090, 0.372, 1.0, 0, 0, 0, 0, 0},
    {0.592, 0.648, 0.125, 0.137, -0.039, 0.211, 0.465, 0.482, 1.0, 0, 0, 0,
     0},
    {0.545, 0.569, -0.081, -0.014, 0.037, 0.274, 0.679, 0.557, 0.526, 1.0, 0,
     0, 0},
    {0.084, 0.076, 0.162, 0.097, 0.091, -0.036, -0.113, 0.061, 0.085, -0.319,
     1.0, 0, 0},
    {-0.019, -0.036, 0.220, 0.169, -0.145, 0.024, -0.232, -0.357, -0.127,
     -0.368, 0.029, 1.0, 0},
    {0.134, 0.144, 0.126, 0.015, -0.208, -0.329, -0.424, -0.202, -0.076,
     -0.291, 0.007, 0.184, 1.0}};

}  // namespace detail

inline std::vector<std::string> bundled_names() { return {"pitprops"}; }

template <typename Scalar>
Instance<Scalar> bundled(std::string_view name) {
  if (name == "pitprops") {
    Matrix<Scalar> m(13, 13);
    for (Index i = 0; i < 13; ++i)
      for (Index j = 0; j <= i; ++j) {
        m(i, j) = Scalar(detail::kPitprops[i][j]);
        m(j, i) = m(i, j);
      }
    return Instance<Scalar>::from_matrix(std::move(m), Source::Bundled,
                                         "pitprops");
  }
  std::string msg = "unknown bundled dataset '" + std::string(name) +
                    "'; available:";
  for (const auto& n : bundled_names()) msg += " " + n;
  throw ValidationError(msg);
}

}  // namespace spca
