#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hopfimage/errors.hpp"
#include "hopfimage/linalg.hpp"

namespace hopfimage {

struct Tolerances {
  double unimodular = 1e-10;
  /// Orthogonality tolerance is this factor times N.
  double orthogonality_per_n = 1e-8;
};

struct ValidationReport {
  std::size_t n = 0;
  bool finite = true;
  double unimodularity_deviation = 0.0;  // max | |H_ij| - 1 |
  double orthogonality_deviation = 0.0;  // max | <H_i, H_j> - N delta_ij |
  bool pass = false;
};

/// Checks unimodularity and row orthogonality of a square matrix.
inline ValidationReport validate(const ComplexMatrix& m,
                                 const Tolerances& tol = {}) {
  if (m.rows() != m.cols()) {
    throw InputError("validate: matrix is " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + ", expected square");
  }
  ValidationReport report;
  report.n = static_cast<std::size_t>(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const Complex z = m(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        report.finite = false;
        continue;
      }
      report.unimodularity_deviation =
          std::max(report.unimodularity_deviation, std::abs(std::abs(z) - 1.0));
    }
  }
  if (!report.finite) {
    report.pass = false;
    return report;
  }
  // Gram of the rows: G_ij = sum_k H_ik conj(H_jk).
  const ComplexMatrix gram = m * m.adjoint();
  const double n = static_cast<double>(report.n);
  for (Eigen::Index i = 0; i < gram.rows(); ++i) {
    for (Eigen::Index j = 0; j < gram.cols(); ++j) {
      const Complex expected = (i == j) ? Complex(n, 0.0) : Complex(0.0, 0.0);
      report.orthogonality_deviation = std::max(report.orthogonality_deviation,
                                                std::abs(gram(i, j) - expected));
    }
  }
  report.pass = report.n > 0 &&
                report.unimodularity_deviation < tol.unimodular &&
                report.orthogonality_deviation < tol.orthogonality_per_n * n;
  return report;
}

class NotHadamard : public Error {
 public:
  explicit NotHadamard(ValidationReport report)
      : Error("not a complex Hadamard matrix: unimodularity deviation " +
              std::to_string(report.unimodularity_deviation) +
              ", orthogonality deviation " +
              std::to_string(report.orthogonality_deviation) +
              (report.finite ? "" : ", non-finite entries")),
        report_(report) {}

  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

/// A validated N x N complex Hadamard matrix plus a description of how it
/// was built. Immutable.
class HadamardMatrix {
 public:
  static HadamardMatrix from_matrix(ComplexMatrix m, std::string provenance,
                                    const Tolerances& tol = {}) {
    const ValidationReport report = validate(m, tol);
    if (!report.pass) throw NotHadamard(report);
    return HadamardMatrix(std::move(m), std::move(provenance));
  }

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(matrix_.rows());
  }
  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Complex operator()(std::size_t i, std::size_t j) const {
    return matrix_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const std::string& provenance() const noexcept { return provenance_; }

 private:
  HadamardMatrix(ComplexMatrix m, std::string provenance)
      : matrix_(std::move(m)), provenance_(std::move(provenance)) {}

  ComplexMatrix matrix_;
  std::string provenance_;
};

/// SplitMix64 stream. Seeds the Dita phase parameters reproducibly.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// M x N matrix of unimodular phases exp(i theta), stored by angle.
class PhaseParameterMatrix {
 public:
  static PhaseParameterMatrix from_angles(Eigen::MatrixXd angles,
                                          std::string source) {
    if (angles.rows() < 1 || angles.cols() < 1) {
      throw InputError("phase parameter matrix must be at least 1x1");
    }
    if (!angles.allFinite()) {
      throw InputError("phase parameter matrix has non-finite angles");
    }
    return PhaseParameterMatrix(std::move(angles), std::move(source));
  }

  /// theta = 2 pi u / 2^64 for successive SplitMix64 outputs u, row-major.
  static PhaseParameterMatrix from_seed(std::size_t m, std::size_t n,
                                        std::uint64_t seed) {
    Eigen::MatrixXd angles(static_cast<Eigen::Index>(m),
                           static_cast<Eigen::Index>(n));
    SplitMix64 rng(seed);
    for (Eigen::Index i = 0; i < angles.rows(); ++i) {
      for (Eigen::Index b = 0; b < angles.cols(); ++b) {
        angles(i, b) = kTwoPi * std::ldexp(static_cast<double>(rng.next()), -64);
      }
    }
    return from_angles(std::move(angles), "seed=" + std::to_string(seed));
  }

  static PhaseParameterMatrix ones(std::size_t m, std::size_t n) {
    return from_angles(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                             static_cast<Eigen::Index>(n)),
                       "ones");
  }

  std::size_t rows() const noexcept {
    return static_cast<std::size_t>(angles_.rows());
  }
  std::size_t cols() const noexcept {
    return static_cast<std::size_t>(angles_.cols());
  }
  double angle(std::size_t i, std::size_t b) const {
    return angles_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b));
  }
  Complex phase(std::size_t i, std::size_t b) const {
    return phases_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b));
  }
  const Eigen::MatrixXd& angles() const noexcept { return angles_; }
  const std::string& source() const noexcept { return source_; }

  PhaseParameterMatrix transposed() const {
    return PhaseParameterMatrix(angles_.transpose(), source_ + "^t");
  }

 private:
  PhaseParameterMatrix(Eigen::MatrixXd angles, std::string source)
      : angles_(std::move(angles)), source_(std::move(source)) {
    phases_.resize(angles_.rows(), angles_.cols());
    for (Eigen::Index i = 0; i < angles_.rows(); ++i) {
      for (Eigen::Index b = 0; b < angles_.cols(); ++b) {
        phases_(i, b) = std::polar(1.0, angles_(i, b));
      }
    }
  }

  Eigen::MatrixXd angles_;
  ComplexMatrix phases_;
  std::string source_;
};

namespace detail {

inline ComplexMatrix fourier_entries(std::size_t n) {
  const auto size = static_cast<Eigen::Index>(n);
  ComplexMatrix f(size, size);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // reduce the exponent first so large i*j do not lose accuracy
      const double angle =
          kTwoPi * static_cast<double>((i * j) % n) / static_cast<double>(n);
      f(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::polar(1.0, angle);
    }
  }
  return f;
}

/// Kronecker product, (i,a) -> i * rows(k) + a.
inline ComplexMatrix kron(const ComplexMatrix& h, const ComplexMatrix& k) {
  ComplexMatrix out(h.rows() * k.rows(), h.cols() * k.cols());
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      out.block(i * k.rows(), j * k.cols(), k.rows(), k.cols()) = h(i, j) * k;
    }
  }
  return out;
}

/// L_{ia,jb} = Q_{ib} (F_M)_{ij} (F_N)_{ab}.
inline ComplexMatrix dita_entries(const PhaseParameterMatrix& q) {
  const std::size_t m = q.rows();
  const std::size_t n = q.cols();
  const ComplexMatrix fm = fourier_entries(m);
  const ComplexMatrix fn = fourier_entries(n);
  const auto size = static_cast<Eigen::Index>(m * n);
  ComplexMatrix out(size, size);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t b = 0; b < n; ++b) {
          out(static_cast<Eigen::Index>(i * n + a),
              static_cast<Eigen::Index>(j * n + b)) =
              q.phase(i, b) *
              fm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
              fn(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        }
      }
    }
  }
  return out;
}

inline ComplexMatrix dephase_entries(const ComplexMatrix& h) {
  ComplexMatrix out = h;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    const Complex top = out(0, j);
    out.col(j) /= top;
  }
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const Complex left = out(i, 0);
    out.row(i) /= left;
  }
  return out;
}

}  // namespace detail

inline HadamardMatrix fourier(std::size_t n) {
  if (n == 0) throw InputError("fourier: order must be at least 1");
  return HadamardMatrix::from_matrix(detail::fourier_entries(n),
                                     "fourier:" + std::to_string(n));
}

/// F_{N_1} (x) ... (x) F_{N_k}, left factor major.
inline HadamardMatrix fourier_group(std::span<const std::size_t> orders) {
  if (orders.empty()) throw InputError("fourier_group: empty order list");
  ComplexMatrix acc = ComplexMatrix::Ones(1, 1);
  std::string name = "fouriergroup:";
  for (std::size_t k = 0; k < orders.size(); ++k) {
    if (orders[k] == 0) throw InputError("fourier_group: order must be at least 1");
    acc = detail::kron(acc, detail::fourier_entries(orders[k]));
    name += (k ? "x" : "") + std::to_string(orders[k]);
  }
  return HadamardMatrix::from_matrix(std::move(acc), std::move(name));
}

inline HadamardMatrix fourier_group(std::initializer_list<std::size_t> orders) {
  const std::vector<std::size_t> v(orders);
  return fourier_group(std::span<const std::size_t>(v));
}

inline HadamardMatrix tensor(const HadamardMatrix& h, const HadamardMatrix& k) {
  return HadamardMatrix::from_matrix(
      detail::kron(h.matrix(), k.matrix()),
      "tensor(" + h.provenance() + "," + k.provenance() + ")");
}

inline HadamardMatrix dita(const PhaseParameterMatrix& q) {
  return HadamardMatrix::from_matrix(
      detail::dita_entries(q), "dita(" + std::to_string(q.rows()) + "," +
                                   std::to_string(q.cols()) + ";" + q.source() +
                                   ")");
}

inline HadamardMatrix dita(std::size_t m, std::size_t n,
                           const PhaseParameterMatrix& q) {
  if (q.rows() != m || q.cols() != n) {
    throw InputError("dita: phase matrix is " + std::to_string(q.rows()) + "x" +
                     std::to_string(q.cols()) + ", expected " +
                     std::to_string(m) + "x" + std::to_string(n));
  }
  return dita(q);
}

inline HadamardMatrix conjugate(const HadamardMatrix& h) {
  return HadamardMatrix::from_matrix(h.matrix().conjugate(),
                                     "conj(" + h.provenance() + ")");
}

inline HadamardMatrix transpose(const HadamardMatrix& h) {
  return HadamardMatrix::from_matrix(h.matrix().transpose(),
                                     "transpose(" + h.provenance() + ")");
}

inline HadamardMatrix adjoint(const HadamardMatrix& h) {
  return HadamardMatrix::from_matrix(h.matrix().adjoint(),
                                     "adjoint(" + h.provenance() + ")");
}

/// First row and column all 1: divide column j by H_0j, then row i by the
/// new (i,0) entry.
inline HadamardMatrix dephase(const HadamardMatrix& h) {
  return HadamardMatrix::from_matrix(detail::dephase_entries(h.matrix()),
                                     "dephase(" + h.provenance() + ")");
}

/// Sorted multiset of the quadruple products H_ik H_jl / (H_il H_jk) over all
/// (i, j, k, l), each rounded to 9 decimals.
///
/// These are N times the magic grid entries. The multiset is unchanged by
/// row and column permutations and by row and column phases, so equal
/// fingerprints are necessary for equivalence.
inline std::vector<std::pair<double, double>> equivalence_fingerprint(
    const HadamardMatrix& h) {
  const auto n = static_cast<Eigen::Index>(h.size());
  const ComplexMatrix& m = h.matrix();
  const auto round9 = [](double v) {
    const double r = std::round(v * 1e9) / 1e9;
    return r == 0.0 ? 0.0 : r;  // fold -0
  };
  std::vector<std::pair<double, double>> values;
  values.reserve(static_cast<std::size_t>(n * n * n * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index l = 0; l < n; ++l) {
          const Complex z = m(i, k) * m(j, l) / (m(i, l) * m(j, k));
          values.emplace_back(round9(z.real()), round9(z.imag()));
        }
      }
    }
  }
  std::sort(values.begin(), values.end());
  return values;
}

}  // namespace hopfimage
