#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hopfimage/errors.hpp"
#include "hopfimage/hadamard.hpp"
#include "hopfimage/linalg.hpp"

namespace hopfimage {

/// N x N grid of N x N matrices P_ij. magic_grid() builds the rank-one
/// projections P_ij = Proj(H_i / H_j) onto ratios of rows of H; the raw
/// constructor accepts anything, so corrupted grids can be verified too.
class MagicGrid {
 public:
  MagicGrid(std::size_t n, std::vector<ComplexMatrix> blocks)
      : n_(n), blocks_(std::move(blocks)) {
    if (blocks_.size() != n_ * n_) {
      throw InputError("MagicGrid: expected " + std::to_string(n_ * n_) +
                       " blocks, got " + std::to_string(blocks_.size()));
    }
    for (const auto& b : blocks_) {
      if (b.rows() != static_cast<Eigen::Index>(n_) ||
          b.cols() != static_cast<Eigen::Index>(n_)) {
        throw InputError("MagicGrid: every block must be N x N");
      }
    }
  }

  std::size_t size() const noexcept { return n_; }

  const ComplexMatrix& operator()(std::size_t i, std::size_t j) const {
    return blocks_[i * n_ + j];
  }

  /// Copy with block (i, j) replaced.
  MagicGrid with_block(std::size_t i, std::size_t j, ComplexMatrix block) const {
    std::vector<ComplexMatrix> blocks = blocks_;
    blocks.at(i * n_ + j) = std::move(block);
    return MagicGrid(n_, std::move(blocks));
  }

 private:
  std::size_t n_;
  std::vector<ComplexMatrix> blocks_;
};

struct MagicReport {
  static constexpr double kTolerance = 1e-9;
  static constexpr double kTraceTolerance = 1e-10;

  // Deviations are operator norms of the residual matrices.
  double idempotency = 0.0;       // max ||P_ij^2 - P_ij||
  double self_adjointness = 0.0;  // max ||P_ij - P_ij^*||
  double row_sums = 0.0;          // max_i ||sum_j P_ij - 1||
  double column_sums = 0.0;       // max_j ||sum_i P_ij - 1||
  double trace = 0.0;             // max |Tr(P_ij) - 1|

  std::pair<std::size_t, std::size_t> worst_idempotency{0, 0};
  std::pair<std::size_t, std::size_t> worst_self_adjointness{0, 0};
  std::size_t worst_row = 0;
  std::size_t worst_column = 0;
  std::pair<std::size_t, std::size_t> worst_trace{0, 0};

  bool pass() const noexcept {
    return idempotency < kTolerance && self_adjointness < kTolerance &&
           row_sums < kTolerance && column_sums < kTolerance;
  }
};

inline MagicReport verify_magic(const MagicGrid& grid) {
  MagicReport report;
  const std::size_t n = grid.size();
  const auto dim = static_cast<Eigen::Index>(n);
  const ComplexMatrix identity = ComplexMatrix::Identity(dim, dim);
  for (std::size_t i = 0; i < n; ++i) {
    ComplexMatrix row_sum = -identity;
    for (std::size_t j = 0; j < n; ++j) {
      const ComplexMatrix& p = grid(i, j);
      row_sum += p;
      const double idem = operator_norm(p * p - p);
      if (idem > report.idempotency) {
        report.idempotency = idem;
        report.worst_idempotency = {i, j};
      }
      const double adj = operator_norm(p - p.adjoint());
      if (adj > report.self_adjointness) {
        report.self_adjointness = adj;
        report.worst_self_adjointness = {i, j};
      }
      const double tr = std::abs(p.trace() - 1.0);
      if (tr > report.trace) {
        report.trace = tr;
        report.worst_trace = {i, j};
      }
    }
    const double dev = operator_norm(row_sum);
    if (dev > report.row_sums) {
      report.row_sums = dev;
      report.worst_row = i;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    ComplexMatrix column_sum = -identity;
    for (std::size_t i = 0; i < n; ++i) column_sum += grid(i, j);
    const double dev = operator_norm(column_sum);
    if (dev > report.column_sums) {
      report.column_sums = dev;
      report.worst_column = j;
    }
  }
  return report;
}

namespace detail {

/// (P_ij)_kl = (1/N) H_ik H_jl / (H_il H_jk), unchecked.
inline MagicGrid magic_grid_entries(const ComplexMatrix& h) {
  const auto n = static_cast<std::size_t>(h.rows());
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<ComplexMatrix> blocks;
  blocks.reserve(n * n);
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    for (Eigen::Index j = 0; j < h.rows(); ++j) {
      ComplexMatrix p(h.rows(), h.rows());
      for (Eigen::Index k = 0; k < h.rows(); ++k) {
        for (Eigen::Index l = 0; l < h.rows(); ++l) {
          p(k, l) = inv_n * h(i, k) * h(j, l) / (h(i, l) * h(j, k));
        }
      }
      blocks.push_back(std::move(p));
    }
  }
  return MagicGrid(n, std::move(blocks));
}

}  // namespace detail

/// Builds P_ij = Proj(H_i/H_j) from the closed entry formula and checks the
/// magic conditions. A failure names the offending block, row, or column.
inline MagicGrid magic_grid(const HadamardMatrix& h) {
  MagicGrid grid = detail::magic_grid_entries(h.matrix());
  const MagicReport report = verify_magic(grid);
  const auto at = [](std::pair<std::size_t, std::size_t> ij) {
    return "(" + std::to_string(ij.first) + "," + std::to_string(ij.second) + ")";
  };
  if (report.idempotency >= MagicReport::kTolerance) {
    throw NumericalError("magic grid: P" + at(report.worst_idempotency) +
                         " is not idempotent");
  }
  if (report.self_adjointness >= MagicReport::kTolerance) {
    throw NumericalError("magic grid: P" + at(report.worst_self_adjointness) +
                         " is not self-adjoint");
  }
  if (report.trace >= MagicReport::kTraceTolerance) {
    throw NumericalError("magic grid: P" + at(report.worst_trace) +
                         " does not have trace 1");
  }
  if (report.row_sums >= MagicReport::kTolerance) {
    throw NumericalError("magic grid: row " + std::to_string(report.worst_row) +
                         " does not sum to the identity");
  }
  if (report.column_sums >= MagicReport::kTolerance) {
    throw NumericalError("magic grid: column " +
                         std::to_string(report.worst_column) +
                         " does not sum to the identity");
  }
  return grid;
}

/// Normalized trace tr = Tr/N of P_{a_1 b_1} ... P_{a_p b_p}.
inline Complex normalized_trace_of_word(const MagicGrid& grid,
                                        std::span<const std::size_t> a,
                                        std::span<const std::size_t> b) {
  if (a.size() != b.size()) {
    throw InputError("word index lists must have equal length");
  }
  const auto n = static_cast<Eigen::Index>(grid.size());
  ComplexMatrix product = ComplexMatrix::Identity(n, n);
  for (std::size_t s = 0; s < a.size(); ++s) {
    if (a[s] >= grid.size() || b[s] >= grid.size()) {
      throw InputError("word index out of range");
    }
    product = product * grid(a[s], b[s]);
  }
  return product.trace() / static_cast<double>(grid.size());
}

/// (T_p)_{i_1..i_p, j_1..j_p} = tr(P_{i_1 j_1} ... P_{i_p j_p}),
/// multi-indices flattened row-major.
struct TruncationTensor {
  std::size_t p = 0;
  std::size_t n = 0;
  ComplexMatrix t;
};

inline TruncationTensor truncation_tensor(const MagicGrid& grid, std::size_t p,
                                          std::size_t cap = kDefaultCap) {
  if (p == 0) throw InputError("truncation_tensor: p must be positive");
  const std::size_t n = grid.size();
  const std::size_t dim = checked_pow(n, p);
  require_within_cap(dim, cap, "T_" + std::to_string(p));

  TruncationTensor out{p, n, ComplexMatrix(static_cast<Eigen::Index>(dim),
                                           static_cast<Eigen::Index>(dim))};
  const double inv_n = 1.0 / static_cast<double>(n);

  // Depth-first over (i_s, j_s), carrying the product of the prefix so each
  // entry costs one contraction against the last block.
  std::vector<ComplexMatrix> transposed;
  transposed.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) transposed.push_back(grid(i, j).transpose());
  }
  std::function<void(std::size_t, std::size_t, std::size_t, const ComplexMatrix&)>
      descend = [&](std::size_t depth, std::size_t row, std::size_t col,
                    const ComplexMatrix& prefix) {
        if (depth + 1 == p) {
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
              out.t(static_cast<Eigen::Index>(row * n + i),
                    static_cast<Eigen::Index>(col * n + j)) =
                  prefix.cwiseProduct(transposed[i * n + j]).sum() * inv_n;
            }
          }
          return;
        }
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            descend(depth + 1, row * n + i, col * n + j, prefix * grid(i, j));
          }
        }
      };
  const auto nn = static_cast<Eigen::Index>(n);
  descend(0, 0, 0, ComplexMatrix::Identity(nn, nn));
  return out;
}

/// Truncated integral of the word u_{a_1 b_1} ... u_{a_p b_p} at depth r:
/// the (a, b) entry of T_p^r, with T_p^0 the identity.
inline Complex truncated_integral_word(const HadamardMatrix& h, std::size_t r,
                                       std::span<const std::size_t> a,
                                       std::span<const std::size_t> b,
                                       std::size_t cap = kDefaultCap) {
  if (a.size() != b.size() || a.empty()) {
    throw InputError("truncated_integral_word: index lists must be nonempty and of equal length");
  }
  const std::size_t n = h.size();
  for (std::size_t s = 0; s < a.size(); ++s) {
    if (a[s] >= n || b[s] >= n) {
      throw InputError("truncated_integral_word: index out of range");
    }
  }
  require_within_cap(checked_pow(n, a.size()), cap, "T_" + std::to_string(a.size()));
  const std::size_t row = flatten(a, n);
  const std::size_t col = flatten(b, n);
  if (r == 0) return row == col ? Complex(1.0, 0.0) : Complex(0.0, 0.0);

  const TruncationTensor tp = truncation_tensor(magic_grid(h), a.size(), cap);
  Eigen::RowVectorXcd v = tp.t.row(static_cast<Eigen::Index>(row));
  for (std::size_t k = 1; k < r; ++k) v = v * tp.t;
  return v(static_cast<Eigen::Index>(col));
}

struct GridRelationReport {
  double conjugate = 0.0;  // P^{conj H}_ij  vs  P^H_ji
  double transpose = 0.0;  // (P^{H^t}_ij)_kl  vs  (P^H_kl)_ij
  double adjoint = 0.0;    // (P^{H^*}_ij)_kl  vs  (P^H_lk)_ij
  double flip = 0.0;       // (P^H_ij)_kl  vs  (P^H_ji)_lk

  double max() const noexcept {
    return std::max({conjugate, transpose, adjoint, flip});
  }
};

/// Builds the grids of H, conj(H), H^t, H^* from scratch and measures the
/// entrywise relations between them.
inline GridRelationReport grid_relations_check(const HadamardMatrix& h) {
  const MagicGrid p = magic_grid(h);
  const MagicGrid pc = magic_grid(conjugate(h));
  const MagicGrid pt = magic_grid(transpose(h));
  const MagicGrid pa = magic_grid(adjoint(h));
  const std::size_t n = h.size();
  const auto e = [](const ComplexMatrix& m, std::size_t k, std::size_t l) {
    return m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l));
  };
  GridRelationReport report;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
          report.conjugate = std::max(
              report.conjugate, std::abs(e(pc(i, j), k, l) - e(p(j, i), k, l)));
          report.transpose = std::max(
              report.transpose, std::abs(e(pt(i, j), k, l) - e(p(k, l), i, j)));
          report.adjoint = std::max(
              report.adjoint, std::abs(e(pa(i, j), k, l) - e(p(l, k), i, j)));
          report.flip = std::max(
              report.flip, std::abs(e(p(i, j), k, l) - e(p(j, i), l, k)));
        }
      }
    }
  }
  return report;
}

}  // namespace hopfimage
