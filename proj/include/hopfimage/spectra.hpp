#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hopfimage/errors.hpp"
#include "hopfimage/hadamard.hpp"
#include "hopfimage/linalg.hpp"
#include "hopfimage/magic.hpp"

namespace hopfimage {

/// Profile Q_{ab,cd} = (1/N) sum_i H_ia H_id / (H_ib H_ic).
class ProfileTensor {
 public:
  ProfileTensor(std::size_t n, std::vector<Complex> values)
      : n_(n), values_(std::move(values)) {}

  std::size_t size() const noexcept { return n_; }

  Complex operator()(std::size_t a, std::size_t b, std::size_t c,
                     std::size_t d) const {
    return values_[((a * n_ + b) * n_ + c) * n_ + d];
  }

  const std::vector<Complex>& values() const noexcept { return values_; }

 private:
  std::size_t n_;
  std::vector<Complex> values_;
};

inline ProfileTensor profile(const HadamardMatrix& h) {
  const std::size_t n = h.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<Complex> values(n * n * n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t d = 0; d < n; ++d) {
          Complex sum(0.0, 0.0);
          for (std::size_t i = 0; i < n; ++i) {
            sum += h(i, a) * h(i, d) / (h(i, b) * h(i, c));
          }
          values[((a * n + b) * n + c) * n + d] = sum * inv_n;
        }
      }
    }
  }
  return ProfileTensor(n, std::move(values));
}

enum class GramRoute { Profile, Vectors };

/// N^r x N^r Gram matrix whose normalized-trace spectral law is the
/// truncated measure at depth r.
struct GramMatrix {
  std::size_t n = 0;
  std::size_t r = 0;
  ComplexMatrix x;
};

/// Columns are the unit vectors
///   xi_{a_1..a_r} = (1/sqrt N)(H_{a_1}/H_{a_2}) (x) ... (x) (1/sqrt N)(H_{a_r}/H_{a_1})
/// where H_a is column a of H.
inline ComplexMatrix gram_vectors(const HadamardMatrix& h, std::size_t r,
                                  std::size_t cap = kDefaultCap) {
  if (r == 0) throw InputError("gram_vectors: r must be positive");
  const std::size_t n = h.size();
  const std::size_t dim = checked_pow(n, r);
  require_within_cap(dim, cap, "Gram vectors at depth " + std::to_string(r));
  const double scale = std::pow(static_cast<double>(n), -0.5 * static_cast<double>(r));
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix xi(d, d);
  std::vector<std::vector<std::size_t>> digits(dim);
  for (std::size_t k = 0; k < dim; ++k) digits[k] = unflatten(k, n, r);
  for (std::size_t col = 0; col < dim; ++col) {
    const auto& a = digits[col];
    for (std::size_t row = 0; row < dim; ++row) {
      const auto& k = digits[row];
      Complex v(scale, 0.0);
      for (std::size_t s = 0; s < r; ++s) {
        v *= h(k[s], a[s]) / h(k[s], a[(s + 1) % r]);
      }
      xi(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = v;
    }
  }
  return xi;
}

/// X_{a_1..a_r, b_1..b_r} = Q_{a_1 b_1, a_2 b_2} ... Q_{a_r b_r, a_1 b_1}
/// (profile route) or <xi_a, xi_b> (vector route).
inline GramMatrix gram_matrix(const HadamardMatrix& h, std::size_t r,
                              GramRoute route = GramRoute::Profile,
                              std::size_t cap = kDefaultCap) {
  if (r == 0) throw InputError("gram_matrix: r must be positive");
  const std::size_t n = h.size();
  const std::size_t dim = checked_pow(n, r);
  require_within_cap(dim, cap, "X at depth " + std::to_string(r));
  GramMatrix out{n, r, {}};
  if (route == GramRoute::Vectors) {
    const ComplexMatrix xi = gram_vectors(h, r, cap);
    // (Xi^* Xi)_ab = <xi_b, xi_a>, so X is its transpose.
    out.x = (xi.adjoint() * xi).transpose();
    return out;
  }
  const ProfileTensor q = profile(h);
  const auto d = static_cast<Eigen::Index>(dim);
  out.x.resize(d, d);
  std::vector<std::vector<std::size_t>> digits(dim);
  for (std::size_t k = 0; k < dim; ++k) digits[k] = unflatten(k, n, r);
  for (std::size_t row = 0; row < dim; ++row) {
    const auto& a = digits[row];
    for (std::size_t col = 0; col < dim; ++col) {
      const auto& b = digits[col];
      Complex v(1.0, 0.0);
      for (std::size_t s = 0; s < r; ++s) {
        const std::size_t t = (s + 1) % r;
        v *= q(a[s], b[s], a[t], b[t]);
      }
      out.x(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = v;
    }
  }
  return out;
}

struct Atom {
  double location = 0.0;
  double weight = 0.0;
};

/// Atomic probability measure on [0, N].
struct SpectralMeasure {
  std::size_t n = 0;
  std::size_t r = 0;
  std::vector<Atom> atoms;  // strictly increasing locations
  double cluster_tol = 0.0;

  double moment(std::size_t p) const {
    double m = 0.0;
    for (const Atom& atom : atoms) {
      m += atom.weight * std::pow(atom.location, static_cast<double>(p));
    }
    return m;
  }
};

struct LawOptions {
  /// Eigenvalues closer than this times N merge into one atom.
  double cluster_tol_per_n = 1e-6;
  std::size_t cap = kDefaultCap;
};

/// Groups sorted values whose consecutive gaps are at most `tol`; each group
/// becomes an atom at its mean carrying weight (group size) * unit_weight.
inline std::vector<Atom> cluster_atoms(std::span<const double> sorted, double tol,
                                       double unit_weight, double lo, double hi) {
  std::vector<Atom> atoms;
  std::size_t start = 0;
  while (start < sorted.size()) {
    std::size_t end = start + 1;
    while (end < sorted.size() && sorted[end] - sorted[end - 1] <= tol) ++end;
    double sum = 0.0;
    for (std::size_t k = start; k < end; ++k) sum += sorted[k];
    const double mean = sum / static_cast<double>(end - start);
    atoms.push_back({std::clamp(mean, lo, hi),
                     static_cast<double>(end - start) * unit_weight});
    start = end;
  }
  return atoms;
}

/// Spectral law of a Hermitian PSD Gram matrix of size N^r with respect to
/// the normalized trace. Enforces the eigensolver residual contract and the
/// spectral bounds [0, N].
inline SpectralMeasure law_of_gram(const GramMatrix& g, double cluster_tol) {
  const auto dim = g.x.rows();
  const double n = static_cast<double>(g.n);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(g.x);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigensolver did not converge");
  }
  const Eigen::VectorXd& values = solver.eigenvalues();
  const ComplexMatrix& vectors = solver.eigenvectors();

  const ComplexMatrix residual = g.x * vectors - vectors * values.asDiagonal();
  for (Eigen::Index k = 0; k < dim; ++k) {
    const double res = residual.col(k).norm();
    const double bound = 1e-9 * n * vectors.col(k).norm();
    if (!(res <= bound)) {
      throw NumericalError("eigenpair " + std::to_string(k) + " has residual " +
                           std::to_string(res) + " above " + std::to_string(bound));
    }
  }
  if (values(0) < -1e-8 * n || values(dim - 1) > n + 1e-8 * n) {
    throw NumericalError("Gram spectrum leaves [0, N]: [" +
                         std::to_string(values(0)) + ", " +
                         std::to_string(values(dim - 1)) + "]");
  }
  std::vector<double> sorted(values.data(), values.data() + dim);
  std::sort(sorted.begin(), sorted.end());
  SpectralMeasure measure;
  measure.n = g.n;
  measure.r = g.r;
  measure.cluster_tol = cluster_tol;
  measure.atoms = cluster_atoms(sorted, cluster_tol,
                                1.0 / static_cast<double>(dim), 0.0, n);
  return measure;
}

/// Truncated measure mu^r: delta_N at r = 0, otherwise the law of X.
inline SpectralMeasure truncated_law(const HadamardMatrix& h, std::size_t r,
                                     const LawOptions& options = {}) {
  const double n = static_cast<double>(h.size());
  const double tol = options.cluster_tol_per_n * n;
  if (r == 0) {
    return SpectralMeasure{h.size(), 0, {{n, 1.0}}, tol};
  }
  return law_of_gram(gram_matrix(h, r, GramRoute::Profile, options.cap), tol);
}

/// c_p^r = Tr(T_p^r), with T_p built from the magic grid.
inline double moments_via_T(const HadamardMatrix& h, std::size_t p,
                            std::size_t r, std::size_t cap = kDefaultCap) {
  if (p == 0) throw InputError("moments_via_T: p must be positive");
  const double bound = 1e-8 * std::pow(static_cast<double>(h.size()), static_cast<double>(p));
  if (r == 0) {
    require_within_cap(checked_pow(h.size(), p), cap, "T_" + std::to_string(p));
    return std::pow(static_cast<double>(h.size()), static_cast<double>(p));
  }
  const TruncationTensor tp = truncation_tensor(magic_grid(h), p, cap);
  const auto traces = trace_powers(tp.t, static_cast<int>(r));
  return checked_real(traces[r], bound, "Tr(T_p^r)");
}

/// c_p^r = (1/N^r) Tr(X_r^p).
inline double moments_via_X(const HadamardMatrix& h, std::size_t p,
                            std::size_t r, std::size_t cap = kDefaultCap) {
  if (p == 0) throw InputError("moments_via_X: p must be positive");
  const double np = std::pow(static_cast<double>(h.size()), static_cast<double>(p));
  if (r == 0) return np;
  const GramMatrix g = gram_matrix(h, r, GramRoute::Profile, cap);
  const auto traces = trace_powers(g.x, static_cast<int>(p));
  const Complex c = traces[p] / static_cast<double>(g.x.rows());
  return checked_real(c, 1e-8 * np, "tr(X^p)");
}

/// c_p^r for p = 1..p_max (at index p - 1) and a fixed depth r >= 1, from one
/// Gram matrix.
inline std::vector<double> moments_at_depth(const HadamardMatrix& h,
                                            std::size_t r, std::size_t p_max,
                                            std::size_t cap = kDefaultCap) {
  const GramMatrix g = gram_matrix(h, r, GramRoute::Profile, cap);
  const auto traces = trace_powers(g.x, static_cast<int>(p_max));
  std::vector<double> c(p_max);
  for (std::size_t p = 1; p <= p_max; ++p) {
    const double np = std::pow(static_cast<double>(h.size()), static_cast<double>(p));
    c[p - 1] = checked_real(traces[p] / static_cast<double>(g.x.rows()),
                            1e-8 * np, "tr(X^p)");
  }
  return c;
}

/// c[p-1][r] = c_p^r and gamma[p-1][r] = c_p^r / N^p for
/// 1 <= p <= p_max, 0 <= r <= r_max.
struct MomentTable {
  std::size_t n = 0;
  std::size_t p_max = 0;
  std::size_t r_max = 0;
  std::vector<std::vector<double>> c;
  std::vector<std::vector<double>> gamma;
};

inline MomentTable moment_table(const HadamardMatrix& h, std::size_t p_max,
                                std::size_t r_max, std::size_t cap = kDefaultCap) {
  if (p_max == 0) throw InputError("moment_table: p_max must be positive");
  require_within_cap(checked_pow(h.size(), r_max), cap,
                     "X at depth " + std::to_string(r_max));
  MomentTable table{h.size(), p_max, r_max,
                    std::vector<std::vector<double>>(p_max, std::vector<double>(r_max + 1)),
                    std::vector<std::vector<double>>(p_max, std::vector<double>(r_max + 1))};
  const double n = static_cast<double>(h.size());
  for (std::size_t p = 1; p <= p_max; ++p) {
    table.c[p - 1][0] = std::pow(n, static_cast<double>(p));
  }
  for (std::size_t r = 1; r <= r_max; ++r) {
    const std::vector<double> column = moments_at_depth(h, r, p_max, cap);
    for (std::size_t p = 1; p <= p_max; ++p) table.c[p - 1][r] = column[p - 1];
  }
  for (std::size_t p = 1; p <= p_max; ++p) {
    const double np = std::pow(n, static_cast<double>(p));
    for (std::size_t r = 0; r <= r_max; ++r) {
      table.gamma[p - 1][r] = table.c[p - 1][r] / np;
    }
  }
  return table;
}

/// Cesaro averages s_k = (1/k) sum_{r=1..k} c_p^r. Uses the T_p route,
/// whose size N^p does not grow with the depth.
struct CesaroSequence {
  std::size_t p = 0;
  std::vector<double> moments;   // c_p^r, r = 1..k_max
  std::vector<double> averages;  // s_k, k = 1..k_max
  double last_increment = 0.0;   // |s_kmax - s_{kmax-1}|, 0 when k_max = 1
};

inline CesaroSequence cesaro_moments(const HadamardMatrix& h, std::size_t p,
                                     std::size_t k_max,
                                     std::size_t cap = kDefaultCap) {
  if (p == 0 || k_max == 0) {
    throw InputError("cesaro_moments: p and k_max must be positive");
  }
  const TruncationTensor tp = truncation_tensor(magic_grid(h), p, cap);
  const double bound = 1e-8 * std::pow(static_cast<double>(h.size()), static_cast<double>(p));
  CesaroSequence seq;
  seq.p = p;
  ComplexMatrix power = tp.t;
  double running = 0.0;
  for (std::size_t r = 1; r <= k_max; ++r) {
    if (r > 1) power = power * tp.t;
    const double c = checked_real(power.trace(), bound, "Tr(T_p^r)");
    seq.moments.push_back(c);
    running += c;
    seq.averages.push_back(running / static_cast<double>(r));
  }
  if (k_max > 1) {
    seq.last_increment = std::abs(seq.averages[k_max - 1] - seq.averages[k_max - 2]);
  }
  return seq;
}

/// Estimate of the Haar moment int chi^p, which is a nonnegative integer.
/// `converged` is a heuristic: the last Cesaro increment is below tol and
/// the average sits within tol of an integer.
struct HaarMomentEstimate {
  double estimate = 0.0;
  long long rounded = 0;
  bool converged = false;
  CesaroSequence sequence;
};

inline HaarMomentEstimate haar_moment_estimate(const HadamardMatrix& h,
                                               std::size_t p, std::size_t k_max,
                                               double tol,
                                               std::size_t cap = kDefaultCap) {
  HaarMomentEstimate out;
  out.sequence = cesaro_moments(h, std::max<std::size_t>(p, 1),
                                std::max<std::size_t>(k_max, 2), cap);
  out.estimate = out.sequence.averages.back();
  out.rounded = std::llround(out.estimate);
  out.converged = out.sequence.last_increment < tol &&
                  std::abs(out.estimate - static_cast<double>(out.rounded)) < tol;
  return out;
}

/// Weight of the atom at N, i.e. the mass at 1 of the law of chi/N.
inline double measure_top_mass(const SpectralMeasure& m) {
  const double n = static_cast<double>(m.n);
  for (const Atom& atom : m.atoms) {
    if (std::abs(atom.location - n) <= m.cluster_tol) return atom.weight;
  }
  return 0.0;
}

/// Uniform average of several measures on the same [0, N]; atoms closer
/// than the cluster tolerance merge at their weighted mean.
inline SpectralMeasure average_measures(std::span<const SpectralMeasure> measures) {
  if (measures.empty()) throw InputError("average_measures: nothing to average");
  std::vector<Atom> all;
  for (const auto& m : measures) {
    for (const Atom& a : m.atoms) {
      all.push_back({a.location, a.weight / static_cast<double>(measures.size())});
    }
  }
  std::sort(all.begin(), all.end(),
            [](const Atom& x, const Atom& y) { return x.location < y.location; });
  SpectralMeasure out;
  out.n = measures.front().n;
  out.r = measures.back().r;
  out.cluster_tol = measures.front().cluster_tol;
  std::size_t start = 0;
  while (start < all.size()) {
    std::size_t end = start + 1;
    while (end < all.size() &&
           all[end].location - all[end - 1].location <= out.cluster_tol) {
      ++end;
    }
    double w = 0.0, wx = 0.0;
    for (std::size_t k = start; k < end; ++k) {
      w += all[k].weight;
      wx += all[k].weight * all[k].location;
    }
    out.atoms.push_back({wx / w, w});
    start = end;
  }
  return out;
}

/// Canary for index-convention bugs: X has unit diagonal, so c_1^r = 1 at
/// every depth, by both routes.
inline void self_test() {
  const HadamardMatrix h = dita(PhaseParameterMatrix::from_seed(2, 2, 1));
  for (std::size_t r = 1; r <= 3; ++r) {
    const double via_x = moments_via_X(h, 1, r);
    const double via_t = moments_via_T(h, 1, r);
    if (std::abs(via_x - 1.0) > 1e-12 || std::abs(via_t - 1.0) > 1e-12) {
      throw NumericalError("self-test: c_1^" + std::to_string(r) + " = " +
                           std::to_string(via_x) + " (X), " +
                           std::to_string(via_t) + " (T), expected 1");
    }
  }
}

}  // namespace hopfimage
