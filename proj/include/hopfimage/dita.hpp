#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hopfimage/errors.hpp"
#include "hopfimage/hadamard.hpp"
#include "hopfimage/linalg.hpp"
#include "hopfimage/spectra.hpp"

// Structured evaluation for Dita matrices H = F_M (x)_Q F_N, with
// H_{(i,a),(j,b)} = Q_ib (F_M)_ij (F_N)_ab and index (i,a) -> i*N + a.
//
// With w = exp(2 pi i / M) and
//   R^x_{ab,cd} = (1/M) sum_m w^{mx} Q_ma Q_md / (Q_mc Q_mb),
// the profile is Q_{iajb,kcld} = delta_{a-b,c-d} R^{i+l-k-j}_{ab,cd} and
//   X_{(i,a),(j,b)} = delta_{a_1-b_1 = ... = a_r-b_r}
//                     prod_s R^{x_s}_{a_s b_s, a_{s+1} b_{s+1}},
//   x_s = (i_s - i_{s+1}) - (j_s - j_{s+1})   (cyclic in s).

namespace hopfimage {

/// Slice R^x of the kernel, indexed (a, b, c, d) in Z_N^4.
struct KernelSlice {
  std::size_t n = 0;
  std::vector<Complex> values;

  Complex operator()(std::size_t a, std::size_t b, std::size_t c,
                     std::size_t d) const {
    return values[((a * n + b) * n + c) * n + d];
  }
};

/// All slices R^x, x in Z_M.
class DitaKernel {
 public:
  explicit DitaKernel(PhaseParameterMatrix q) : q_(std::move(q)) {
    const std::size_t m = q_.rows();
    const std::size_t n = q_.cols();
    const std::size_t n4 = n * n * n * n;
    values_.assign(m * n4, Complex(0.0, 0.0));
    std::vector<Complex> ratio(m);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t c = 0; c < n; ++c) {
          for (std::size_t d = 0; d < n; ++d) {
            for (std::size_t mm = 0; mm < m; ++mm) {
              ratio[mm] = q_.phase(mm, a) * q_.phase(mm, d) /
                          (q_.phase(mm, c) * q_.phase(mm, b));
            }
            for (std::size_t x = 0; x < m; ++x) {
              Complex sum(0.0, 0.0);
              for (std::size_t mm = 0; mm < m; ++mm) {
                sum += root(mm * x) * ratio[mm];
              }
              values_[x * n4 + ((a * n + b) * n + c) * n + d] =
                  sum / static_cast<double>(m);
            }
          }
        }
      }
    }
  }

  std::size_t m() const noexcept { return q_.rows(); }
  std::size_t n() const noexcept { return q_.cols(); }
  const PhaseParameterMatrix& phases() const noexcept { return q_; }

  /// R^x_{ab,cd}; x is taken mod M.
  Complex operator()(long long x, std::size_t a, std::size_t b, std::size_t c,
                     std::size_t d) const {
    const std::size_t n = q_.cols();
    return values_[mod(x, m()) * n * n * n * n + ((a * n + b) * n + c) * n + d];
  }

  /// w^k with w = exp(2 pi i / M).
  Complex root(std::size_t k) const {
    const std::size_t m = q_.rows();
    return std::polar(1.0, kTwoPi * static_cast<double>(k % m) / static_cast<double>(m));
  }

 private:
  PhaseParameterMatrix q_;
  std::vector<Complex> values_;
};

inline KernelSlice r_kernel(const PhaseParameterMatrix& q, long long x) {
  const DitaKernel kernel(q);
  const std::size_t n = q.cols();
  KernelSlice slice{n, std::vector<Complex>(n * n * n * n)};
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d)
          slice.values[((a * n + b) * n + c) * n + d] = kernel(x, a, b, c, d);
  return slice;
}

/// Q_{iajb,kcld} = delta_{a-b,c-d} R^{i+l-k-j}_{ab,cd}.
inline Complex structured_profile_entry(const DitaKernel& kernel, std::size_t i,
                                        std::size_t a, std::size_t j, std::size_t b,
                                        std::size_t k, std::size_t c, std::size_t l,
                                        std::size_t d) {
  const std::size_t n = kernel.n();
  const auto s = [](std::size_t v) { return static_cast<long long>(v); };
  if (mod(s(a) - s(b), n) != mod(s(c) - s(d), n)) return {0.0, 0.0};
  return kernel(s(i) + s(l) - s(k) - s(j), a, b, c, d);
}

inline Complex structured_profile_entry(const PhaseParameterMatrix& q, std::size_t i,
                                        std::size_t a, std::size_t j, std::size_t b,
                                        std::size_t k, std::size_t c, std::size_t l,
                                        std::size_t d) {
  return structured_profile_entry(DitaKernel(q), i, a, j, b, k, c, l, d);
}

namespace detail {

inline Complex gram_product(const DitaKernel& kernel, std::span<const std::size_t> i,
                            std::span<const std::size_t> a,
                            std::span<const std::size_t> j,
                            std::span<const std::size_t> b) {
  const std::size_t r = i.size();
  const auto s = [](std::size_t v) { return static_cast<long long>(v); };
  Complex v(1.0, 0.0);
  for (std::size_t t = 0; t < r; ++t) {
    const std::size_t u = (t + 1) % r;
    const long long x = (s(i[t]) - s(i[u])) - (s(j[t]) - s(j[u]));
    v *= kernel(x, a[t], b[t], a[u], b[u]);
  }
  return v;
}

}  // namespace detail

/// One entry of X at depth r = i.size(). Returns 0 without touching the
/// kernel when a - b is not constant mod N.
inline Complex structured_gram_entry(const DitaKernel& kernel,
                                     std::span<const std::size_t> i,
                                     std::span<const std::size_t> a,
                                     std::span<const std::size_t> j,
                                     std::span<const std::size_t> b) {
  const std::size_t r = i.size();
  if (r == 0 || a.size() != r || j.size() != r || b.size() != r) {
    throw InputError("structured_gram_entry: index vectors must share a positive length");
  }
  const std::size_t n = kernel.n();
  const auto s = [](std::size_t v) { return static_cast<long long>(v); };
  const std::size_t shift = mod(s(a[0]) - s(b[0]), n);
  for (std::size_t t = 1; t < r; ++t) {
    if (mod(s(a[t]) - s(b[t]), n) != shift) return {0.0, 0.0};
  }
  return detail::gram_product(kernel, i, a, j, b);
}

/// X materialized from its nonzero pattern only. `evaluated_entries` counts
/// the entries passing the delta constraint, M^{2r} N^{r+1}.
struct StructuredGram {
  ComplexMatrix x;
  std::size_t evaluated_entries = 0;
};

inline StructuredGram structured_gram_matrix(const DitaKernel& kernel, std::size_t r,
                                             std::size_t cap = kDefaultCap) {
  if (r == 0) throw InputError("structured_gram_matrix: r must be positive");
  const std::size_t m = kernel.m();
  const std::size_t n = kernel.n();
  const std::size_t dim = checked_pow(m * n, r);
  require_within_cap(dim, cap, "structured X at depth " + std::to_string(r));
  const std::size_t mr = checked_pow(m, r);
  const std::size_t nr = checked_pow(n, r);
  const auto d = static_cast<Eigen::Index>(dim);
  StructuredGram out{ComplexMatrix::Zero(d, d), 0};

  std::vector<std::vector<std::size_t>> idx_m(mr), idx_n(nr);
  for (std::size_t k = 0; k < mr; ++k) idx_m[k] = unflatten(k, m, r);
  for (std::size_t k = 0; k < nr; ++k) idx_n[k] = unflatten(k, n, r);
  // composite index of ((i_1,a_1),...,(i_r,a_r))
  const auto compose = [&](const std::vector<std::size_t>& i,
                           const std::vector<std::size_t>& a) {
    std::size_t flat = 0;
    for (std::size_t t = 0; t < r; ++t) flat = flat * (m * n) + i[t] * n + a[t];
    return flat;
  };
  std::vector<std::size_t> b(r);
  for (std::size_t ka = 0; ka < nr; ++ka) {
    const auto& a = idx_n[ka];
    for (std::size_t shift = 0; shift < n; ++shift) {
      for (std::size_t t = 0; t < r; ++t) b[t] = (a[t] + n - shift) % n;
      for (std::size_t ki = 0; ki < mr; ++ki) {
        const auto& i = idx_m[ki];
        const std::size_t row = compose(i, a);
        for (std::size_t kj = 0; kj < mr; ++kj) {
          const auto& j = idx_m[kj];
          out.x(static_cast<Eigen::Index>(row),
                static_cast<Eigen::Index>(compose(j, b))) =
              detail::gram_product(kernel, i, a, j, b);
          ++out.evaluated_entries;
        }
      }
    }
  }
  return out;
}

/// c_p^r of H = F_M (x)_Q F_N without forming X.
///
/// x_s depends on i only through its cyclic differences, so X is constant
/// along the M-element orbits i -> i + (c,...,c) and Tr(X^p) = M^p Tr(Y^p)
/// with Y indexed by (differences of i, a). The delta constraint keeps the
/// differences of a fixed, so Y splits into N^{r-1} blocks B_u of size
/// M^{r-1} N, indexed by (i differences, a_1):
///   c_p^r = M^p sum_u Tr(B_u^p) / (MN)^r.
struct StructuredMoment {
  double value = 0.0;
  std::size_t evaluated_entries = 0;  // N^{r-1} (M^{r-1} N)^2
};

inline StructuredMoment structured_moment_with_count(const DitaKernel& kernel,
                                                     std::size_t p, std::size_t r,
                                                     std::size_t cap = kDefaultCap) {
  if (p == 0) throw InputError("structured_moments: p must be positive");
  const std::size_t m = kernel.m();
  const std::size_t n = kernel.n();
  const double mn = static_cast<double>(m * n);
  const double bound = 1e-8 * std::pow(mn, static_cast<double>(p));
  if (r == 0) return {std::pow(mn, static_cast<double>(p)), 0};

  const std::size_t diffs_m = checked_pow(m, r - 1);
  const std::size_t diffs_n = checked_pow(n, r - 1);
  const std::size_t block = diffs_m * n;
  require_within_cap(block, cap, "structured block at depth " + std::to_string(r));

  // i with i_1 = 0 and i_{t+1} = i_t - D_t, for every D in Z_M^{r-1}
  std::vector<std::vector<std::size_t>> reps(diffs_m);
  for (std::size_t k = 0; k < diffs_m; ++k) {
    const auto diff = unflatten(k, m, r - 1);
    reps[k].assign(r, 0);
    for (std::size_t t = 1; t < r; ++t) reps[k][t] = (reps[k][t - 1] + m - diff[t - 1]) % m;
  }

  StructuredMoment out;
  const auto dim = static_cast<Eigen::Index>(block);
  ComplexMatrix b_u(dim, dim);
  std::vector<std::size_t> a(r), b(r);
  Complex total(0.0, 0.0);
  for (std::size_t ku = 0; ku < diffs_n; ++ku) {
    const auto u = unflatten(ku, n, r - 1);
    for (std::size_t t1 = 0; t1 < n; ++t1) {
      a[0] = t1;
      for (std::size_t t = 1; t < r; ++t) a[t] = (t1 + u[t - 1]) % n;
      for (std::size_t t2 = 0; t2 < n; ++t2) {
        b[0] = t2;
        for (std::size_t t = 1; t < r; ++t) b[t] = (t2 + u[t - 1]) % n;
        for (std::size_t di = 0; di < diffs_m; ++di) {
          for (std::size_t dj = 0; dj < diffs_m; ++dj) {
            b_u(static_cast<Eigen::Index>(di * n + t1),
                static_cast<Eigen::Index>(dj * n + t2)) =
                detail::gram_product(kernel, reps[di], a, reps[dj], b);
          }
        }
      }
    }
    out.evaluated_entries += block * block;
    total += trace_powers(b_u, static_cast<int>(p))[p];
  }
  const Complex c = total * std::pow(static_cast<double>(m), static_cast<double>(p)) /
                    std::pow(mn, static_cast<double>(r));
  out.value = checked_real(c, bound, "structured c_p^r");
  return out;
}

inline double structured_moments(const DitaKernel& kernel, std::size_t p,
                                 std::size_t r, std::size_t cap = kDefaultCap) {
  return structured_moment_with_count(kernel, p, r, cap).value;
}

inline double structured_moments(const PhaseParameterMatrix& q, std::size_t p,
                                 std::size_t r, std::size_t cap = kDefaultCap) {
  return structured_moments(DitaKernel(q), p, r, cap);
}

struct BenchReport {
  std::size_t m = 0, n = 0, p = 0, r = 0, repetitions = 0;
  double dense_ms = 0.0;       // best of the repetitions
  double structured_ms = 0.0;  // best of the repetitions
  double speedup = 0.0;        // dense_ms / structured_ms
  bool verified = false;
  double dense_value = 0.0;
  double structured_value = 0.0;
  std::size_t dense_entries = 0;       // (MN)^{2r}
  std::size_t structured_entries = 0;  // N^{r-1} (M^{r-1} N)^2
};

/// Times the dense X route against the structured route for c_p^r. The two
/// values are compared (1e-9 relative) before any timing is done.
inline BenchReport bench_structured_vs_dense(const PhaseParameterMatrix& q,
                                             std::size_t p, std::size_t r,
                                             std::size_t repetitions,
                                             std::size_t cap = kDefaultCap) {
  if (repetitions == 0) throw InputError("bench: repetitions must be positive");
  BenchReport report;
  report.m = q.rows();
  report.n = q.cols();
  report.p = p;
  report.r = r;
  report.repetitions = repetitions;
  const HadamardMatrix h = dita(q);
  const DitaKernel kernel(q);

  report.dense_value = moments_via_X(h, p, r, cap);
  const StructuredMoment sm = structured_moment_with_count(kernel, p, r, cap);
  report.structured_value = sm.value;
  report.structured_entries = sm.evaluated_entries;
  const std::size_t dim = checked_pow(h.size(), r);
  report.dense_entries = dim * dim;
  const double scale = std::max(1.0, std::abs(report.dense_value));
  report.verified = std::abs(report.dense_value - report.structured_value) <= 1e-9 * scale;
  if (!report.verified) return report;

  using clock = std::chrono::steady_clock;
  const auto time_best = [&](auto&& fn) {
    double best = std::numeric_limits<double>::infinity();
    volatile double sink = 0.0;
    for (std::size_t k = 0; k < repetitions; ++k) {
      const auto start = clock::now();
      sink = sink + fn();
      best = std::min(best, std::chrono::duration<double, std::milli>(clock::now() - start).count());
    }
    return best;
  };
  report.dense_ms = time_best([&] { return moments_via_X(dita(q), p, r, cap); });
  report.structured_ms =
      time_best([&] { return structured_moments(DitaKernel(q), p, r, cap); });
  report.speedup = report.structured_ms > 0.0 ? report.dense_ms / report.structured_ms
                                              : std::numeric_limits<double>::infinity();
  return report;
}

}  // namespace hopfimage
