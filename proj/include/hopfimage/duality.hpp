#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "hopfimage/hadamard.hpp"
#include "hopfimage/spectra.hpp"

namespace hopfimage {

struct DualityOptions {
  double tolerance = 1e-8;
  std::size_t cap = kDefaultCap;
  LawOptions law{};
};

/// Residual grid of a duality identity, grid[p-1][r-1] for 1 <= p <= p_max,
/// 1 <= r <= r_max.
struct DualityReport {
  std::string matrix;
  std::size_t p_max = 0;
  std::size_t r_max = 0;
  std::vector<std::vector<double>> grid;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double elapsed_ms = 0.0;

  // Set only by the Dita self-duality check.
  bool has_atom_check = false;
  bool atoms_match = true;
  std::vector<std::size_t> mismatched_depths;
};

namespace detail {

inline double elapsed_ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - start)
      .count();
}

/// gamma[p-1][r-1] = c_p^r / N^p for p <= p_max, 1 <= r <= r_max.
inline std::vector<std::vector<double>> gamma_grid(const HadamardMatrix& h,
                                                   std::size_t p_max,
                                                   std::size_t r_max,
                                                   std::size_t cap) {
  std::vector<std::vector<double>> gamma(p_max, std::vector<double>(r_max));
  const double n = static_cast<double>(h.size());
  for (std::size_t r = 1; r <= r_max; ++r) {
    const std::vector<double> c = moments_at_depth(h, r, p_max, cap);
    for (std::size_t p = 1; p <= p_max; ++p) {
      gamma[p - 1][r - 1] = c[p - 1] / std::pow(n, static_cast<double>(p));
    }
  }
  return gamma;
}

inline void finish(DualityReport& report) {
  report.max_residual = 0.0;
  for (const auto& row : report.grid) {
    for (double v : row) report.max_residual = std::max(report.max_residual, v);
  }
  report.pass = report.max_residual < report.tolerance &&
                (!report.has_atom_check || report.atoms_match);
}

inline bool same_atoms(const SpectralMeasure& x, const SpectralMeasure& y) {
  if (x.atoms.size() != y.atoms.size()) return false;
  const double tol = std::max(x.cluster_tol, y.cluster_tol);
  for (std::size_t k = 0; k < x.atoms.size(); ++k) {
    if (std::abs(x.atoms[k].location - y.atoms[k].location) > tol) return false;
    if (std::abs(x.atoms[k].weight - y.atoms[k].weight) > 1e-10) return false;
  }
  return true;
}

}  // namespace detail

/// Moment/truncation duality: grid entries |gamma_p^r(H) - gamma_r^p(H^t)|.
inline DualityReport duality_residual(const HadamardMatrix& h, std::size_t p_max,
                                      std::size_t r_max,
                                      const DualityOptions& options = {}) {
  if (p_max == 0 || r_max == 0) {
    throw InputError("duality_residual: p_max and r_max must be positive");
  }
  require_within_cap(checked_pow(h.size(), r_max), options.cap, "X(H)");
  require_within_cap(checked_pow(h.size(), p_max), options.cap, "X(H^t)");
  const auto start = std::chrono::steady_clock::now();
  DualityReport report;
  report.matrix = h.provenance();
  report.p_max = p_max;
  report.r_max = r_max;
  report.tolerance = options.tolerance;

  const auto gamma_h = detail::gamma_grid(h, p_max, r_max, options.cap);
  // gamma_r^p(H^t) for r <= r_max, p <= p_max: the transposed grid of H^t.
  const auto gamma_t = detail::gamma_grid(transpose(h), r_max, p_max, options.cap);
  report.grid.assign(p_max, std::vector<double>(r_max));
  for (std::size_t p = 0; p < p_max; ++p) {
    for (std::size_t r = 0; r < r_max; ++r) {
      report.grid[p][r] = std::abs(gamma_h[p][r] - gamma_t[r][p]);
    }
  }
  detail::finish(report);
  report.elapsed_ms = detail::elapsed_ms_since(start);
  return report;
}

struct TopMassProbe {
  double mass_h = 0.0;
  double mass_ht = 0.0;
  double gap = 0.0;
};

/// Finite-depth probe of mu_H(1) = mu_{H^t}(1): the mass at N of the Cesaro
/// average (1/R) sum_{r=1..R} mu^r, for H and for H^t. Diagnostic only.
inline TopMassProbe top_mass_duality(const HadamardMatrix& h, std::size_t r_probe,
                                     const DualityOptions& options = {}) {
  if (r_probe == 0) throw InputError("top_mass_duality: r_probe must be positive");
  const auto cesaro_mass = [&](const HadamardMatrix& m) {
    std::vector<SpectralMeasure> laws;
    for (std::size_t r = 1; r <= r_probe; ++r) {
      LawOptions law = options.law;
      law.cap = options.cap;
      laws.push_back(truncated_law(m, r, law));
    }
    return measure_top_mass(average_measures(laws));
  };
  TopMassProbe probe;
  probe.mass_h = cesaro_mass(h);
  probe.mass_ht = cesaro_mass(transpose(h));
  probe.gap = std::abs(probe.mass_h - probe.mass_ht);
  return probe;
}

/// Dita self-duality for H = F_M (x)_Q F_N: grid entries
/// |c_p^r(H) - c_p^r(H^t)| / (MN)^p, plus an atom-by-atom comparison of
/// mu^r(H) and mu^r(H^t) for every r <= r_max.
inline DualityReport dita_selfduality_residual(const PhaseParameterMatrix& q,
                                               std::size_t p_max,
                                               std::size_t r_max,
                                               const DualityOptions& options = {}) {
  if (p_max == 0 || r_max == 0) {
    throw InputError("dita_selfduality_residual: p_max and r_max must be positive");
  }
  const HadamardMatrix h = dita(q);
  require_within_cap(checked_pow(h.size(), std::max(p_max, r_max)), options.cap,
                     "X(dita)");
  const auto start = std::chrono::steady_clock::now();
  const HadamardMatrix ht = transpose(h);
  DualityReport report;
  report.matrix = h.provenance();
  report.p_max = p_max;
  report.r_max = r_max;
  report.tolerance = options.tolerance;
  report.grid.assign(p_max, std::vector<double>(r_max));
  report.has_atom_check = true;

  LawOptions law = options.law;
  law.cap = options.cap;
  const double tol = law.cluster_tol_per_n * static_cast<double>(h.size());
  for (std::size_t r = 1; r <= r_max; ++r) {
    const GramMatrix xh = gram_matrix(h, r, GramRoute::Profile, options.cap);
    const GramMatrix xt = gram_matrix(ht, r, GramRoute::Profile, options.cap);
    const auto th = trace_powers(xh.x, static_cast<int>(p_max));
    const auto tt = trace_powers(xt.x, static_cast<int>(p_max));
    for (std::size_t p = 1; p <= p_max; ++p) {
      const double np = std::pow(static_cast<double>(h.size()), static_cast<double>(p));
      const double ch = checked_real(th[p] / static_cast<double>(xh.x.rows()), 1e-8 * np, "tr(X^p)");
      const double ct = checked_real(tt[p] / static_cast<double>(xt.x.rows()), 1e-8 * np, "tr(X^p)");
      report.grid[p - 1][r - 1] = std::abs(ch - ct) / np;
    }
    if (!detail::same_atoms(law_of_gram(xh, tol), law_of_gram(xt, tol))) {
      report.atoms_match = false;
      report.mismatched_depths.push_back(r);
    }
  }
  detail::finish(report);
  report.elapsed_ms = detail::elapsed_ms_since(start);
  return report;
}

inline DualityReport dita_selfduality_residual(std::size_t m, std::size_t n,
                                               const PhaseParameterMatrix& q,
                                               std::size_t p_max,
                                               std::size_t r_max,
                                               const DualityOptions& options = {}) {
  if (q.rows() != m || q.cols() != n) {
    throw InputError("dita_selfduality_residual: phase matrix shape mismatch");
  }
  return dita_selfduality_residual(q, p_max, r_max, options);
}

/// For F_N the group is Z_N, so the mass at N of every truncation is 1/N.
struct FourierFiniteCheck {
  std::size_t n = 0;
  std::vector<double> masses;  // r = 1..r_max
  double max_error = 0.0;
  bool pass = false;
};

inline FourierFiniteCheck fourier_finite_check(std::size_t n, std::size_t r_max = 4,
                                               const LawOptions& options = {}) {
  const HadamardMatrix f = fourier(n);
  require_within_cap(checked_pow(n, r_max), options.cap, "X(F_N)");
  FourierFiniteCheck out;
  out.n = n;
  const double expected = 1.0 / static_cast<double>(n);
  for (std::size_t r = 1; r <= r_max; ++r) {
    const double mass = measure_top_mass(truncated_law(f, r, options));
    out.masses.push_back(mass);
    out.max_error = std::max(out.max_error, std::abs(mass - expected));
  }
  out.pass = out.max_error < 1e-10;
  return out;
}

}  // namespace hopfimage
