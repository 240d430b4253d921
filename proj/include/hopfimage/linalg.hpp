#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "hopfimage/errors.hpp"

namespace hopfimage {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Default bound on the dimension of any dense matrix the library materializes.
inline constexpr std::size_t kDefaultCap = 4096;

/// base^exp, saturating at SIZE_MAX instead of wrapping.
inline std::size_t checked_pow(std::size_t base, std::size_t exp) {
  std::size_t result = 1;
  for (std::size_t k = 0; k < exp; ++k) {
    if (base != 0 && result > std::numeric_limits<std::size_t>::max() / base) {
      return std::numeric_limits<std::size_t>::max();
    }
    result *= base;
  }
  return result;
}

inline void require_within_cap(std::size_t dim, std::size_t cap,
                               std::string_view what) {
  if (dim > cap) {
    throw CapExceeded(std::string(what) + " has dimension " +
                      (dim == std::numeric_limits<std::size_t>::max()
                           ? std::string("overflow")
                           : std::to_string(dim)) +
                      ", above the cap " + std::to_string(cap));
  }
}

/// Row-major multi-index helpers; the first digit is the most significant.
inline std::vector<std::size_t> unflatten(std::size_t flat, std::size_t base,
                                          std::size_t length) {
  std::vector<std::size_t> digits(length);
  for (std::size_t k = length; k-- > 0;) {
    digits[k] = flat % base;
    flat /= base;
  }
  return digits;
}

template <typename Range>
std::size_t flatten(const Range& digits, std::size_t base) {
  std::size_t flat = 0;
  for (auto d : digits) flat = flat * base + static_cast<std::size_t>(d);
  return flat;
}

inline std::size_t mod(long long value, std::size_t n) {
  const auto m = static_cast<long long>(n);
  return static_cast<std::size_t>(((value % m) + m) % m);
}

/// Tr(A^k) for k = 0..kmax.
///
/// Only the powers up to ceil(kmax/2) are formed; Tr(A^{s+t}) is read off as
/// sum_ij (A^s)_ij (A^t)_ji. The split of k depends on k alone, so the value
/// for a given k does not depend on kmax.
inline std::vector<Complex> trace_powers(const ComplexMatrix& a, int kmax) {
  std::vector<Complex> traces(static_cast<std::size_t>(std::max(kmax, 0)) + 1);
  traces[0] = Complex(static_cast<double>(a.rows()), 0.0);
  if (kmax < 1) return traces;
  const int half = (kmax + 1) / 2;
  std::vector<ComplexMatrix> powers;
  powers.reserve(static_cast<std::size_t>(half) + 1);
  powers.push_back(ComplexMatrix::Identity(a.rows(), a.cols()));
  powers.push_back(a);
  for (int k = 2; k <= half; ++k) powers.push_back(powers.back() * a);
  for (int k = 1; k <= kmax; ++k) {
    const int s = (k + 1) / 2;
    const int t = k / 2;
    traces[static_cast<std::size_t>(k)] =
        powers[static_cast<std::size_t>(s)]
            .cwiseProduct(powers[static_cast<std::size_t>(t)].transpose())
            .sum();
  }
  return traces;
}

inline double max_abs(const ComplexMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

/// Largest singular value.
inline double operator_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

/// Real part of a quantity that must be real, after checking the imaginary
/// part against `bound`.
inline double checked_real(Complex z, double bound, std::string_view what) {
  if (!(std::abs(z.imag()) < bound)) {
    throw NumericalError(std::string(what) + " has imaginary part " +
                         std::to_string(z.imag()) + " (bound " +
                         std::to_string(bound) + ")");
  }
  return z.real();
}

}  // namespace hopfimage
