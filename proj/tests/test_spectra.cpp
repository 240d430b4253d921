#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hopfimage/spectra.hpp"
#include "oracles.hpp"

namespace {

using namespace hopfimage;

HadamardMatrix seeded(std::size_t m, std::size_t n, std::uint64_t seed) {
  return dita(PhaseParameterMatrix::from_seed(m, n, seed));
}

std::vector<HadamardMatrix> small_corpus() {
  return {fourier(2), fourier(3), fourier(4), fourier_group({2, 2}), seeded(2, 2, 1),
          seeded(2, 2, 7), seeded(2, 2, 13)};
}

ComplexMatrix s_matrix(const HadamardMatrix& h) {
  const ProfileTensor q = profile(h);
  const std::size_t n = h.size();
  ComplexMatrix s(n * n, n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        for (std::size_t d = 0; d < n; ++d) s(a * n + b, c * n + d) = std::norm(q(a, b, c, d));
  return s;
}

TEST(Profile, Invariants) {
  for (const HadamardMatrix& h : small_corpus()) {
    const ProfileTensor q = profile(h);
    const std::size_t n = h.size();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        EXPECT_LT(std::abs(q(a, b, a, b) - 1.0), 1e-12);
        for (std::size_t c = 0; c < n; ++c)
          for (std::size_t d = 0; d < n; ++d) {
            EXPECT_LT(std::abs(q(a, b, c, d) - std::conj(q(c, d, a, b))), 1e-12);
            EXPECT_LE(std::abs(q(a, b, c, d)), 1.0 + 1e-12);
          }
      }
  }
}

TEST(Profile, FourierIsGroupDelta) {
  for (std::size_t n = 2; n <= 6; ++n) {
    const ProfileTensor q = profile(fourier(n));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
          for (std::size_t d = 0; d < n; ++d) {
            const double expected = (a + d) % n == (b + c) % n ? 1.0 : 0.0;
            EXPECT_LT(std::abs(q(a, b, c, d) - expected), 1e-12);
          }
  }
}

TEST(Profile, KleinGroupDelta) {
  const ProfileTensor q = profile(fourier_group({2, 2}));
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      for (std::size_t c = 0; c < 4; ++c)
        for (std::size_t d = 0; d < 4; ++d) {
          const double expected = (a ^ d) == (b ^ c) ? 1.0 : 0.0;
          EXPECT_LT(std::abs(q(a, b, c, d) - expected), 1e-12);
        }
}

TEST(Profile, TensorFactorizes) {
  const HadamardMatrix h = seeded(2, 1, 3);
  const HadamardMatrix k = fourier(3);
  const ProfileTensor qh = profile(h), qk = profile(k), ql = profile(tensor(h, k));
  const auto idx = [](std::size_t i, std::size_t a) { return i * 3 + a; };
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t kk = 0; kk < 2; ++kk)
        for (std::size_t l = 0; l < 2; ++l)
          for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b)
              for (std::size_t c = 0; c < 3; ++c)
                for (std::size_t d = 0; d < 3; ++d)
                  EXPECT_LT(std::abs(ql(idx(i, a), idx(j, b), idx(kk, c), idx(l, d)) -
                                     qh(i, j, kk, l) * qk(a, b, c, d)),
                            1e-12);
}

TEST(GramVectors, UnitNorm) {
  const ComplexMatrix xi = gram_vectors(seeded(2, 2, 7), 3);
  for (Eigen::Index k = 0; k < xi.cols(); ++k) EXPECT_NEAR(xi.col(k).norm(), 1.0, 1e-12);
}

TEST(GramMatrix, RoutesAgree) {
  for (const HadamardMatrix& h : small_corpus()) {
    for (std::size_t r = 1; r <= 4 && std::pow(h.size(), r) <= 256; ++r) {
      const GramMatrix a = gram_matrix(h, r, GramRoute::Profile);
      const GramMatrix b = gram_matrix(h, r, GramRoute::Vectors);
      EXPECT_LT((a.x - b.x).cwiseAbs().maxCoeff(), 1e-10) << h.provenance() << " r=" << r;
    }
  }
}

TEST(GramMatrix, Invariants) {
  for (const HadamardMatrix& h : small_corpus()) {
    const GramMatrix g = gram_matrix(h, 3);
    const double n = static_cast<double>(h.size());
    EXPECT_LT((g.x - g.x.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((g.x.diagonal().array() - 1.0).abs().maxCoeff(), 1e-12);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(g.x).eigenvalues();
    EXPECT_GE(ev.minCoeff(), -1e-8 * n);
    EXPECT_LE(ev.maxCoeff(), n + 1e-8 * n);
  }
}

TEST(GramMatrix, DepthTwoIsSquaredProfile) {
  for (const HadamardMatrix& h : small_corpus()) {
    const GramMatrix g = gram_matrix(h, 2);
    EXPECT_LT((g.x - s_matrix(h)).cwiseAbs().maxCoeff(), 1e-12) << h.provenance();
  }
}

TEST(GramMatrix, FourierDifferencePattern) {
  for (std::size_t n = 2; n <= 4; ++n) {
    for (std::size_t r = 1; r <= 3; ++r) {
      const GramMatrix g = gram_matrix(fourier(n), r);
      const std::size_t dim = static_cast<std::size_t>(g.x.rows());
      for (std::size_t row = 0; row < dim; ++row)
        for (std::size_t col = 0; col < dim; ++col) {
          const auto a = unflatten(row, n, r), b = unflatten(col, n, r);
          bool same = true;
          for (std::size_t s = 1; s < r; ++s) same &= (a[s] + n - b[s]) % n == (a[0] + n - b[0]) % n;
          EXPECT_LT(std::abs(g.x(row, col) - (same ? 1.0 : 0.0)), 1e-12);
        }
      const double nn = static_cast<double>(n);
      EXPECT_LE((g.x * g.x - nn * g.x).cwiseAbs().maxCoeff(), 1e-9 * nn * nn);
    }
  }
}

TEST(GramMatrix, CapEnforced) {
  EXPECT_THROW(gram_matrix(fourier(6), 5), CapExceeded);
  EXPECT_THROW(gram_matrix(fourier(3), 3, GramRoute::Profile, 26), CapExceeded);
  EXPECT_THROW(gram_matrix(fourier(3), 0), InputError);
}

TEST(TruncatedLaw, DepthZeroAndOne) {
  for (const HadamardMatrix& h : small_corpus()) {
    const double n = static_cast<double>(h.size());
    const SpectralMeasure m0 = truncated_law(h, 0);
    ASSERT_EQ(m0.atoms.size(), 1u);
    EXPECT_EQ(m0.atoms[0].location, n);
    EXPECT_EQ(m0.atoms[0].weight, 1.0);
    EXPECT_EQ(measure_top_mass(m0), 1.0);

    const SpectralMeasure m1 = truncated_law(h, 1);
    ASSERT_EQ(m1.atoms.size(), 2u) << h.provenance();
    EXPECT_NEAR(m1.atoms[0].location, 0.0, 1e-10);
    EXPECT_NEAR(m1.atoms[0].weight, 1.0 - 1.0 / n, 1e-12);
    EXPECT_NEAR(m1.atoms[1].location, n, 1e-10);
    EXPECT_NEAR(measure_top_mass(m1), 1.0 / n, 1e-12);
  }
}

TEST(TruncatedLaw, FourierConstantInDepth) {
  for (std::size_t n = 2; n <= 5; ++n) {
    for (std::size_t r = 1; r <= 3; ++r) {
      const SpectralMeasure m = truncated_law(fourier(n), r);
      ASSERT_EQ(m.atoms.size(), 2u);
      EXPECT_NEAR(m.atoms[0].location, 0.0, 1e-8);
      EXPECT_NEAR(m.atoms[0].weight, 1.0 - 1.0 / n, 1e-10);
      EXPECT_NEAR(m.atoms[1].location, double(n), 1e-8);
      EXPECT_NEAR(m.atoms[1].weight, 1.0 / n, 1e-10);
    }
  }
}

TEST(TruncatedLaw, DitaDepthTwoAtoms) {
  // eigenvalues of |Q|^2 for dita(2,2;seed=7), from an independent numpy run
  const SpectralMeasure m = truncated_law(seeded(2, 2, 7), 2);
  ASSERT_EQ(m.atoms.size(), 4u);
  const double loc[] = {0.0, 0.4623602576, 3.5376397424, 4.0};
  const double w[] = {11.0 / 16, 1.0 / 16, 1.0 / 16, 3.0 / 16};
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(m.atoms[k].location, loc[k], 1e-9);
    EXPECT_NEAR(m.atoms[k].weight, w[k], 1e-12);
  }
}

TEST(TruncatedLaw, InvariantsAndMomentConsistency) {
  for (const HadamardMatrix& h : small_corpus()) {
    const double n = static_cast<double>(h.size());
    for (std::size_t r = 1; r <= 3; ++r) {
      const SpectralMeasure m = truncated_law(h, r);
      double total = 0.0;
      for (std::size_t k = 0; k < m.atoms.size(); ++k) {
        total += m.atoms[k].weight;
        EXPECT_GT(m.atoms[k].weight, 0.0);
        if (k > 0) {
          EXPECT_GT(m.atoms[k].location - m.atoms[k - 1].location, m.cluster_tol);
        }
      }
      EXPECT_NEAR(total, 1.0, 1e-10);
      for (std::size_t p = 1; p <= 4; ++p) {
        EXPECT_NEAR(m.moment(p), moments_via_X(h, p, r), 1e-7 * std::pow(n, p));
      }
    }
  }
}

TEST(Moments, BruteForceOracle) {
  // raw ratio sum, independent of grids, profiles and Gram matrices
  for (const HadamardMatrix& h : {seeded(2, 2, 7), seeded(2, 1, 5), fourier(3)}) {
    for (auto [p, r] : {std::pair<std::size_t, std::size_t>{1, 1}, {2, 1}, {1, 2}, {2, 2}, {3, 1}}) {
      const Complex brute = oracles::brute_force_moment(h.matrix(), p, r);
      EXPECT_NEAR(brute.imag(), 0.0, 1e-10);
      EXPECT_NEAR(moments_via_T(h, p, r), brute.real(), 1e-10) << h.provenance() << p << r;
      EXPECT_NEAR(moments_via_X(h, p, r), brute.real(), 1e-10) << h.provenance() << p << r;
    }
  }
}

TEST(Moments, FrozenDitaValues) {
  // c_p^r for dita(2,2;seed=7), r = 1..4, from an independent numpy oracle
  const double expected[3][4] = {
      {1, 1, 1, 1},
      {4, 3.795541997168815, 3.6933129957532227, 3.6119855317984877},
      {16, 14.77325198301289, 14.15987797451933, 13.67191319079093}};
  const HadamardMatrix h = seeded(2, 2, 7);
  for (std::size_t p = 1; p <= 3; ++p)
    for (std::size_t r = 1; r <= 4; ++r) {
      EXPECT_NEAR(moments_via_X(h, p, r), expected[p - 1][r - 1], 1e-10);
      EXPECT_NEAR(moments_via_T(h, p, r), expected[p - 1][r - 1], 1e-10);
    }
  const HadamardMatrix h6 = seeded(2, 3, 7);
  EXPECT_NEAR(moments_via_X(h6, 2, 3), 5.132253701619973, 1e-10);
  EXPECT_NEAR(moments_via_X(h6, 3, 2), 30.79352220971985, 1e-9);
}

TEST(Moments, RoutesAgree) {
  for (const HadamardMatrix& h : small_corpus()) {
    const double n = static_cast<double>(h.size());
    for (std::size_t p = 1; p <= 3; ++p)
      for (std::size_t r = 1; r <= 3; ++r)
        EXPECT_NEAR(moments_via_T(h, p, r), moments_via_X(h, p, r), 1e-8 * std::pow(n, p));
  }
}

TEST(Moments, DepthTwoIsTraceOfS) {
  for (const HadamardMatrix& h : small_corpus()) {
    const ComplexMatrix s = s_matrix(h);
    ComplexMatrix power = s;
    const double n2 = static_cast<double>(s.rows());
    for (std::size_t p = 1; p <= 4; ++p) {
      EXPECT_NEAR(moments_via_X(h, p, 2), power.trace().real() / n2, 1e-9);
      power = power * s;
    }
  }
}

TEST(Moments, TensorMultiplicative) {
  const HadamardMatrix h = seeded(2, 1, 9), k = fourier(3);
  const HadamardMatrix l = tensor(h, k);
  for (std::size_t p = 1; p <= 3; ++p)
    for (std::size_t r = 1; r <= 3; ++r) {
      const double prod = moments_via_X(h, p, r) * moments_via_X(k, p, r);
      EXPECT_NEAR(moments_via_X(l, p, r), prod, 1e-8 * prod);
    }
}

TEST(Moments, TensorAtomsAreProducts) {
  const HadamardMatrix h = seeded(2, 2, 7), k = fourier(2);
  for (std::size_t r = 1; r <= 2; ++r) {
    const SpectralMeasure mh = truncated_law(h, r), mk = truncated_law(k, r);
    const SpectralMeasure ml = truncated_law(tensor(h, k), r);
    for (const Atom& a : ml.atoms) {
      bool found = false;
      for (const Atom& x : mh.atoms)
        for (const Atom& y : mk.atoms) found |= std::abs(a.location - x.location * y.location) <= ml.cluster_tol;
      EXPECT_TRUE(found) << a.location;
    }
  }
}

TEST(MomentTable, ClosedFormRows) {
  for (const HadamardMatrix& h : small_corpus()) {
    const double n = static_cast<double>(h.size());
    const MomentTable t = moment_table(h, 4, 3);
    ASSERT_EQ(t.c.size(), 4u);
    ASSERT_EQ(t.c[0].size(), 4u);
    for (std::size_t p = 1; p <= 4; ++p) {
      EXPECT_NEAR(t.c[p - 1][0], std::pow(n, p), 1e-8 * std::pow(n, p));
      EXPECT_NEAR(t.c[p - 1][1], std::pow(n, p - 1.0), 1e-8 * std::pow(n, p - 1.0));
      for (std::size_t r = 0; r <= 3; ++r) {
        EXPECT_GE(t.c[p - 1][r], -1e-9);
        EXPECT_LE(t.c[p - 1][r], std::pow(n, p) * (1 + 1e-12));
        EXPECT_DOUBLE_EQ(t.gamma[p - 1][r], t.c[p - 1][r] / std::pow(n, p));
      }
    }
    for (std::size_t r = 1; r <= 3; ++r) EXPECT_NEAR(t.gamma[0][r], 1.0 / n, 1e-12);
  }
}

TEST(MomentTable, FourierTwoAllHalf) {
  const MomentTable t = moment_table(fourier(2), 3, 3);
  for (std::size_t p = 1; p <= 3; ++p)
    for (std::size_t r = 1; r <= 3; ++r) EXPECT_NEAR(t.gamma[p - 1][r], 0.5, 1e-14);
}

TEST(MomentTable, RejectsZeroSizes) {
  EXPECT_THROW(moment_table(fourier(2), 0, 3), InputError);
}

TEST(Cesaro, FourierIsConstant) {
  for (std::size_t n = 2; n <= 5; ++n) {
    const CesaroSequence s = cesaro_moments(fourier(n), 3, 5);
    ASSERT_EQ(s.averages.size(), 5u);
    for (double v : s.averages) EXPECT_NEAR(v, std::pow(n, 2.0), 1e-9);
    EXPECT_LT(s.last_increment, 1e-9);
  }
}

TEST(Cesaro, FirstMomentIsOne) {
  for (const HadamardMatrix& h : small_corpus()) {
    const CesaroSequence s = cesaro_moments(h, 1, 6);
    for (double v : s.moments) EXPECT_NEAR(v, 1.0, 1e-12);
  }
}

TEST(Cesaro, DitaAveragesOfFrozenMoments) {
  const CesaroSequence s = cesaro_moments(seeded(2, 2, 7), 2, 4);
  const double c[] = {4, 3.795541997168815, 3.6933129957532227, 3.6119855317984877};
  double running = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    running += c[k];
    EXPECT_NEAR(s.averages[k], running / (k + 1.0), 1e-10);
  }
  EXPECT_NEAR(s.last_increment, std::abs(s.averages[3] - s.averages[2]), 1e-15);
}

TEST(HaarEstimate, FourierIntegers) {
  for (std::size_t n = 2; n <= 5; ++n)
    for (std::size_t p = 1; p <= 3; ++p) {
      const HaarMomentEstimate e = haar_moment_estimate(fourier(n), p, 4, 1e-6);
      EXPECT_TRUE(e.converged);
      EXPECT_EQ(e.rounded, std::llround(std::pow(n, p - 1.0)));
    }
}

TEST(HaarEstimate, KleinSecondMoment) {
  const HaarMomentEstimate e = haar_moment_estimate(fourier_group({2, 2}), 2, 4, 1e-6);
  EXPECT_TRUE(e.converged);
  EXPECT_EQ(e.rounded, 4);
}

TEST(HaarEstimate, DitaFirstMoment) {
  for (std::uint64_t seed : {1ULL, 7ULL, 13ULL}) {
    const HaarMomentEstimate e = haar_moment_estimate(seeded(2, 2, seed), 1, 5, 1e-6);
    EXPECT_TRUE(e.converged);
    EXPECT_EQ(e.rounded, 1);
  }
}

TEST(HaarEstimate, DitaSecondMomentNotYetConverged) {
  const HaarMomentEstimate e = haar_moment_estimate(seeded(2, 2, 7), 2, 4, 1e-6);
  EXPECT_FALSE(e.converged);
}

TEST(AverageMeasures, MergesCloseAtoms) {
  const SpectralMeasure a{4, 1, {{0.0, 0.75}, {4.0, 0.25}}, 4e-6};
  const SpectralMeasure b{4, 2, {{0.0, 0.5}, {2.0, 0.25}, {4.0, 0.25}}, 4e-6};
  const std::vector<SpectralMeasure> both{a, b};
  const SpectralMeasure avg = average_measures(both);
  ASSERT_EQ(avg.atoms.size(), 3u);
  EXPECT_DOUBLE_EQ(avg.atoms[0].weight, 0.625);
  EXPECT_DOUBLE_EQ(avg.atoms[1].weight, 0.125);
  EXPECT_DOUBLE_EQ(measure_top_mass(avg), 0.25);
}

TEST(SelfTest, Passes) { EXPECT_NO_THROW(self_test()); }

}  // namespace
