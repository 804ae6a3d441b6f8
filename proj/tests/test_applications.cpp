#include "ptrace_lab/applications.hpp"
#include "ptrace_lab/random.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace ptl;

namespace {

RankTwoFactors random_factors(Rng& rng, Index d) {
  return {ginibre(rng, d, d), ginibre(rng, d, d), ginibre(rng, d, d), ginibre(rng, d, d)};
}

double real_inner(const Matrix& a, const Matrix& b) { return (a.adjoint() * b).trace().real(); }

// Independent evaluation straight from the assembled matrix.
double objective_by_assembly(const RankTwoFactors& z, double alpha) {
  const Matrix m = z.assemble();
  return check_two_copy(m, alpha).slack / m.squaredNorm();
}

}  // namespace

TEST(Werner, PositiveUnitTraceFlipInvariant) {
  for (Index d : {2, 3, 4}) {
    const Matrix f = flip_operator(d);
    for (double a : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      const Matrix w = werner_state(d, a);
      EXPECT_GE(eig_hermitian(w).minCoeff(), -1e-12);
      EXPECT_NEAR(w.trace().real(), 1.0, 1e-12);
      EXPECT_LT((f * w * f - w).norm(), 1e-14);
    }
  }
  EXPECT_LT((werner_state(3, 0.0) - identity(9) / 9.0).norm(), 1e-15);
  EXPECT_THROW(werner_state(1, 0.0), DomainError);
  EXPECT_THROW(werner_state(2, 1.5), DomainError);
}

// alpha = -1: uniform on the antisymmetric subspace of dimension d(d-1)/2.
TEST(Werner, AntisymmetricSpectrum) {
  for (Index d : {2, 3}) {
    const RealVector ev = eig_hermitian(werner_state(d, -1.0));
    const double dd = static_cast<double>(d);
    const double nonzero = 1.0 / (dd * (dd - 1.0) / 2.0);
    int zeros = 0;
    int hits = 0;
    for (Index i = 0; i < ev.size(); ++i) {
      if (std::abs(ev(i)) < 1e-13) ++zeros;
      if (std::abs(ev(i) - nonzero) < 1e-13) ++hits;
    }
    EXPECT_EQ(hits, d * (d - 1) / 2);
    EXPECT_EQ(zeros, d * (d + 1) / 2);
  }
}

TEST(TwoCopy, RandomRankTwoSatisfyAtOneThird) {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const Matrix m = random_factors(rng, 4).assemble();
    EXPECT_TRUE(check_two_copy(m, -1.0 / 3.0).verdict);
    EXPECT_TRUE(check_two_copy(m, -0.25).verdict);
  }
  EXPECT_THROW(check_two_copy(identity(4), 0.5), DomainError);
  EXPECT_THROW(check_two_copy(identity(6), -0.5), DimensionError);
}

TEST(TwoCopy, ConstantThreeIsSharp) {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;  // e11 (x) identity(2)
  const auto r = check_two_copy(m, -1.0 / 3.0);
  const double lhs = r.lhs;
  EXPECT_NEAR(lhs, 3.0 * m.squaredNorm(), 1e-12);
}

TEST(TwoCopy, TracelessReducesToNormBound) {
  Rng rng(2);
  RankTwoFactors z = random_factors(rng, 3);
  Matrix m = z.assemble();
  m -= (m.trace() / 9.0) * identity(9);
  const auto r = check_two_copy(m, -0.5);
  EXPECT_NEAR(r.rhs, m.squaredNorm() / 0.5, 1e-10);
}

TEST(TwoCopy, ObjectiveMatchesAssembly) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const RankTwoFactors z = random_factors(rng, 3);
    for (double a : {-1.0 / 3.0, -0.45}) {
      EXPECT_NEAR(TwoCopyObjective{a}.value(z), objective_by_assembly(z, a), 1e-10);
    }
  }
}

TEST(TwoCopy, GradientMatchesFiniteDifferences) {
  Rng rng(4);
  const TwoCopyObjective obj{-0.4};
  for (int t = 0; t < 10; ++t) {
    const RankTwoFactors z = random_factors(rng, 3);
    RankTwoFactors g = z;
    obj.value(z, &g);
    const RankTwoFactors h = random_factors(rng, 3);
    const double eps = 1e-6;
    auto shifted = [&](double s) {
      return RankTwoFactors{z.x1 + s * h.x1, z.x2 + s * h.x2, z.y1 + s * h.y1, z.y2 + s * h.y2};
    };
    const double fd = (obj.value(shifted(eps)) - obj.value(shifted(-eps))) / (2.0 * eps);
    const double an = real_inner(g.x1, h.x1) + real_inner(g.x2, h.x2) + real_inner(g.y1, h.y1) +
                      real_inner(g.y2, h.y2);
    EXPECT_NEAR(fd, an, 1e-6 * (1.0 + std::abs(an)));
  }
}

TEST(Search, FindsNoViolationAtOneThirdAndIsDeterministic) {
  SearchConfig cfg;
  cfg.starts = 30;
  cfg.iterations = 30;
  const auto a = search_two_copy_violation(4, -1.0 / 3.0, cfg);
  EXPECT_FALSE(a.violation);
  EXPECT_GE(a.best.slack, -1e-8);
  EXPECT_LE(rank_tol(a.incumbent), 2);
  cfg.jobs = 3;
  const auto b = search_two_copy_violation(4, -1.0 / 3.0, cfg);
  EXPECT_EQ(a.best_start, b.best_start);
  EXPECT_EQ(a.best.slack, b.best.slack);
  cfg.starts = 0;
  EXPECT_THROW(search_two_copy_violation(4, -0.3, cfg), DomainError);
}

TEST(Witness, ValueMatchesMatrixForm) {
  Rng rng(5);
  for (const WitnessSpec w : {WitnessSpec{2, 2, 1}, WitnessSpec{3, 2, 2}, WitnessSpec{2, 3, 1}}) {
    const Matrix wk = witness_matrix(w);
    EXPECT_LT(hermiticity_residual(wk), 1e-12);
    const Index side = w.side();
    for (int t = 0; t < 5; ++t) {
      const Matrix m = ginibre(rng, side, side);
      // psi = (M (x) 1)|Omega>, i.e. psi_{(a,b)} = M_{a b}
      Vector psi(side * side);
      for (Index a = 0; a < side; ++a)
        for (Index b = 0; b < side; ++b) psi(a * side + b) = m(a, b);
      const double direct = (psi.adjoint() * wk * psi)(0, 0).real();
      EXPECT_NEAR(witness_value(w, m), direct, 1e-10 * (1.0 + std::abs(direct)));
    }
  }
}

TEST(Witness, IdentityConsistency) {
  Rng rng(6);
  const WitnessSpec w{3, 2, 1};
  const Matrix m = ginibre(rng, 9, 9);
  double total = 0.0;
  for (int i = 0; i < 2; ++i) total += marginal(m, w.space(), i).squaredNorm();
  EXPECT_NEAR(witness_value(w, m) + total - w.coefficient() * m.squaredNorm(), 0.0, 1e-10);
}

TEST(Witness, NonnegativeOnRankK) {
  Rng rng(7);
  for (const WitnessSpec w : {WitnessSpec{3, 2, 1}, WitnessSpec{3, 2, 2}, WitnessSpec{2, 3, 1}}) {
    const Index side = w.side();
    for (int t = 0; t < 100; ++t) {
      const Matrix m = ginibre(rng, side, w.k) * ginibre(rng, side, w.k).adjoint();
      EXPECT_GE(witness_value(w, m), -1e-8);
    }
  }
}

TEST(Witness, SharpExample) {
  for (const WitnessSpec w : {WitnessSpec{3, 2, 1}, WitnessSpec{3, 2, 2}, WitnessSpec{2, 3, 1}, WitnessSpec{4, 3, 2}}) {
    const Matrix m = witness_sharp_example(w);
    EXPECT_EQ(rank_tol(m), w.k + 1);
    EXPECT_NEAR(witness_value(w, m), -static_cast<double>((w.n - 1) * (w.k + 1)), 1e-9);
  }
  EXPECT_THROW(WitnessSpec({2, 2, 2}).validate(), DomainError);
  EXPECT_TRUE(WitnessSpec({2, 1, 1}).degenerate());
  EXPECT_THROW(witness_matrix(WitnessSpec{5, 3, 1}), DomainError);
}

TEST(KPositive, IdentityImage) {
  for (const WitnessSpec w : {WitnessSpec{2, 2, 1}, WitnessSpec{3, 2, 2}, WitnessSpec{2, 3, 1}}) {
    const Index side = w.side();
    const Matrix t = kpositive_map_apply(identity(side), w.space(), w.k);
    const double dn = static_cast<double>(side);
    const double expected = w.coefficient() * dn - static_cast<double>(w.n) * static_cast<double>(w.d);
    EXPECT_LT((t - expected * identity(side)).norm(), 1e-12);
  }
}

TEST(KPositive, PreservesHermiticityAndLinearity) {
  Rng rng(8);
  const TensorSpace s{2, 2};
  const Matrix x = exact_hermitian_part(ginibre(rng, 4, 4));
  const Matrix y = ginibre(rng, 4, 4);
  EXPECT_LT(hermiticity_residual(kpositive_map_apply(x, s, 1)), 1e-13);
  const Complex c(0.3, -1.2);
  const Matrix lhs = kpositive_map_apply(x + c * y, s, 1);
  const Matrix rhs = kpositive_map_apply(x, s, 1) + c * kpositive_map_apply(y, s, 1);
  EXPECT_LT((lhs - rhs).norm(), 1e-12);
}

// The Choi matrix of T, with the output factors (A_1..A_n) first and the
// reference factors (B_1..B_n) second, is the witness matrix.
TEST(KPositive, ChoiMatrixIsTheWitness) {
  const WitnessSpec w{2, 2, 1};
  const TensorSpace s = w.space();
  const Matrix choi = choi_matrix([&](const Matrix& x) { return kpositive_map_apply(x, s, w.k); }, s);
  EXPECT_LT((choi - witness_matrix(w)).norm(), 1e-10);
}
