#pragma once

// Checkers for norm inequalities between a matrix and its partial traces.
// Every checker returns an InequalityReport with verdict = (slack >= -tolerance).

#include "ptrace_lab/kappa.hpp"
#include "ptrace_lab/matrix.hpp"
#include "ptrace_lab/norms.hpp"
#include "ptrace_lab/report.hpp"
#include "ptrace_lab/tensor.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace ptl {

/// Norms of all single-factor marginals.
inline std::vector<double> marginal_norms(const Matrix& m, const TensorSpace& space, const NormSpec& spec) {
  std::vector<double> out;
  for (int i = 0; i < space.factors(); ++i) out.push_back(norm(marginal(m, space, i), spec));
  return out;
}

inline double sum_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

/// x^g computed as exp(g log x).
inline double log_pow(double x, double g) {
  if (x <= 0.0) return 0.0;
  return std::exp(g * std::log(x));
}

inline double spec_constant(const NormSpec& spec) { return spec.is_schatten() ? spec.p() : static_cast<double>(spec.k()); }

/// Singular values of the Kronecker sum against those of sum_i |c_i| embedded;
/// lhs/rhs are the partial sums at the index where the slack is smallest.
inline InequalityReport check_kron_majorization(const std::vector<Matrix>& cs, const TensorSpace& space) {
  std::vector<Matrix> abs_cs;
  for (const auto& c : cs) abs_cs.push_back(abs_matrix(c));
  const RealVector lhs_sv = singular_values(kronecker_sum(cs, space));
  const RealVector rhs_sv = singular_values(kronecker_sum(abs_cs, space));
  std::size_t worst = 0;
  const double slack = majorization_slack(to_std(lhs_sv), to_std(rhs_sv), &worst);
  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t j = 0; j <= worst; ++j) {
    lhs += lhs_sv(static_cast<Index>(j));
    rhs += rhs_sv(static_cast<Index>(j));
  }
  auto report = InequalityReport::make("kron_majorization", lhs, rhs, 1e-10,
                                       {{"n", static_cast<double>(space.factors())},
                                        {"index", static_cast<double>(worst + 1)}});
  report.slack = slack;
  report.verdict = slack >= -report.tolerance;
  return report;
}

/// nu = r^{1-1/p} (Schatten) or max(1, r/k) (Ky Fan).
inline double individual_nu(const NormSpec& spec, Index r) {
  const double rr = static_cast<double>(r);
  if (spec.is_schatten()) return r == 0 ? 0.0 : std::pow(rr, spec.one_minus_inv_p());
  return std::max(1.0, rr / static_cast<double>(spec.k()));
}

/// |||M_i||| <= nu |||M||| for each single-factor marginal.
inline std::vector<InequalityReport> check_individual_bound(const Matrix& m, const TensorSpace& space,
                                                            const NormSpec& spec, const Tolerance& tol = {}) {
  space.check(m, "check_individual_bound");
  const Index r = rank_tol(m, tol);
  const double nu = individual_nu(spec, r);
  const double nm = norm(m, spec);
  std::vector<InequalityReport> out;
  for (int i = 0; i < space.factors(); ++i) {
    const double lhs = norm(marginal(m, space, i), spec);
    const double rhs = nu * nm;
    out.push_back(InequalityReport::make("individual_bound", lhs, rhs, inequality_tolerance(rhs),
                                         {{"nu", nu},
                                          {"r", static_cast<double>(r)},
                                          {"factor", static_cast<double>(i)},
                                          {spec.is_schatten() ? "p" : "k", spec_constant(spec)}}));
  }
  return out;
}

/// sum_i |||M_i||| <= c ||M||_1 + kappa |||M|||.
inline InequalityReport check_template(const Matrix& m, const TensorSpace& space, const NormSpec& spec,
                                       double c, double kappa_value) {
  space.check(m, "check_template");
  if (!(c >= 0.0)) throw DomainError("check_template: c must be >= 0");
  if (!(kappa_value >= 0.0)) throw DomainError("check_template: kappa must be >= 0");
  const double lhs = sum_of(marginal_norms(m, space, spec));
  const double rhs = c * trace_norm(m) + kappa_value * norm(m, spec);
  return InequalityReport::make("template", lhs, rhs, inequality_tolerance(rhs),
                                {{"c", c}, {"kappa", kappa_value}, {"n", static_cast<double>(space.factors())}});
}

struct KyFanGeneral {};
struct KyFanTwoFactor {};
struct KyFanLowRank {
  double c = 0.0;
};
using KyFanVariant = std::variant<KyFanGeneral, KyFanTwoFactor, KyFanLowRank>;

/// Ky Fan family on equal local dimensions:
///   general: ||M||_1 + kappa_tilde ||M||_(k)
///   two factors: ||M||_1 + k ||M||_(k)
///   rank <= k: c ||M||_1 + (n - c)_+ ||M||_(k)
inline InequalityReport check_kyfan_family(const Matrix& m, const TensorSpace& space, Index k,
                                           const KyFanVariant& variant, const Tolerance& tol = {}) {
  space.check(m, "check_kyfan_family");
  if (!space.equal_dims()) {
    throw DimensionError("check_kyfan_family: needs equal local dimensions, got " + space.to_string());
  }
  const NormSpec spec = NormSpec::kyfan(k);
  const int n = space.factors();
  const Index d = space.dim(0);
  const double lhs = sum_of(marginal_norms(m, space, spec));
  const double tn = trace_norm(m);
  const double kn = norm(m, spec);

  std::string name;
  double c = 1.0;
  double kappa_value = 0.0;
  if (std::holds_alternative<KyFanGeneral>(variant)) {
    name = "kyfan_general";
    kappa_value = kappa_tilde(n, d, k);
  } else if (std::holds_alternative<KyFanTwoFactor>(variant)) {
    if (n != 2) throw DomainError("check_kyfan_family: the two-factor variant needs n = 2");
    name = "kyfan_n2";
    kappa_value = static_cast<double>(k);
  } else {
    c = std::get<KyFanLowRank>(variant).c;
    if (!(c >= 0.0)) throw DomainError("check_kyfan_family: c must be >= 0");
    const Index r = rank_tol(m, tol);
    if (r > k) {
      std::ostringstream os;
      os << "check_kyfan_family: low-rank variant needs rank <= k, got rank " << r << " > " << k;
      throw DomainError(os.str());
    }
    name = "kyfan_lowrank";
    kappa_value = std::max(static_cast<double>(n) - c, 0.0);
  }
  const double rhs = c * tn + kappa_value * kn;
  return InequalityReport::make(name, lhs, rhs, inequality_tolerance(rhs),
                                {{"c", c},
                                 {"kappa", kappa_value},
                                 {"k", static_cast<double>(k)},
                                 {"n", static_cast<double>(n)},
                                 {"d", static_cast<double>(d)}});
}

/// (a) sum ||M_i||_p <= (n-1) ||M||_1 + ||M||_p
/// (b) sum ||M_i||_p^g <= (1 + r^{g(1-1/p)} (n-1)) ||M||_p^g
inline std::vector<InequalityReport> check_audenaert_family(const Matrix& m, const TensorSpace& space, double p,
                                                            double gamma, const Tolerance& tol = {}) {
  space.check(m, "check_audenaert_family");
  if (!(gamma >= 1.0)) throw DomainError("check_audenaert_family: gamma must be >= 1");
  const NormSpec spec = NormSpec::schatten(p);
  const double n = static_cast<double>(space.factors());
  const auto norms = marginal_norms(m, space, spec);
  const double np = norm(m, spec);
  const double tn = trace_norm(m);
  const Index r = rank_tol(m, tol);

  std::vector<InequalityReport> out;
  const double rhs_a = (n - 1.0) * tn + np;
  out.push_back(InequalityReport::make("audenaert", sum_of(norms), rhs_a, inequality_tolerance(rhs_a),
                                       {{"p", p}, {"n", n}}));

  double lhs_b = 0.0;
  for (double v : norms) lhs_b += log_pow(v, gamma);
  const double factor = 1.0 + log_pow(static_cast<double>(r), gamma * spec.one_minus_inv_p()) * (n - 1.0);
  const double rhs_b = factor * log_pow(np, gamma);
  out.push_back(InequalityReport::make("audenaert_rank", lhs_b, rhs_b, inequality_tolerance(rhs_b),
                                       {{"p", p},
                                        {"n", n},
                                        {"gamma", gamma},
                                        {"r", static_cast<double>(r)},
                                        {"factor", factor}}));
  return out;
}

/// sum ||M_i||_p <= n d^{(n-1)(1-1/p)} ||M||_p on equal local dimensions.
inline InequalityReport check_large_rank(const Matrix& m, const TensorSpace& space, double p) {
  space.check(m, "check_large_rank");
  if (!space.equal_dims()) {
    throw DimensionError("check_large_rank: needs equal local dimensions, got " + space.to_string());
  }
  const NormSpec spec = NormSpec::schatten(p);
  const double n = static_cast<double>(space.factors());
  const double d = static_cast<double>(space.dim(0));
  const double factor = n * std::pow(d, (n - 1.0) * spec.one_minus_inv_p());
  const double rhs = factor * norm(m, spec);
  return InequalityReport::make("large_rank", sum_of(marginal_norms(m, space, spec)), rhs,
                                inequality_tolerance(rhs), {{"p", p}, {"n", n}, {"d", d}, {"factor", factor}});
}

/// Rank-one M: ||A||_2^g + ||B||_2^g <= ||M||_2^g + |tr M|^g, g >= 2.
inline InequalityReport check_rank_one_gamma(const Matrix& m, const TensorSpace& space, double gamma,
                                             const Tolerance& tol = {}) {
  space.check(m, "check_rank_one_gamma");
  if (space.factors() != 2) throw DimensionError("check_rank_one_gamma: needs a bipartite space");
  if (!(gamma >= 2.0)) throw DomainError("check_rank_one_gamma: gamma must be >= 2");
  const Index r = rank_tol(m, tol);
  if (r != 1) {
    std::ostringstream os;
    os << "check_rank_one_gamma: needs rank 1, got rank " << r;
    throw DomainError(os.str());
  }
  const double a = marginal(m, space, 0).norm();
  const double b = marginal(m, space, 1).norm();
  const double lhs = log_pow(a, gamma) + log_pow(b, gamma);
  const double rhs = log_pow(m.norm(), gamma) + log_pow(std::abs(m.trace()), gamma);
  return InequalityReport::make("rank_one_gamma", lhs, rhs, inequality_tolerance(rhs), {{"gamma", gamma}});
}

/// Normal M of rank r: ||M_A||_2^2 + ||M_B||_2^2 <= r ||M||_2^2 + |tr M|^2 / r.
/// Non-normal input is rejected.
inline InequalityReport check_normal_rank_r(const Matrix& m, const TensorSpace& space, const Tolerance& tol = {}) {
  space.check(m, "check_normal_rank_r");
  if (space.factors() != 2) throw DimensionError("check_normal_rank_r: needs a bipartite space");
  const double res = normality_residual(m);
  const double fro = m.norm();
  if (res > 1e-9 * (1.0 + fro * fro)) {
    std::ostringstream os;
    os << "check_normal_rank_r: input is not normal (||mm* - m*m||_F = " << res << ")";
    throw DomainError(os.str());
  }
  const Index r = rank_tol(m, tol);
  const double a = marginal(m, space, 0).norm();
  const double b = marginal(m, space, 1).norm();
  const double lhs = a * a + b * b;
  const double rr = static_cast<double>(r);
  const double tr = std::abs(m.trace());
  const double rhs = r == 0 ? 0.0 : rr * fro * fro + tr * tr / rr;
  return InequalityReport::make("normal_rank_r", lhs, rhs, inequality_tolerance(rhs), {{"r", rr}});
}

}  // namespace ptl
