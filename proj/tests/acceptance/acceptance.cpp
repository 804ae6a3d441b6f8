// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "ptrace_lab/ptrace_lab.hpp"
#include "battery.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace ptl;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  // Records a failure with a short reason; keeps the first few only.
  void fail(const std::string& why) {
    if (pass || failures < 5) note << (failures ? "; " : "") << why;
    pass = false;
    ++failures;
  }
  void require(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
  int failures = 0;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

Matrix oracle_trace_b(const Matrix& m, const TensorSpace& s) {
  return oracle::partial_trace(m, s.dims, {false, true});
}

Matrix oracle_trace_a(const Matrix& m, const TensorSpace& s) {
  return oracle::partial_trace(m, s.dims, {true, false});
}

Matrix traceless(Rng& rng, Index d) {
  Matrix a = ginibre(rng, d, d);
  a -= (a.trace() / static_cast<double>(d)) * identity(d);
  return a;
}

Matrix with_trace(Rng& rng, Index d, Complex t) {
  Matrix a = ginibre(rng, d, d);
  a += ((t - a.trace()) / static_cast<double>(d)) * identity(d);
  return a;
}

Matrix low_rank(Rng& rng, Index side, Index r) { return ginibre(rng, side, r) * ginibre(rng, side, r).adjoint(); }

Index pick(Rng& rng, Index lo, Index hi) { return lo + static_cast<Index>(rng.bits() % static_cast<std::uint64_t>(hi - lo + 1)); }

void c1(Outcome& o) {
  Rng rng(101);
  double worst_trace = 0.0;
  double worst_slack = kInf;
  for (const TensorSpace s : {TensorSpace{2, 2}, TensorSpace{2, 3}, TensorSpace{3, 3}}) {
    for (int t = 0; t < 500; ++t) {
      const Matrix m = ginibre(rng, s.total(), s.total());
      const Matrix a = partial_trace(m, s, {1});
      const Matrix b = partial_trace(m, s, {0});
      worst_trace = std::max({worst_trace, std::abs(a.trace() - m.trace()), std::abs(b.trace() - m.trace())});
      const auto ra = range_inclusion_check(a, m, static_cast<double>(s.dim(1)), 360);
      const auto rb = range_inclusion_check(b, m, static_cast<double>(s.dim(0)), 360);
      worst_slack = std::min({worst_slack, ra.slack, rb.slack});
    }
  }
  o.require(worst_trace <= 1e-12, "trace residual " + fmt(worst_trace));
  o.require(worst_slack >= -1e-8, "inclusion slack " + fmt(worst_slack));
  o.note << (o.pass ? "" : "; ") << "max trace residual " << fmt(worst_trace) << ", min inclusion slack "
         << fmt(worst_slack);
}

void c2(Outcome& o) {
  Rng rng(102);
  double normal = 0, unitary = 0, nil = 0, idem = 0, traces = 0;
  for (int t = 0; t < 200; ++t) {
    const Index d = pick(rng, 2, 4);
    {
      const Matrix a = ginibre(rng, d, d);
      const auto r = normal_dilation(a);
      normal = std::max(normal, normality_residual(r.m));
      traces = std::max(traces, relative_residual(oracle_trace_b(r.m, r.space), a));
    }
    {
      const Matrix a = rng.uniform(0.2, 3.0) * ginibre(rng, d, d);
      const double s1 = singular_values(a)(0);
      const Index m = minimal_unitary_ancilla(a);
      o.require(m % 2 == 0 && static_cast<double>(m) >= s1 * (1.0 - 1e-12) &&
                    (m == 2 || static_cast<double>(m - 2) < s1),
                "ancilla " + std::to_string(m) + " not minimal for sigma_1 " + fmt(s1));
      const auto r = unitary_dilation(a, m);
      unitary = std::max(unitary, (r.m.adjoint() * r.m - identity(r.m.rows())).norm());
      traces = std::max(traces, relative_residual(oracle_trace_b(r.m, r.space), a));
    }
    {
      const Matrix a = traceless(rng, d);
      const auto r = nilpotent_dilation(a);
      nil = std::max(nil, matrix_power(r.m, static_cast<int>(d)).norm());
      traces = std::max(traces, relative_residual(oracle_trace_b(r.m, r.space), a));
    }
    {
      const auto tr = static_cast<double>(pick(rng, 1, 3));
      const Matrix a = with_trace(rng, d, tr);
      const auto r = idempotent_dilation(a);
      idem = std::max(idem, (r.m * r.m - r.m).norm());
      traces = std::max(traces, relative_residual(oracle_trace_b(r.m, r.space), a));
    }
  }
  o.require(normal <= 1e-10, "normality " + fmt(normal));
  o.require(unitary <= 1e-9, "unitarity " + fmt(unitary));
  o.require(nil <= 1e-8, "nilpotency " + fmt(nil));
  o.require(idem <= 1e-9, "idempotency " + fmt(idem));
  o.require(traces <= 1e-8, "partial trace " + fmt(traces));
  o.note << (o.pass ? "" : "; ") << "normal " << fmt(normal) << ", unitary " << fmt(unitary) << ", nilpotent "
         << fmt(nil) << ", idempotent " << fmt(idem) << ", partial traces " << fmt(traces);
}

void c3(Outcome& o) {
  Rng rng(103);
  int similar = 0;
  for (int t = 0; t < 500; ++t) {
    const TensorSpace s{pick(rng, 2, 4), pick(rng, 2, 4)};
    const Matrix m = low_rank(rng, s.total(), 1);
    const auto v = flanders_similar(trace_b(m, s), trace_a(m, s));
    if (v.similar) ++similar;
    else o.fail("rank-one marginals not similar: " + v.reason);
  }
  int purified = 0;
  for (int t = 0; t < 100; ++t) {
    const Index d = pick(rng, 2, 4);
    const Index r = pick(rng, 1, d);
    const Matrix a = ginibre(rng, d, r) * ginibre(rng, d, r).adjoint();
    const auto p = purify(a, r);
    const bool ok = rank_tol(p.dilation.m) == 1 &&
                    relative_residual(oracle_trace_b(p.dilation.m, p.dilation.space), a) <= 1e-9;
    o.require(ok, "purify at d_b = rank failed");
    bool rejected = false;
    try {
      purify(a, r - 1);
    } catch (const DomainError&) {
      rejected = true;
    }
    o.require(rejected, "purify at d_b = rank - 1 accepted");
    if (ok && rejected) ++purified;
  }
  double battery = 0.0;
  for (const auto& [sa, sb] : oracle::jordan_battery()) {
    const auto r = joint_rank_one_dilation(sa, sb);
    o.require(rank_tol(r.m) <= 1, "battery dilation rank > 1");
    battery = std::max({battery, relative_residual(oracle_trace_b(r.m, r.space), sa.matrix()),
                        relative_residual(oracle_trace_a(r.m, r.space), sb.matrix())});
  }
  o.require(battery <= 1e-9, "battery residual " + fmt(battery));
  o.note << (o.pass ? "" : "; ") << similar << "/500 similar, " << purified << "/100 purify thresholds, battery "
         << fmt(battery);
}

void c4(Outcome& o) {
  Rng rng(104);
  double worst = 0.0;
  Index max_rank = 0;
  int rejected = 0;
  for (int t = 0; t < 200; ++t) {
    const Index d = pick(rng, 1, 5);
    const Matrix a = ginibre(rng, d, d);
    const Matrix b = with_trace(rng, d, a.trace());
    const auto r = joint_rank_two_dilation(a, b);
    max_rank = std::max(max_rank, rank_tol(r.m));
    worst = std::max({worst, relative_residual(oracle_trace_b(r.m, r.space), a),
                      relative_residual(oracle_trace_a(r.m, r.space), b)});
    const Matrix off = with_trace(rng, d, a.trace() + Complex(0.5, 0.0));
    try {
      joint_rank_two_dilation(a, off);
    } catch (const DomainError&) {
      ++rejected;
    }
  }
  o.require(max_rank <= 2, "rank " + std::to_string(max_rank));
  o.require(worst <= 1e-8, "partial trace " + fmt(worst));
  o.require(rejected == 200, std::to_string(200 - rejected) + " mismatched pairs accepted");
  o.note << (o.pass ? "" : "; ") << "max rank " << max_rank << ", residual " << fmt(worst) << ", " << rejected
         << "/200 mismatches rejected";
}

void c5(Outcome& o) {
  Rng rng(105);
  double worst = 0.0;
  int reached = 0;
  for (int t = 0; t < 20; ++t) {
    const Matrix a = ginibre(rng, 3, 3);
    const Matrix b = with_trace(rng, 3, a.trace());
    const auto base = joint_rank_two_dilation(a, b);
    const Matrix ta = oracle_trace_b(base.m, base.space);
    const Matrix tb = oracle_trace_a(base.m, base.space);
    for (Index target = 2; target <= 9; ++target) {
      try {
        const auto r = adjust_dilation_rank(base.m, base.space, target);
        const bool hit = rank_tol(r.m) == target;
        o.require(hit, "rank " + std::to_string(target) + " missed");
        if (hit) ++reached;
        worst = std::max({worst, (oracle_trace_b(r.m, r.space) - ta).norm(), (oracle_trace_a(r.m, r.space) - tb).norm()});
      } catch (const Error& e) {
        o.fail(std::string("target ") + std::to_string(target) + ": " + e.what());
      }
    }
  }
  o.require(worst <= 1e-10, "partial trace drift " + fmt(worst));
  o.note << (o.pass ? "" : "; ") << reached << "/160 targets reached, drift " << fmt(worst);
}

void c6(Outcome& o) {
  Rng rng(106);
  double worst = kInf;
  for (int n : {2, 3}) {
    for (int t = 0; t < 500; ++t) {
      TensorSpace s;
      std::vector<Matrix> cs;
      for (int i = 0; i < n; ++i) {
        s.dims.push_back(pick(rng, 1, 3));
        cs.push_back(ginibre(rng, s.dims.back(), s.dims.back()));
      }
      worst = std::min(worst, check_kron_majorization(cs, s).slack);
    }
  }
  o.require(worst >= -1e-10, "slack " + fmt(worst));
  o.note << (o.pass ? "" : "; ") << "min partial-sum slack " << fmt(worst);
}

void c7(Outcome& o) {
  double worst = 0.0;
  for (double p : {1.0, 1.5, 2.0, 3.0, kInf}) {
    for (Index d : {2, 3, 4}) {
      const NormSpec spec = NormSpec::schatten(p);
      worst = std::max(worst, std::abs(kappa_schatten({spec, 1.0, {d, d}, 0}).value - 1.0));
      for (double c : {1.0, 1.25, 1.5, 1.75, 2.0}) {
        worst = std::max(worst, std::abs(kappa_schatten({spec, c, {d, d}, 0}).value - (2.0 - c)));
      }
      for (double c : {2.0, 2.5, 4.0}) o.require(kappa_schatten({spec, c, {d, d}, 0}).value == 0.0, "kappa(c >= 2) != 0");
    }
  }
  o.require(worst <= 1e-9, "anchor error " + fmt(worst));
  for (Index d = 1; d <= 6; ++d) {
    for (Index k = 1; k <= d; ++k) {
      o.require(kappa_tilde(2, d, k) == static_cast<double>(k), "kappa_tilde(2, d, k) != k");
      o.require(kappa_kyfan({NormSpec::kyfan(k), 1.0, {d, d}, 0}).value == static_cast<double>(k),
                "Ky Fan kappa(1) != k");
    }
  }
  double gap = 0.0;
  for (Index d = 1; d <= 4; ++d) {
    for (Index k = 1; k <= d; ++k) {
      for (double c : {0.0, 0.5, 1.0}) {
        const KappaQuery q{NormSpec::kyfan(k), c, {d, d}, 0};
        const double closed = kappa_kyfan(q).value;
        const double bf = kappa_bruteforce(q).value;
        o.require(bf <= closed + 1e-9, "brute force exceeds closed form");
        gap = std::max(gap, std::abs(closed - bf));
      }
    }
  }
  o.require(gap <= 1e-5, "brute-force gap " + fmt(gap));
  o.note << (o.pass ? "" : "; ") << "anchor error " << fmt(worst) << ", brute-force gap " << fmt(gap);
}

Matrix e11_power_times_identity(Index d, int n, Index r) {
  Matrix last = Matrix::Zero(d, d);
  for (Index i = 0; i < r; ++i) last(i, i) = 1.0;
  Matrix out = last;
  for (int i = 0; i + 1 < n; ++i) out = kron(unit(d, 0, 0), out);
  return out;
}

void c8(Outcome& o) {
  SweepConfig cfg;
  cfg.checkers = sweep_checker_names();
  for (const char* s : {"2x2", "2x3", "3x3", "2x2x2"}) cfg.shapes.push_back(parse_shape(s));
  cfg.seeds = 500;
  cfg.jobs = jobs();
  std::size_t reports = 0;
  for (const auto& rec : run_sweep(cfg)) {
    ++reports;
    if (!rec.report.verdict) {
      o.fail(rec.checker + " on " + rec.shape + " seed " + std::to_string(rec.seed) + " slack " + fmt(rec.report.slack));
    }
  }
  double tight = 0.0;
  for (int n : {2, 3}) {
    for (Index d : {2, 3}) {
      const TensorSpace s = TensorSpace::uniform(d, n);
      for (Index r = 1; r <= d; ++r) {
        const Matrix m = e11_power_times_identity(d, n, r);
        for (double p : {1.0, 1.5, 2.0, 3.0, kInf}) {
          for (double g : {1.0, 2.0, 3.0}) {
            const auto rep = check_audenaert_family(m, s, p, g)[1];
            tight = std::max(tight, std::abs(rep.slack) / rep.rhs);
          }
        }
      }
      for (double p : {1.0, 1.5, 2.0, 3.0, kInf}) {
        const auto rep = check_large_rank(identity(s.total()), s, p);
        tight = std::max(tight, std::abs(rep.slack) / rep.rhs);
      }
    }
  }
  const Matrix e = e11_power_times_identity(2, 2, 2);
  const auto three = check_audenaert_family(e, TensorSpace{2, 2}, 2.0, 2.0)[1];
  o.require(std::abs(three.constants.at("factor") - 3.0) <= 1e-15, "constant is not 3");
  tight = std::max(tight, std::abs(three.slack) / three.rhs);
  o.require(tight <= 1e-9, "tight-case gap " + fmt(tight));
  o.note << (o.pass ? "" : "; ") << reports << " reports, tight-case relative gap " << fmt(tight);
}

void c9(Outcome& o) {
  for (Index d : {2, 3, 4}) {
    const Matrix f = flip_operator(d);
    for (double a : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      const Matrix w = werner_state(d, a);
      o.require(eig_hermitian(w).minCoeff() >= -1e-12, "werner not positive");
      o.require(std::abs(w.trace() - 1.0) <= 1e-12, "werner trace");
      o.require((f * w * f - w).norm() <= 1e-12, "werner not flip-invariant");
    }
  }
  Rng rng(109);
  double worst = kInf;
  for (int t = 0; t < 10000; ++t) {
    const RankTwoFactors z{ginibre(rng, 4, 4), ginibre(rng, 4, 4), ginibre(rng, 4, 4), ginibre(rng, 4, 4)};
    const Matrix m = z.assemble();
    for (double a : {-1.0 / 3.0, -0.25}) worst = std::min(worst, check_two_copy(m, a).slack);
  }
  o.require(worst >= -1e-8, "random slack " + fmt(worst));
  SearchConfig cfg;
  cfg.starts = 10000;
  cfg.seed = 9;
  cfg.jobs = jobs();
  const auto res = search_two_copy_violation(4, -1.0 / 3.0, cfg);
  o.require(!res.violation, "search found a violation at start " + std::to_string(res.best_start));
  o.note << (o.pass ? "" : "; ") << "min random slack " << fmt(worst) << ", search best normalized slack "
         << fmt(res.normalized_slack) << " over " << res.starts << " starts";
}

void c10(Outcome& o) {
  Rng rng(110);
  double worst = kInf;
  // (n, d, k) = (2,3,1), (2,3,2), (3,2,1)
  const std::vector<WitnessSpec> specs = {WitnessSpec{3, 2, 1}, WitnessSpec{3, 2, 2}, WitnessSpec{2, 3, 1}};
  for (const auto& w : specs) {
    for (int t = 0; t < 1000; ++t) {
      const Matrix m = ginibre(rng, w.side(), w.k) * ginibre(rng, w.side(), w.k).adjoint();
      worst = std::min(worst, witness_value(w, m));
    }
  }
  o.require(worst >= -1e-8, "witness value " + fmt(worst));
  double sharp = 0.0;
  for (const auto& w : specs) {
    const double want = -static_cast<double>((w.n - 1) * (w.k + 1));
    sharp = std::max(sharp, std::abs(witness_value(w, witness_sharp_example(w)) - want));
  }
  o.require(sharp <= 1e-9, "sharp example error " + fmt(sharp));
  const WitnessSpec w{2, 2, 1};
  const TensorSpace s = w.space();
  const Matrix choi = choi_matrix([&](const Matrix& x) { return kpositive_map_apply(x, s, w.k); }, s);
  const double choi_res = (choi - witness_matrix(w)).norm();
  o.require(choi_res <= 1e-10, "Choi residual " + fmt(choi_res));
  o.note << (o.pass ? "" : "; ") << "min value " << fmt(worst) << ", sharp error " << fmt(sharp)
         << ", Choi residual " << fmt(choi_res);
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
      {"C1 trace preservation and numerical-range inclusion", c1},
      {"C2 structured dilations", c2},
      {"C3 Flanders similarity, purification, rank-one battery", c3},
      {"C4 rank-two joint dilation", c4},
      {"C5 rank adjustment", c5},
      {"C6 Kronecker-sum majorization", c6},
      {"C7 kappa anchors", c7},
      {"C8 inequality sweeps and tight cases", c8},
      {"C9 Werner application", c9},
      {"C10 witness application", c10},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s (%s; %.1fs)\n", o.pass ? "PASS" : "FAIL", name, o.note.str().c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
