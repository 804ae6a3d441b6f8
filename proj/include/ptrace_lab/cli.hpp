#pragma once

// Command-line front end. Reports go to `out` as JSON lines, diagnostics to `err`.
// Exit codes: 0 success, 1 a checker verdict failed (certificate written),
// 2 usage or input error. Factor indices on the command line are 1-based.

#include "ptrace_lab/applications.hpp"
#include "ptrace_lab/dilations.hpp"
#include "ptrace_lab/inequalities.hpp"
#include "ptrace_lab/json_io.hpp"
#include "ptrace_lab/kappa.hpp"
#include "ptrace_lab/norms.hpp"
#include "ptrace_lab/sweep.hpp"
#include "ptrace_lab/tensor.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace ptl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdict = 1;
inline constexpr int kExitUsage = 2;

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) {
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

inline double parse_real(const std::string& text, const std::string& what) {
  if (text == "inf" || text == "infinity") return kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InputError(what + ": cannot parse \"" + text + "\" as a number");
  }
}

inline long long parse_integer(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InputError(what + ": cannot parse \"" + text + "\" as an integer");
  }
}

inline TensorSpace parse_space(const std::string& text) {
  TensorSpace s;
  for (const auto& p : split(text, ',')) {
    const long long v = parse_integer(p, "--space");
    if (v < 1) throw InputError("--space: local dimensions must be positive");
    s.dims.push_back(static_cast<Index>(v));
  }
  if (s.dims.empty()) throw InputError("--space: expected d1,d2[,d3...]");
  return s;
}

inline std::vector<double> parse_reals(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& p : split(text, ',')) out.push_back(parse_real(p, what));
  return out;
}

/// "abs" or "abs,rel".
inline Tolerance parse_tolerance(const std::string& text) {
  const auto parts = parse_reals(text, "tolerance");
  if (parts.empty() || parts.size() > 2) throw InputError("tolerance: expected \"abs\" or \"abs,rel\"");
  Tolerance t;
  t.abs = parts[0];
  if (parts.size() == 2) t.rel = parts[1];
  try {
    t.validate();
  } catch (const Error& e) {
    throw InputError(std::string("tolerance: ") + e.what());
  }
  return t;
}

struct Session {
  std::ostream& out;
  std::ostream& err;
  Tolerance tol;
  bool summary = false;
  std::string certificate_path = "ptrace_lab_certificate.json";
  std::vector<InequalityReport> table;

  void emit(const json& j) { out << j.dump() << '\n'; }

  void emit_report(const InequalityReport& r, json extra = json::object()) {
    if (summary) {
      table.push_back(r);
      return;
    }
    json j = report_to_json(r);
    for (auto& [k, v] : extra.items()) j[k] = v;
    emit(j);
  }

  void print_table() {
    if (!summary || table.empty()) return;
    out << std::left << std::setw(22) << "name" << std::right << std::setw(16) << "lhs" << std::setw(16)
        << "rhs" << std::setw(14) << "slack" << "  verdict\n";
    for (const auto& r : table) {
      out << std::left << std::setw(22) << r.name << std::right << std::setprecision(8) << std::setw(16)
          << r.lhs << std::setw(16) << r.rhs << std::setw(14) << std::setprecision(3) << r.slack << "  "
          << (r.verdict ? "pass" : "FAIL") << '\n';
    }
  }

  void write_certificate(const json& cert) {
    std::ofstream f(certificate_path);
    if (!f) {
      err << "error: cannot write certificate to " << certificate_path << '\n';
      return;
    }
    f << cert.dump(2) << '\n';
    err << "certificate written to " << certificate_path << '\n';
  }
};

inline MatrixEnvelope load_matrix(const std::string& path, const std::string& space_text) {
  if (path.empty()) throw InputError("--input is required");
  MatrixEnvelope env = read_matrix_file(path);
  if (!space_text.empty()) env.space = parse_space(space_text);
  return env;
}

inline TensorSpace require_space(const MatrixEnvelope& env) {
  if (!env.space) throw InputError("tensor space missing: pass --space d1,d2[,...] or add \"dims\" to the matrix");
  env.space->check(env.m, "input");
  return *env.space;
}

// ---------------------------------------------------------------------------

struct PtraceArgs {
  std::string input, space, trace;
  int keep = 0;
};

inline int cmd_ptrace(Session& s, const PtraceArgs& a) {
  const MatrixEnvelope env = load_matrix(a.input, a.space);
  const TensorSpace space = require_space(env);
  FactorSet out;
  if (a.keep > 0) {
    out = FactorSet::complement_of(a.keep - 1, space.factors());
  } else {
    if (a.trace.empty()) throw InputError("ptrace: pass --trace i[,j] or --keep i (1-based)");
    for (const auto& p : split(a.trace, ',')) out.indices.push_back(static_cast<int>(parse_integer(p, "--trace")) - 1);
  }
  if (out.indices.empty()) {
    s.emit(matrix_to_json(env.m, space));
    return kExitOk;
  }
  const Matrix r = partial_trace(env.m, space, out);
  s.emit(matrix_to_json(r, remaining_space(space, out)));
  return kExitOk;
}

struct DilateArgs {
  std::string kind, input, input_b, space;
  long long ancilla = 0;
  long long target = -1;
};

inline int cmd_dilate(Session& s, const DilateArgs& a) {
  const std::string& k = a.kind;
  if (k == "rank-one") {
    if (a.input.empty() || a.input_b.empty()) throw InputError("dilate rank-one: needs --input and --input-b Jordan specs");
    const JordanSpec ja = jordan_from_json(read_json_file(a.input), a.input);
    const JordanSpec jb = jordan_from_json(read_json_file(a.input_b), a.input_b);
    s.emit(dilation_to_json(joint_rank_one_dilation(ja, jb)));
    return kExitOk;
  }
  const Matrix m = load_matrix(a.input, "").m;
  if (k == "normal") {
    s.emit(dilation_to_json(normal_dilation(m)));
  } else if (k == "unitary") {
    const Index anc = a.ancilla > 0 ? static_cast<Index>(a.ancilla) : minimal_unitary_ancilla(m);
    s.emit(dilation_to_json(unitary_dilation(m, anc)));
  } else if (k == "nilpotent") {
    s.emit(dilation_to_json(nilpotent_dilation(m)));
  } else if (k == "idempotent") {
    s.emit(dilation_to_json(idempotent_dilation(m, s.tol)));
  } else if (k == "purify") {
    const Index db = a.ancilla > 0 ? static_cast<Index>(a.ancilla) : rank_tol(m, s.tol);
    const PurificationResult p = purify(m, db, s.tol);
    json j = dilation_to_json(p.dilation);
    j["b"] = matrix_to_json(p.b);
    j["flanders"] = flanders_to_json(p.flanders);
    s.emit(j);
  } else if (k == "rank-two") {
    if (a.input_b.empty()) throw InputError("dilate rank-two: needs --input-b");
    const Matrix b = load_matrix(a.input_b, "").m;
    s.emit(dilation_to_json(joint_rank_two_dilation(m, b)));
  } else if (k == "adjust") {
    const MatrixEnvelope env = load_matrix(a.input, a.space);
    if (a.target < 0) throw InputError("dilate adjust: needs --target r");
    s.emit(dilation_to_json(adjust_dilation_rank(env.m, require_space(env), static_cast<Index>(a.target), s.tol)));
  } else {
    throw InputError("dilate: unknown --kind \"" + k +
                     "\" (normal, unitary, nilpotent, idempotent, purify, rank-one, rank-two, adjust)");
  }
  return kExitOk;
}

struct CheckArgs {
  std::string ineq, input, input_b, inputs, space, p = "2", variant = "general";
  long long k = 1;
  double gamma = 1.0;
  double c = 1.0;
  double kappa = -1.0;
  double alpha = -1.0 / 3.0;
  double scale = 1.0;
};

inline int cmd_check(Session& s, const CheckArgs& a) {
  std::vector<InequalityReport> reports;
  json certificate_matrix;
  const std::string& name = a.ineq;
  const double p = parse_real(a.p, "--p");
  auto norm_spec = [&]() {
    return a.variant == "kyfan" || name == "kyfan" ? NormSpec::kyfan(static_cast<Index>(a.k)) : NormSpec::schatten(p);
  };

  if (name == "kron-majorization") {
    if (a.inputs.empty()) throw InputError("check kron-majorization: needs --inputs c1.json,c2.json,...");
    std::vector<Matrix> cs;
    TensorSpace space;
    for (const auto& path : split(a.inputs, ',')) {
      cs.push_back(read_matrix_file(path).m);
      space.dims.push_back(cs.back().rows());
    }
    reports.push_back(check_kron_majorization(cs, space));
  } else if (name == "range-inclusion") {
    const Matrix aa = load_matrix(a.input, "").m;
    if (a.input_b.empty()) throw InputError("check range-inclusion: needs --input-b (the dilation)");
    const Matrix mm = load_matrix(a.input_b, "").m;
    reports.push_back(range_inclusion_check(aa, mm, a.scale));
  } else if (name == "majorize") {
    throw InputError("use the majorize verb for vectors");
  } else {
    const MatrixEnvelope env = load_matrix(a.input, a.space);
    certificate_matrix = matrix_to_json(env.m, env.space);
    if (name == "two-copy") {
      reports.push_back(check_two_copy(env.m, a.alpha));
    } else {
      const TensorSpace space = require_space(env);
      if (name == "individual") {
        const NormSpec spec = a.variant == "kyfan" ? NormSpec::kyfan(static_cast<Index>(a.k)) : NormSpec::schatten(p);
        reports = check_individual_bound(env.m, space, spec, s.tol);
      } else if (name == "template") {
        const NormSpec spec = a.variant == "kyfan" ? NormSpec::kyfan(static_cast<Index>(a.k)) : NormSpec::schatten(p);
        double kv = a.kappa;
        if (kv < 0.0) {
          const KappaResult kr = kappa({spec, a.c, space.dims, rank_tol(env.m, s.tol)});
          if (kr.lower_bound) s.err << "note: kappa from the brute-force search is only a lower bound\n";
          kv = kr.value;
        }
        reports.push_back(check_template(env.m, space, spec, a.c, kv));
      } else if (name == "kyfan") {
        KyFanVariant v = KyFanGeneral{};
        if (a.variant == "n2") v = KyFanTwoFactor{};
        else if (a.variant == "lowrank") v = KyFanLowRank{a.c};
        else if (a.variant != "general") throw InputError("--variant must be general, n2 or lowrank");
        reports.push_back(check_kyfan_family(env.m, space, static_cast<Index>(a.k), v, s.tol));
      } else if (name == "audenaert") {
        reports = check_audenaert_family(env.m, space, p, a.gamma, s.tol);
      } else if (name == "large-rank") {
        reports.push_back(check_large_rank(env.m, space, p));
      } else if (name == "rank-one") {
        reports.push_back(check_rank_one_gamma(env.m, space, std::max(a.gamma, 2.0), s.tol));
      } else if (name == "normal-rank") {
        reports.push_back(check_normal_rank_r(env.m, space, s.tol));
      } else if (name == "dimension") {
        reports.push_back(check_dimension_constraint(env.m, space, s.tol));
      } else {
        throw InputError("check: unknown --ineq \"" + name +
                         "\" (individual, template, kyfan, audenaert, large-rank, rank-one, normal-rank, "
                         "dimension, two-copy, kron-majorization, range-inclusion)");
      }
    }
  }
  (void)norm_spec;
  bool ok = true;
  json failed = json::array();
  for (const auto& r : reports) {
    s.emit_report(r);
    if (!r.verdict) {
      ok = false;
      failed.push_back(report_to_json(r));
    }
  }
  s.print_table();
  if (!ok) {
    s.write_certificate({{"params", {{"ineq", name}, {"input", a.input}, {"space", a.space}, {"p", a.p}}},
                         {"matrix", certificate_matrix},
                         {"reports", failed},
                         {"slack", failed.front()["slack"]},
                         {"tolerance", failed.front()["tolerance"]}});
    return kExitVerdict;
  }
  return kExitOk;
}

struct KappaArgs {
  std::string norm = "schatten", p = "2", dims;
  long long k = 1, n = 2, d = 2, r = 0;
  double c = 0.0;
  bool brute_force = false;
  int starts = 64, iterations = 300;
  std::uint64_t seed = 1;
};

inline int cmd_kappa(Session& s, const KappaArgs& a) {
  KappaQuery q;
  if (a.norm == "schatten") q.spec = NormSpec::schatten(parse_real(a.p, "--p"));
  else if (a.norm == "kyfan") q.spec = NormSpec::kyfan(static_cast<Index>(a.k));
  else throw InputError("--norm must be schatten or kyfan");
  q.c = a.c;
  if (!a.dims.empty()) {
    q.dims = parse_space(a.dims).dims;
  } else {
    if (a.n < 1 || a.d < 1) throw InputError("--n and --d must be positive");
    q.dims.assign(static_cast<std::size_t>(a.n), static_cast<Index>(a.d));
  }
  q.r = static_cast<Index>(a.r);
  const BruteForceConfig cfg{a.starts, a.iterations, a.seed};
  const KappaResult r = a.brute_force ? kappa_bruteforce(q, cfg) : kappa(q, cfg);
  if (s.summary) {
    s.out << "kappa(" << q.c << ") = " << std::setprecision(12) << r.value << "  [" << to_string(r.branch)
          << (r.lower_bound ? ", lower bound" : "") << "]\n";
  } else {
    s.emit(kappa_to_json(q, r));
  }
  return kExitOk;
}

struct MajorizeArgs {
  std::string x, y;
};

inline int cmd_majorize(Session& s, const MajorizeArgs& a) {
  const auto x = parse_reals(a.x, "--x");
  const auto y = parse_reals(a.y, "--y");
  std::size_t worst = 0;
  const double slack = majorization_slack(x, y, &worst);
  auto sx = x;
  auto sy = y;
  sx.resize(std::max(x.size(), y.size()), 0.0);
  sy.resize(sx.size(), 0.0);
  std::sort(sx.begin(), sx.end(), std::greater<>());
  std::sort(sy.begin(), sy.end(), std::greater<>());
  double lhs = 0.0;
  double rhs = 0.0;
  for (std::size_t j = 0; j <= worst && j < sx.size(); ++j) {
    lhs += sx[j];
    rhs += sy[j];
  }
  InequalityReport r = InequalityReport::make("weak_submajorization", lhs, rhs, 1e-10,
                                              {{"index", static_cast<double>(worst + 1)}});
  r.slack = slack;
  r.verdict = weak_submajorize(x, y);
  s.emit_report(r);
  s.print_table();
  if (!r.verdict) {
    s.write_certificate({{"params", {{"x", x}, {"y", y}}}, {"slack", slack}, {"tolerance", 1e-10}});
    return kExitVerdict;
  }
  return kExitOk;
}

struct WernerArgs {
  long long d = 4;
  double alpha = -1.0 / 3.0;
  SearchConfig cfg;
};

inline int cmd_werner(Session& s, const WernerArgs& a) {
  const SearchResult r = search_two_copy_violation(static_cast<Index>(a.d), a.alpha, a.cfg);
  json search = {{"seed", r.seed},
                 {"starts", r.starts},
                 {"iterations", r.iterations},
                 {"best_start", r.best_start},
                 {"normalized_slack", r.normalized_slack},
                 {"violation", r.violation},
                 {"note", r.violation ? "violation re-verified on the explicit matrix"
                                      : "no violation found; this is evidence, not a proof"}};
  s.emit_report(r.best, {{"search", search}});
  s.print_table();
  if (r.violation) {
    s.write_certificate({{"params", {{"d", a.d}, {"alpha", a.alpha}, {"starts", r.starts},
                                     {"iterations", r.iterations}, {"best_start", r.best_start}}},
                         {"matrix", matrix_to_json(r.incumbent, TensorSpace{a.d, a.d})},
                         {"slack", r.best.slack},
                         {"seed", r.seed},
                         {"tolerance", 1e-12}});
    return kExitVerdict;
  }
  return kExitOk;
}

struct WitnessArgs {
  long long d = 2, n = 2, k = 1;
  std::string input;
  bool matrix = false;
};

inline int cmd_witness(Session& s, const WitnessArgs& a) {
  const WitnessSpec w{static_cast<Index>(a.d), static_cast<int>(a.n), static_cast<Index>(a.k)};
  w.validate();
  if (a.matrix) {
    s.emit(matrix_to_json(witness_matrix(w)));
    return kExitOk;
  }
  const Matrix m = a.input.empty() ? witness_sharp_example(w) : load_matrix(a.input, "").m;
  const double value = witness_value(w, m);
  const Index rank = rank_tol(m, s.tol);
  const bool applicable = rank <= w.k;
  const double rhs = w.coefficient() * m.squaredNorm();
  const InequalityReport r = InequalityReport::make("witness", rhs - value, rhs, inequality_tolerance(rhs),
                                                    {{"d", static_cast<double>(w.d)},
                                                     {"n", static_cast<double>(w.n)},
                                                     {"k", static_cast<double>(w.k)},
                                                     {"rank", static_cast<double>(rank)}});
  s.emit_report(r, {{"value", value},
                    {"applicable", applicable},
                    {"degenerate", w.degenerate()},
                    {"example", a.input.empty()}});
  s.print_table();
  if (applicable && !r.verdict) {
    s.write_certificate({{"params", {{"d", a.d}, {"n", a.n}, {"k", a.k}}},
                         {"matrix", matrix_to_json(m, w.space())},
                         {"slack", r.slack},
                         {"tolerance", r.tolerance}});
    return kExitVerdict;
  }
  return kExitOk;
}

struct SweepArgs {
  std::string ineq = "all", shapes = "2x2,2x3,3x3,2x2x2";
  int seeds = 100;
  int jobs = 1;
  std::uint64_t seed = 0;
};

inline int cmd_sweep(Session& s, const SweepArgs& a) {
  SweepConfig cfg;
  cfg.checkers = a.ineq == "all" ? sweep_checker_names() : split(a.ineq, ',');
  for (const auto& sh : split(a.shapes, ',')) cfg.shapes.push_back(parse_shape(sh));
  if (cfg.shapes.empty()) throw InputError("--shapes: expected e.g. 2x2,2x3");
  cfg.seeds = a.seeds;
  cfg.jobs = a.jobs;
  cfg.base_seed = a.seed;
  cfg.tol = s.tol;
  const auto records = run_sweep(cfg);

  struct Tally {
    int count = 0;
    int failed = 0;
    double min_slack = kInf;
  };
  std::map<std::pair<std::string, std::string>, Tally> tally;
  json failed = json::array();
  for (const auto& rec : records) {
    auto& t = tally[{rec.checker, rec.shape}];
    ++t.count;
    t.min_slack = std::min(t.min_slack, rec.report.slack / (1.0 + std::abs(rec.report.rhs)));
    if (!rec.report.verdict) {
      ++t.failed;
      json f = report_to_json(rec.report);
      f["checker"] = rec.checker;
      f["shape"] = rec.shape;
      f["seed"] = rec.seed;
      failed.push_back(f);
    }
    if (!s.summary) {
      s.emit_report(rec.report, {{"checker", rec.checker}, {"shape", rec.shape}, {"seed", rec.seed}});
    }
  }
  if (s.summary) {
    s.out << std::left << std::setw(20) << "checker" << std::setw(8) << "shape" << std::right << std::setw(9)
          << "reports" << std::setw(8) << "failed" << std::setw(16) << "min rel slack" << '\n';
    for (const auto& [key, t] : tally) {
      s.out << std::left << std::setw(20) << key.first << std::setw(8) << key.second << std::right << std::setw(9)
            << t.count << std::setw(8) << t.failed << std::setw(16) << std::setprecision(3) << t.min_slack << '\n';
    }
  }
  if (!failed.empty()) {
    s.write_certificate({{"params", {{"ineq", a.ineq}, {"shapes", a.shapes}, {"seeds", a.seeds}}},
                         {"seed", a.seed},
                         {"failures", failed},
                         {"tolerance", "per report"}});
    return kExitVerdict;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

/// Entry point; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ptrace_lab: partial traces, dilations and norm inequalities"};
  app.require_subcommand(1);
  app.fallthrough();
  bool summary = false;
  std::string tol_text;
  std::string certificate;
  app.add_flag("--summary", summary, "Print a human-readable table instead of JSON lines");
  app.add_option("--tol", tol_text, "Rank tolerance \"abs[,rel]\" (overrides PTRACE_LAB_TOL)");
  app.add_option("--certificate", certificate, "Where to write a certificate when a verdict fails");

  PtraceArgs pa;
  auto* ptrace = app.add_subcommand("ptrace", "Partial trace of a matrix");
  ptrace->add_option("--input", pa.input, "Matrix JSON file")->required();
  ptrace->add_option("--space", pa.space, "Local dimensions d1,d2[,...]");
  ptrace->add_option("--trace", pa.trace, "Factors to trace out, 1-based, comma separated");
  ptrace->add_option("--keep", pa.keep, "Keep only this factor (1-based)");

  DilateArgs da;
  auto* dilate = app.add_subcommand("dilate", "Construct a dilation");
  dilate->add_option("--kind", da.kind, "normal|unitary|nilpotent|idempotent|purify|rank-one|rank-two|adjust")->required();
  dilate->add_option("--input", da.input, "Target matrix (Jordan spec for rank-one)");
  dilate->add_option("--input-b", da.input_b, "Second target (rank-one, rank-two)");
  dilate->add_option("--ancilla", da.ancilla, "Ancilla dimension (unitary: even m; purify: d_B)");
  dilate->add_option("--target", da.target, "Target rank (adjust)");
  dilate->add_option("--space", da.space, "Local dimensions of the input (adjust)");

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "Evaluate one inequality on a matrix");
  check->add_option("--ineq", ca.ineq, "Inequality name")->required();
  check->add_option("--input", ca.input, "Matrix JSON file");
  check->add_option("--input-b", ca.input_b, "Second matrix (range-inclusion)");
  check->add_option("--inputs", ca.inputs, "Comma-separated matrices (kron-majorization)");
  check->add_option("--space", ca.space, "Local dimensions d1,d2[,...]");
  check->add_option("--p", ca.p, "Schatten exponent (inf allowed)");
  check->add_option("--k", ca.k, "Ky Fan index");
  check->add_option("--gamma", ca.gamma, "Exponent gamma");
  check->add_option("--c", ca.c, "Template constant c");
  check->add_option("--kappa", ca.kappa, "Template constant kappa (default: computed)");
  check->add_option("--variant", ca.variant, "kyfan: general|n2|lowrank; individual/template: schatten|kyfan");
  check->add_option("--alpha", ca.alpha, "Werner parameter (two-copy)");
  check->add_option("--scale", ca.scale, "Scale (range-inclusion)");

  KappaArgs ka;
  auto* kap = app.add_subcommand("kappa", "Compute the template constant kappa(c)");
  kap->add_option("--norm", ka.norm, "schatten|kyfan");
  kap->add_option("--p", ka.p, "Schatten exponent (inf allowed)");
  kap->add_option("--k", ka.k, "Ky Fan index");
  kap->add_option("--c", ka.c, "c >= 0");
  kap->add_option("--n", ka.n, "Number of factors");
  kap->add_option("--d", ka.d, "Local dimension (equal dims)");
  kap->add_option("--dims", ka.dims, "Local dimensions d1,d2[,...] (overrides --n/--d)");
  kap->add_option("--r", ka.r, "Rank cap (0: unconstrained)");
  kap->add_flag("--brute-force", ka.brute_force, "Use the multi-start search (lower bound)");
  kap->add_option("--starts", ka.starts, "Brute-force starts");
  kap->add_option("--iterations", ka.iterations, "Brute-force iterations per start");
  kap->add_option("--seed", ka.seed, "Brute-force seed");

  MajorizeArgs ma;
  auto* maj = app.add_subcommand("majorize", "Weak submajorization of two real vectors");
  maj->add_option("--x", ma.x, "Comma-separated vector")->required();
  maj->add_option("--y", ma.y, "Comma-separated vector")->required();

  WernerArgs wa;
  auto* werner = app.add_subcommand("werner-search", "Search for violations of the two-copy inequality");
  werner->add_option("--d", wa.d, "Local dimension");
  werner->add_option("--alpha", wa.alpha, "Werner parameter in [-1, 0)");
  werner->add_option("--starts", wa.cfg.starts, "Number of starts");
  werner->add_option("--iterations", wa.cfg.iterations, "Descent iterations per start");
  werner->add_option("--seed", wa.cfg.seed, "Seed");
  werner->add_option("--step", wa.cfg.initial_step, "Initial step");
  werner->add_option("--jobs", wa.cfg.jobs, "Worker threads");

  WitnessArgs xa;
  auto* witness = app.add_subcommand("witness", "Schmidt-number witness value");
  witness->add_option("--d", xa.d, "Local dimension");
  witness->add_option("--n", xa.n, "Number of factors");
  witness->add_option("--k", xa.k, "Schmidt-rank threshold, 0 <= k < d");
  witness->add_option("--input", xa.input, "Matrix on (C^d)^n (default: the rank-(k+1) example)");
  witness->add_flag("--matrix", xa.matrix, "Print W_k itself");

  SweepArgs sa;
  auto* sweep = app.add_subcommand("sweep", "Seeded property sweep over random instances");
  sweep->add_option("--ineq", sa.ineq, "all or comma-separated checker names");
  sweep->add_option("--shapes", sa.shapes, "Shapes such as 2x2,2x3,2x2x2");
  sweep->add_option("--seeds", sa.seeds, "Instances per checker and shape");
  sweep->add_option("--seed", sa.seed, "Base seed");
  sweep->add_option("--jobs", sa.jobs, "Worker threads");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    Tolerance tol;
    if (!tol_text.empty()) {
      tol = parse_tolerance(tol_text);
    } else if (const char* env = std::getenv("PTRACE_LAB_TOL"); env && *env) {
      tol = parse_tolerance(env);
    }
    Session s{out, err, tol, summary};
    if (!certificate.empty()) s.certificate_path = certificate;

    if (ptrace->parsed()) return cmd_ptrace(s, pa);
    if (dilate->parsed()) return cmd_dilate(s, da);
    if (check->parsed()) return cmd_check(s, ca);
    if (kap->parsed()) return cmd_kappa(s, ka);
    if (maj->parsed()) return cmd_majorize(s, ma);
    if (werner->parsed()) return cmd_werner(s, wa);
    if (witness->parsed()) return cmd_witness(s, xa);
    if (sweep->parsed()) return cmd_sweep(s, sa);
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "input error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "input error: " << e.what() << '\n';
    return kExitUsage;
  }
  err << "usage error: no command\n";
  return kExitUsage;
}

}  // namespace ptl::cli
