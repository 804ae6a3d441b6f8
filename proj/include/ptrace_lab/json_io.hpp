#pragma once

// JSON encodings.
//   matrix: {"rows": R, "cols": C, "re": [[...]], "im": [[...]]} plus optional "dims"
//   report: {"name", "lhs", "rhs", "slack", "tolerance", "verdict", "constants"}
// Non-finite report numbers are written as the strings "inf" / "-inf" / "nan".

#include "ptrace_lab/applications.hpp"
#include "ptrace_lab/dilations.hpp"
#include "ptrace_lab/kappa.hpp"
#include "ptrace_lab/matrix.hpp"
#include "ptrace_lab/report.hpp"
#include "ptrace_lab/tensor.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

namespace ptl {

using json = nlohmann::json;

/// Malformed input; the message names the offending location.
class InputError : public Error {
 public:
  using Error::Error;
};

inline json number_or_string(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double number_from(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  throw InputError(where + ": expected a number");
}

inline json to_json(const TensorSpace& space) {
  json dims = json::array();
  for (Index d : space.dims) dims.push_back(d);
  return dims;
}

inline json matrix_to_json(const Matrix& m, const std::optional<TensorSpace>& space = std::nullopt) {
  json re = json::array();
  json im = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json rr = json::array();
    json ri = json::array();
    for (Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ri.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  json out = {{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
  if (space) out["dims"] = to_json(*space);
  return out;
}

struct MatrixEnvelope {
  Matrix m;
  std::optional<TensorSpace> space;
};

inline MatrixEnvelope matrix_from_json(const json& j, const std::string& where = "matrix") {
  if (!j.is_object()) throw InputError(where + ": expected an object");
  for (const char* key : {"rows", "cols", "re", "im"}) {
    if (!j.contains(key)) throw InputError(where + ": missing field \"" + key + "\"");
  }
  if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer()) {
    throw InputError(where + ": rows and cols must be integers");
  }
  const auto rows = j["rows"].get<long long>();
  const auto cols = j["cols"].get<long long>();
  if (rows < 1 || cols < 1) throw InputError(where + ": rows and cols must be positive");
  Matrix m(rows, cols);
  for (const char* part : {"re", "im"}) {
    const json& arr = j[part];
    const std::string base = where + "." + part;
    if (!arr.is_array() || static_cast<long long>(arr.size()) != rows) {
      throw InputError(base + ": expected " + std::to_string(rows) + " rows");
    }
    for (long long r = 0; r < rows; ++r) {
      const json& row = arr[static_cast<std::size_t>(r)];
      const std::string rloc = base + "[" + std::to_string(r) + "]";
      if (!row.is_array() || static_cast<long long>(row.size()) != cols) {
        throw InputError(rloc + ": expected " + std::to_string(cols) + " entries");
      }
      for (long long c = 0; c < cols; ++c) {
        const json& v = row[static_cast<std::size_t>(c)];
        const std::string loc = rloc + "[" + std::to_string(c) + "]";
        if (!v.is_number()) throw InputError(loc + ": expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw InputError(loc + ": non-finite value");
        if (part[0] == 'r') m(r, c) = Complex(x, 0.0); else m(r, c) += Complex(0.0, x);
      }
    }
  }
  MatrixEnvelope out{m, std::nullopt};
  if (j.contains("dims") && !j["dims"].is_null()) {
    const json& dims = j["dims"];
    if (!dims.is_array()) throw InputError(where + ".dims: expected an array");
    TensorSpace space;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (!dims[i].is_number_integer() || dims[i].get<long long>() < 1) {
        throw InputError(where + ".dims[" + std::to_string(i) + "]: expected a positive integer");
      }
      space.dims.push_back(dims[i].get<Index>());
    }
    if (space.total() != rows || rows != cols) {
      throw InputError(where + ".dims: product " + std::to_string(space.total()) +
                       " does not match the matrix shape");
    }
    out.space = space;
  }
  return out;
}

inline json parse_json_text(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(where + ": " + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

inline MatrixEnvelope read_matrix_file(const std::string& path) {
  return matrix_from_json(read_json_file(path), path);
}

inline json constants_to_json(const std::map<std::string, double>& constants) {
  json out = json::object();
  for (const auto& [k, v] : constants) out[k] = number_or_string(v);
  return out;
}

inline json report_to_json(const InequalityReport& r) {
  return {{"name", r.name},
          {"lhs", number_or_string(r.lhs)},
          {"rhs", number_or_string(r.rhs)},
          {"slack", number_or_string(r.slack)},
          {"tolerance", number_or_string(r.tolerance)},
          {"verdict", r.verdict},
          {"constants", constants_to_json(r.constants)}};
}

inline InequalityReport report_from_json(const json& j) {
  InequalityReport r;
  r.name = j.at("name").get<std::string>();
  r.lhs = number_from(j.at("lhs"), "lhs");
  r.rhs = number_from(j.at("rhs"), "rhs");
  r.slack = number_from(j.at("slack"), "slack");
  r.tolerance = number_from(j.at("tolerance"), "tolerance");
  r.verdict = j.at("verdict").get<bool>();
  for (const auto& [k, v] : j.at("constants").items()) r.constants[k] = number_from(v, k);
  return r;
}

inline json dilation_to_json(const DilationResult& d) {
  json out = matrix_to_json(d.m, d.space);
  out["structure"] = to_string(d.structure);
  out["certificates"] = constants_to_json(d.certificates);
  return out;
}

inline json jordan_to_json(const JordanSpec& s) {
  json blocks = json::array();
  for (const auto& b : s.blocks) {
    blocks.push_back({{"re", b.eigenvalue.real()}, {"im", b.eigenvalue.imag()}, {"size", b.size}});
  }
  return {{"blocks", blocks}, {"basis", s.basis ? matrix_to_json(*s.basis) : json(nullptr)}};
}

inline JordanSpec jordan_from_json(const json& j, const std::string& where = "jordan") {
  if (!j.is_object() || !j.contains("blocks") || !j["blocks"].is_array()) {
    throw InputError(where + ": expected {\"blocks\": [...]}");
  }
  JordanSpec s;
  for (std::size_t i = 0; i < j["blocks"].size(); ++i) {
    const json& b = j["blocks"][i];
    const std::string loc = where + ".blocks[" + std::to_string(i) + "]";
    if (!b.is_object() || !b.contains("size") || !b["size"].is_number_integer()) {
      throw InputError(loc + ": expected {re, im, size}");
    }
    const double re = b.contains("re") ? number_from(b["re"], loc + ".re") : 0.0;
    const double im = b.contains("im") ? number_from(b["im"], loc + ".im") : 0.0;
    if (!std::isfinite(re) || !std::isfinite(im)) throw InputError(loc + ": non-finite eigenvalue");
    s.blocks.push_back({Complex(re, im), b["size"].get<Index>()});
  }
  if (j.contains("basis") && !j["basis"].is_null()) s.basis = matrix_from_json(j["basis"], where + ".basis").m;
  return s;
}

inline json segre_to_json(const SegreCharacteristic& s) {
  return {{"sizes", s.sizes}, {"unstable", s.unstable}};
}

inline json flanders_to_json(const FlandersVerdict& v) {
  return {{"similar", v.similar},
          {"unstable", v.unstable},
          {"reason", v.reason},
          {"segre_a", segre_to_json(v.zero_a)},
          {"segre_b", segre_to_json(v.zero_b)}};
}

inline json kappa_to_json(const KappaQuery& q, const KappaResult& r) {
  json query = {{"norm", q.spec.to_string()}, {"c", q.c}, {"dims", q.dims}, {"r", q.effective_r()}};
  return {{"query", query},
          {"value", r.value},
          {"branch", to_string(r.branch)},
          {"lower_bound", r.lower_bound},
          {"diagnostics", constants_to_json(r.diagnostics)}};
}

}  // namespace ptl
