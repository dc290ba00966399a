#include "sobscale/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "sobscale/errors.hpp"

namespace sobscale {

namespace {

[[noreturn]] void bad(const std::string& context, const std::string& what) {
  throw ConfigError(context + ": " + what);
}

double get_double(const Json& j, const std::string& key, const std::string& context) {
  const auto& v = j.at(key);
  if (!v.is_number()) bad(context, "field '" + key + "' must be a number");
  return v.get<double>();
}

double get_double_or(const Json& j, const std::string& key, double fallback,
                     const std::string& context) {
  return j.contains(key) ? get_double(j, key, context) : fallback;
}

long get_int(const Json& j, const std::string& key, const std::string& context) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) bad(context, "field '" + key + "' must be an integer");
  return v.get<long>();
}

std::vector<double> get_double_array(const Json& j, const std::string& key,
                                     const std::string& context) {
  const auto& v = j.at(key);
  if (!v.is_array()) bad(context, "field '" + key + "' must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) bad(context, "field '" + key + "' must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<int> get_int_array(const Json& v, const std::string& context,
                               const std::string& what) {
  if (!v.is_array()) bad(context, what + " must be an array of integers");
  std::vector<int> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number_integer()) bad(context, what + " must contain only integers");
    out.push_back(e.get<int>());
  }
  return out;
}

}  // namespace

void expect_object(const Json& j, const std::vector<std::string>& required,
                   const std::vector<std::string>& optional, const std::string& context) {
  if (!j.is_object()) bad(context, "expected an object");
  for (const auto& item : j.items()) {
    const std::string& key = item.key();
    const bool known = std::find(required.begin(), required.end(), key) != required.end() ||
                       std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) bad(context, "unknown field '" + key + "'");
  }
  for (const auto& key : required)
    if (!j.contains(key)) bad(context, "missing required field '" + key + "'");
}

Json weight_to_json(const RoFunction& phi) {
  Json j;
  if (auto lp = phi.log_power_params()) {
    j["kind"] = "log_power";
    j["s"] = lp->s;
    j["b1"] = lp->b1;
    j["b2"] = lp->b2;
    return j;
  }
  if (auto ps = phi.power_sine_log_params()) {
    j["kind"] = "power_sine_log";
    j["s"] = ps->s;
    j["theta"] = ps->theta;
    return j;
  }
  if (auto tb = phi.tabulated_view()) {
    j["kind"] = "tabulated";
    Json t = Json::array(), p = Json::array();
    for (std::size_t i = 0; i < tb->t->size(); ++i) {
      t.push_back((*tb->t)[i]);
      p.push_back((*tb->phi)[i] * std::pow((*tb->t)[i], tb->shift));
    }
    j["t"] = std::move(t);
    j["phi"] = std::move(p);
    j["extension_exponent"] = tb->extension_exponent;
    return j;
  }
  throw ConfigError(
      "weights built from raw bounded-callable representations have no literal form");
}

RoFunction weight_from_json(const Json& j, const std::string& context) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    bad(context, "a weight literal needs a string field 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "log_power") {
    expect_object(j, {"kind", "s"}, {"b1", "b2"}, context);
    return RoFunction::log_power(get_double(j, "s", context), get_double_or(j, "b1", 0.0, context),
                                 get_double_or(j, "b2", 0.0, context));
  }
  if (kind == "power_sine_log") {
    expect_object(j, {"kind", "s", "theta"}, {}, context);
    return RoFunction::power_sine_log(get_double(j, "s", context),
                                      get_double(j, "theta", context));
  }
  if (kind == "tabulated") {
    expect_object(j, {"kind", "t", "phi"}, {"extension_exponent"}, context);
    std::optional<double> ext;
    if (j.contains("extension_exponent")) ext = get_double(j, "extension_exponent", context);
    return RoFunction::tabulated(get_double_array(j, "t", context),
                                 get_double_array(j, "phi", context), ext);
  }
  bad(context, "unsupported weight kind '" + kind +
                   "' (expected log_power, power_sine_log or tabulated)");
}

Json poly_to_json(const TrigPoly& u) {
  Json arr = Json::array();
  for (const auto& [k, c] : u.coeffs()) {
    Json e;
    e["k"] = k.k;
    e["re"] = c.real();
    e["im"] = c.imag();
    arr.push_back(std::move(e));
  }
  return arr;
}

TrigPoly poly_from_json(const Json& j, int dim, const std::string& context) {
  if (!j.is_array()) bad(context, "a trig polynomial literal is an array of coefficient entries");
  std::map<Frequency, Complex> coeffs;
  for (const auto& e : j) {
    expect_object(e, {"k"}, {"re", "im"}, context);
    std::vector<int> k = get_int_array(e.at("k"), context, "'k'");
    if (static_cast<int>(k.size()) != dim)
      bad(context, "frequency length does not match dim " + std::to_string(dim));
    const Complex c{get_double_or(e, "re", 0.0, context), get_double_or(e, "im", 0.0, context)};
    auto [it, inserted] = coeffs.emplace(Frequency{std::move(k)}, c);
    if (!inserted) bad(context, "duplicate frequency in trig polynomial literal");
  }
  return TrigPoly(dim, std::move(coeffs));
}

Json vector_to_json(const TrigVector& u) {
  Json j;
  j["dim"] = u.dim();
  Json comps = Json::array();
  for (const auto& c : u.components()) comps.push_back(poly_to_json(c));
  j["components"] = std::move(comps);
  return j;
}

TrigVector vector_from_json(const Json& j, const std::string& context) {
  expect_object(j, {"dim", "components"}, {}, context);
  const int dim = static_cast<int>(get_int(j, "dim", context));
  const auto& comps = j.at("components");
  if (!comps.is_array() || comps.empty())
    bad(context, "'components' must be a non-empty array of trig polynomial literals");
  std::vector<TrigPoly> out;
  out.reserve(comps.size());
  for (std::size_t i = 0; i < comps.size(); ++i)
    out.push_back(poly_from_json(comps[i], dim, context + ".components[" + std::to_string(i) + "]"));
  return TrigVector(std::move(out));
}

Json scalar_op_to_json(const ScalarDiffOp& L) {
  Json j;
  Json terms = Json::array();
  for (const auto& [alpha, a] : L.terms()) {
    Json t;
    t["alpha"] = alpha;
    t["coeff"] = poly_to_json(a);
    terms.push_back(std::move(t));
  }
  j["terms"] = std::move(terms);
  return j;
}

ScalarDiffOp scalar_op_from_json(const Json& j, int dim, const std::string& context) {
  expect_object(j, {"terms"}, {}, context);
  const auto& terms = j.at("terms");
  if (!terms.is_array()) bad(context, "'terms' must be an array");
  ScalarDiffOp L(dim);
  for (const auto& t : terms) {
    expect_object(t, {"alpha", "coeff"}, {}, context);
    std::vector<int> alpha = get_int_array(t.at("alpha"), context, "'alpha'");
    if (static_cast<int>(alpha.size()) != dim)
      bad(context, "'alpha' length does not match dim " + std::to_string(dim));
    for (int a : alpha)
      if (a < 0) bad(context, "'alpha' entries must be >= 0");
    L = L + ScalarDiffOp::term(std::move(alpha), poly_from_json(t.at("coeff"), dim, context));
  }
  return L;
}

Json operator_to_json(const MatrixDiffOp& A) {
  Json j;
  j["p"] = A.p();
  j["dim"] = A.dim();
  Json rows = Json::array();
  for (int r = 0; r < A.p(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < A.p(); ++c) row.push_back(scalar_op_to_json(A.entry(r, c)));
    rows.push_back(std::move(row));
  }
  j["entries"] = std::move(rows);
  return j;
}

MatrixDiffOp operator_from_json(const Json& j, const std::string& context) {
  expect_object(j, {"p", "dim", "entries"}, {}, context);
  const int p = static_cast<int>(get_int(j, "p", context));
  const int dim = static_cast<int>(get_int(j, "dim", context));
  if (p < 2) bad(context, "'p' must be >= 2");
  if (dim != 1 && dim != 2) bad(context, "'dim' must be 1 or 2");
  const auto& rows = j.at("entries");
  if (!rows.is_array() || static_cast<int>(rows.size()) != p)
    bad(context, "'entries' must be an array of " + std::to_string(p) + " rows");
  std::vector<ScalarDiffOp> entries;
  entries.reserve(static_cast<std::size_t>(p) * p);
  for (int r = 0; r < p; ++r) {
    const auto& row = rows[r];
    if (!row.is_array() || static_cast<int>(row.size()) != p)
      bad(context, "row " + std::to_string(r) + " must have " + std::to_string(p) + " entries");
    for (int c = 0; c < p; ++c)
      entries.push_back(scalar_op_from_json(
          row[c], dim, context + ".entries[" + std::to_string(r) + "][" + std::to_string(c) + "]"));
  }
  return MatrixDiffOp(p, dim, std::move(entries));
}

std::string verdict_name(ExperimentVerdict v) {
  switch (v) {
    case ExperimentVerdict::Pass: return "pass";
    case ExperimentVerdict::Fail: return "fail";
    default: return "inconclusive";
  }
}

Json report_to_json(const ExperimentReport& rep) {
  Json j;
  j["name"] = rep.name;
  j["verdict"] = verdict_name(rep.verdict);
  Json params = Json::array();
  for (const auto& [key, value] : rep.parameters) params.push_back(Json::array({key, value}));
  j["parameters"] = std::move(params);
  Json constants = Json::object();
  for (const auto& [key, value] : rep.constants) constants[key] = value;
  j["constants"] = std::move(constants);
  j["note"] = rep.note;
  Json obs = Json::array();
  for (const auto& o : rep.observations) {
    Json e;
    e["bandwidth"] = o.bandwidth;
    e["sample"] = o.sample;
    e["value"] = o.value;
    obs.push_back(std::move(e));
  }
  j["observations"] = std::move(obs);
  return j;
}

std::string report_csv(const ExperimentReport& rep) {
  std::string out = "bandwidth,sample,value\n";
  for (const auto& o : rep.observations) {
    out += std::to_string(o.bandwidth);
    out += ',';
    out += std::to_string(o.sample);
    out += ',';
    out += Json(o.value).dump();  // shortest round-trip decimal form
    out += '\n';
  }
  return out;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace sobscale
