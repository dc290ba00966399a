#include "sobscale/driver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "sobscale/errors.hpp"
#include "sobscale/io.hpp"

namespace sobscale {

namespace {

// ---------------------------------------------------------------------------
// Config plumbing

struct Globals {
  int dim = 1;
  std::optional<RoFunction> weight;
  std::uint64_t seed = 20240405;
  ExperimentOptions exp;            // plateau/identity tolerances + integral opts
  double compat_tol = 1e-8;         // solver tolerances
  double rank_rel_tol = 1e-8;
  Json tolerances_resolved = Json::object();
};

double json_number(const Json& j, const std::string& key, const std::string& ctx) {
  if (!j.at(key).is_number()) throw ConfigError(ctx + ": field '" + key + "' must be a number");
  return j.at(key).get<double>();
}

long json_integer(const Json& j, const std::string& key, const std::string& ctx) {
  if (!j.at(key).is_number_integer())
    throw ConfigError(ctx + ": field '" + key + "' must be an integer");
  return j.at(key).get<long>();
}

int json_int_or(const Json& j, const std::string& key, int fallback, const std::string& ctx) {
  return j.contains(key) ? static_cast<int>(json_integer(j, key, ctx)) : fallback;
}

double json_number_or(const Json& j, const std::string& key, double fallback,
                      const std::string& ctx) {
  return j.contains(key) ? json_number(j, key, ctx) : fallback;
}

std::vector<int> json_schedule_or(const Json& j, const std::string& key,
                                  std::vector<int> fallback, const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array()) throw ConfigError(ctx + ": field '" + key + "' must be an integer array");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer())
      throw ConfigError(ctx + ": field '" + key + "' must contain only integers");
    out.push_back(e.get<int>());
  }
  return out;
}

Json schedule_json(const std::vector<int>& schedule) {
  Json out = Json::array();
  for (int b : schedule) out.push_back(b);
  return out;
}

/// Applies tolerance defaults, config values, then command-line overrides.
void apply_tolerances(Globals& g, const Json& config,
                      const std::vector<std::pair<std::string, double>>& overrides) {
  double plateau = g.exp.plateau_tol, identity = g.exp.identity_tol;
  double slack = g.exp.inequality_slack, compat = g.compat_tol, rank = g.rank_rel_tol;
  double int_rel = g.exp.integral.rel_tol, horizon = g.exp.integral.horizon;
  const std::string ctx = "tolerances";
  if (config.contains("tolerances")) {
    const Json& t = config.at("tolerances");
    expect_object(t,
                  {},
                  {"plateau_tol", "identity_tol", "inequality_slack", "compat_tol",
                   "rank_rel_tol", "integral_rel_tol", "integral_horizon"},
                  ctx);
    plateau = json_number_or(t, "plateau_tol", plateau, ctx);
    identity = json_number_or(t, "identity_tol", identity, ctx);
    slack = json_number_or(t, "inequality_slack", slack, ctx);
    compat = json_number_or(t, "compat_tol", compat, ctx);
    rank = json_number_or(t, "rank_rel_tol", rank, ctx);
    int_rel = json_number_or(t, "integral_rel_tol", int_rel, ctx);
    horizon = json_number_or(t, "integral_horizon", horizon, ctx);
  }
  for (const auto& [key, value] : overrides) {
    if (key == "plateau_tol") plateau = value;
    else if (key == "identity_tol") identity = value;
    else if (key == "inequality_slack") slack = value;
    else if (key == "compat_tol") compat = value;
    else if (key == "rank_rel_tol") rank = value;
    else if (key == "integral_rel_tol") int_rel = value;
    else if (key == "integral_horizon") horizon = value;
    else throw ConfigError("unknown tolerance override '" + key + "'");
  }
  g.exp.plateau_tol = plateau;
  g.exp.identity_tol = identity;
  g.exp.inequality_slack = slack;
  g.exp.integral.rel_tol = int_rel;
  g.exp.integral.horizon = horizon;
  g.compat_tol = compat;
  g.rank_rel_tol = rank;
  g.tolerances_resolved = {{"plateau_tol", plateau},
                           {"identity_tol", identity},
                           {"inequality_slack", slack},
                           {"compat_tol", compat},
                           {"rank_rel_tol", rank},
                           {"integral_rel_tol", int_rel},
                           {"integral_horizon", horizon}};
}

RoFunction resolve_weight(const Json& section, const Globals& g, const std::string& ctx,
                          Json& resolved) {
  if (section.contains("weight")) {
    RoFunction w = weight_from_json(section.at("weight"), ctx + ".weight");
    resolved["weight"] = weight_to_json(w);
    return w;
  }
  if (g.weight) {
    resolved["weight"] = weight_to_json(*g.weight);
    return *g.weight;
  }
  throw ConfigError(ctx + ": no weight given (add 'weight' in this section or at the top level)");
}

std::uint64_t resolve_seed(const Json& section, const Globals& g, const std::string& ctx,
                           Json& resolved) {
  std::uint64_t seed = g.seed;
  if (section.contains("seed")) {
    if (!section.at("seed").is_number_integer())
      throw ConfigError(ctx + ": field 'seed' must be an integer");
    seed = section.at("seed").get<std::uint64_t>();
  }
  resolved["seed"] = seed;
  return seed;
}

MatrixDiffOp resolve_operator(const Json& section, const std::string& ctx, const Globals& g,
                              Json& resolved) {
  const MatrixDiffOp A = operator_from_json(section.at("operator"), ctx + ".operator");
  if (A.dim() != g.dim)
    throw ConfigError(ctx + ": operator dim " + std::to_string(A.dim()) +
                      " does not match the config dim " + std::to_string(g.dim));
  resolved["operator"] = operator_to_json(A);
  return A;
}

// ---------------------------------------------------------------------------
// Task outcomes

struct TaskOutcome {
  ExperimentReport rep;
  Json extra = Json::object();  // merged into the report document
};

using Task = std::function<TaskOutcome()>;

/// Converts solver failures into failure reports so one bad experiment does
/// not abort the whole run; the incompatibility witness is preserved.
Task guarded(std::string name, std::function<TaskOutcome()> body) {
  return [name = std::move(name), body = std::move(body)]() -> TaskOutcome {
    try {
      return body();
    } catch (const IncompatibleDataError& e) {
      TaskOutcome out;
      out.rep.name = name;
      out.rep.verdict = ExperimentVerdict::Fail;
      out.rep.note = e.what();
      out.rep.constants["cokernel_overlap"] = e.overlap();
      out.extra["violated_cokernel_vector"] = vector_to_json(e.witness());
      return out;
    } catch (const Error& e) {
      TaskOutcome out;
      out.rep.name = name;
      out.rep.verdict = ExperimentVerdict::Fail;
      out.rep.note = e.what();
      return out;
    }
  };
}

std::string timestamp_utc() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// Section handlers. Each parses strictly, builds the resolved section (all
// defaults filled in), and returns the computation as a deferred task.

struct Handler {
  Json resolved = Json::object();
  Task task;
};

Handler handle_check_ellipticity(const Json& s, const std::string& ctx, const Globals& g) {
  expect_object(s, {"operator"}, {"x_grid", "sphere_grid", "tol"}, ctx);
  Handler h;
  const MatrixDiffOp A = resolve_operator(s, ctx, g, h.resolved);
  EllipticityOptions opt;
  opt.x_grid = json_int_or(s, "x_grid", opt.x_grid, ctx);
  opt.sphere_grid = json_int_or(s, "sphere_grid", opt.sphere_grid, ctx);
  opt.tol = json_number_or(s, "tol", opt.tol, ctx);
  h.resolved["x_grid"] = opt.x_grid;
  h.resolved["sphere_grid"] = opt.sphere_grid;
  h.resolved["tol"] = opt.tol;
  h.task = guarded("check_ellipticity", [A, opt]() {
    TaskOutcome out;
    const EllipticityResult r = ellipticity_check(A, opt);
    out.rep.name = "check_ellipticity";
    out.rep.parameters = {{"p", std::to_string(A.p())}, {"dim", std::to_string(A.dim())}};
    out.rep.constants["min_abs_det"] = r.min_abs_det;
    out.rep.verdict = r.elliptic ? ExperimentVerdict::Pass : ExperimentVerdict::Fail;
    out.rep.note = r.elliptic
                       ? "principal symbol determinant bounded away from zero on the grid"
                       : "principal symbol determinant vanishes (or nearly) at a grid point";
    return out;
  });
  return h;
}

Handler handle_fredholm(const Json& s, const std::string& ctx, const Globals& g) {
  expect_object(s, {"operator"}, {"user_radius", "certified_cap"}, ctx);
  Handler h;
  const MatrixDiffOp A = resolve_operator(s, ctx, g, h.resolved);
  SingularScanOptions opt;
  opt.rank_rel_tol = g.rank_rel_tol;
  opt.user_radius = json_int_or(s, "user_radius", opt.user_radius, ctx);
  opt.certified_cap = json_int_or(s, "certified_cap", opt.certified_cap, ctx);
  h.resolved["user_radius"] = opt.user_radius;
  h.resolved["certified_cap"] = opt.certified_cap;
  h.task = guarded("fredholm", [A, opt]() {
    TaskOutcome out;
    const FredholmReport fr = kernel_cokernel(A, opt);
    out.rep.name = "fredholm";
    out.rep.parameters = {{"p", std::to_string(A.p())}, {"dim", std::to_string(A.dim())}};
    out.rep.constants["kernel_dim"] = static_cast<double>(fr.kernel_basis.size());
    out.rep.constants["cokernel_dim"] = static_cast<double>(fr.cokernel_basis.size());
    out.rep.constants["index"] = static_cast<double>(fr.index);
    out.rep.constants["scan_radius"] = static_cast<double>(fr.scan_radius);
    const bool exact = fr.guarantee == ScanGuarantee::Exact;
    out.rep.verdict = exact ? ExperimentVerdict::Pass : ExperimentVerdict::Inconclusive;
    out.rep.note = exact ? "singular-frequency scan radius is certified; dimensions are exact"
                         : "scan stopped at the heuristic radius; dimensions are lower bounds";
    Json singulars = Json::array();
    for (const auto& [k, nullity] : fr.singular_frequencies)
      singulars.push_back({{"k", k.k}, {"nullity", nullity}});
    out.extra["singular_frequencies"] = std::move(singulars);
    Json kernel = Json::array(), cokernel = Json::array();
    for (const auto& v : fr.kernel_basis) kernel.push_back(vector_to_json(v));
    for (const auto& v : fr.cokernel_basis) cokernel.push_back(vector_to_json(v));
    out.extra["kernel_basis"] = std::move(kernel);
    out.extra["cokernel_basis"] = std::move(cokernel);
    return out;
  });
  return h;
}

Handler handle_solve(const Json& s, const std::string& ctx, const Globals& g) {
  expect_object(s, {"operator", "rhs"}, {"weight", "mode", "K", "max_rows"}, ctx);
  Handler h;
  const MatrixDiffOp A = resolve_operator(s, ctx, g, h.resolved);
  const TrigVector f = vector_from_json(s.at("rhs"), ctx + ".rhs");
  if (f.dim() != g.dim || f.p() != A.p())
    throw ConfigError(ctx + ": rhs shape does not match the operator");
  h.resolved["rhs"] = vector_to_json(f);
  const RoFunction phi = resolve_weight(s, g, ctx, h.resolved);
  std::string mode = "auto";
  if (s.contains("mode")) {
    if (!s.at("mode").is_string()) throw ConfigError(ctx + ": 'mode' must be a string");
    mode = s.at("mode").get<std::string>();
  }
  if (mode == "auto") mode = A.constant_coefficients() ? "const" : "galerkin";
  if (mode != "const" && mode != "galerkin")
    throw ConfigError(ctx + ": 'mode' must be auto, const or galerkin");
  const int K = json_int_or(s, "K", 16, ctx);
  const long max_rows = json_int_or(s, "max_rows", 20000, ctx);
  h.resolved["mode"] = mode;
  if (mode == "galerkin") {
    h.resolved["K"] = K;
    h.resolved["max_rows"] = max_rows;
  }

  if (mode == "const") {
    SolveOptions opt;
    opt.compat_tol = g.compat_tol;
    opt.rank_rel_tol = g.rank_rel_tol;
    h.task = guarded("solve", [A, f, phi, opt]() {
      TaskOutcome out;
      const SolveResult r = solve_const(A, f, phi, opt);
      out.rep.name = "solve";
      out.rep.parameters = {{"p", std::to_string(A.p())},
                            {"dim", std::to_string(A.dim())},
                            {"phi", describe(phi)},
                            {"mode", "const"}};
      out.rep.constants["residual"] = r.residual;
      out.rep.constants["compatibility_violation"] = r.compatibility_violation;
      out.rep.constants["projected"] = r.projected ? 1.0 : 0.0;
      out.rep.verdict = ExperimentVerdict::Pass;
      out.rep.note = r.projected
                         ? "solved; singular frequencies handled by the minimum-norm rule"
                         : "solved frequency by frequency";
      out.extra["solution"] = vector_to_json(r.u);
      return out;
    });
  } else {
    GalerkinOptions opt;
    opt.compat_tol = g.compat_tol;
    opt.rank_rel_tol = g.rank_rel_tol;
    opt.max_rows = max_rows;
    opt.residual_phi = phi;
    h.task = guarded("solve", [A, f, phi, K, opt]() {
      TaskOutcome out;
      const GalerkinResult r = solve_galerkin(A, f, K, opt);
      out.rep.name = "solve";
      out.rep.parameters = {{"p", std::to_string(A.p())},
                            {"dim", std::to_string(A.dim())},
                            {"phi", describe(phi)},
                            {"mode", "galerkin"},
                            {"K", std::to_string(K)}};
      out.rep.constants["residual"] = r.result.residual;
      out.rep.constants["compatibility_violation"] = r.result.compatibility_violation;
      out.rep.constants["numerical_kernel_dim"] = static_cast<double>(r.numerical_kernel_dim);
      out.rep.constants["numerical_cokernel_dim"] =
          static_cast<double>(r.numerical_cokernel_dim);
      out.rep.constants["two_path_gap"] = r.two_path_gap;
      out.rep.verdict = ExperimentVerdict::Pass;
      out.rep.note = "least-squares solve on the truncated trigonometric basis";
      out.extra["solution"] = vector_to_json(r.result.u);
      return out;
    });
  }
  return h;
}

Handler handle_apriori(const Json& s, const std::string& ctx, const Globals& g) {
  expect_object(s, {"operator", "sigma"}, {"samples", "schedule", "weight", "seed"}, ctx);
  Handler h;
  const MatrixDiffOp A = resolve_operator(s, ctx, g, h.resolved);
  const double sigma = json_number(s, "sigma", ctx);
  const int samples = json_int_or(s, "samples", 8, ctx);
  const std::vector<int> schedule = json_schedule_or(s, "schedule", {8, 16, 32, 64}, ctx);
  const RoFunction phi = resolve_weight(s, g, ctx, h.resolved);
  ExperimentOptions opt = g.exp;
  opt.seed = resolve_seed(s, g, ctx, h.resolved);
  h.resolved["sigma"] = sigma;
  h.resolved["samples"] = samples;
  h.resolved["schedule"] = schedule_json(schedule);
  h.task = guarded("apriori", [A, phi, sigma, samples, schedule, opt]() {
    return TaskOutcome{apriori_experiment(A, phi, sigma, samples, schedule, opt)};
  });
  return h;
}

Handler handle_regularity(const Json& s, const std::string& ctx, const Globals& g) {
  expect_object(s, {"operator"}, {"samples", "schedule", "weight", "seed", "cutoff", "vector"},
                ctx);
  Handler h;
  const MatrixDiffOp A = resolve_operator(s, ctx, g, h.resolved);
  const RoFunction phi = resolve_weight(s, g, ctx, h.resolved);
  if (s.contains("cutoff") || s.contains("vector")) {
    if (!(s.contains("cutoff") && s.contains("vector")))
      throw ConfigError(ctx + ": the local diagnostic needs both 'cutoff' and 'vector'");
    const TrigPoly chi = poly_from_json(s.at("cutoff"), g.dim, ctx + ".cutoff");
    const TrigVector u = vector_from_json(s.at("vector"), ctx + ".vector");
    h.resolved["cutoff"] = poly_to_json(chi);
    h.resolved["vector"] = vector_to_json(u);
    h.task = guarded("local_regularity",
                     [A, phi, chi, u]() { return TaskOutcome{local_regularity_diagnostic(A, phi, chi, u)}; });
    return h;
  }
  const int samples = json_int_or(s, "samples", 4, ctx);
  const std::vector<int> schedule = json_schedule_or(s, "schedule", {8, 16, 32, 64}, ctx);
  ExperimentOptions opt = g.exp;
  opt.seed = resolve_seed(s, g, ctx, h.resolved);
  h.resolved["samples"] = samples;
  h.resolved["schedule"] = schedule_json(schedule);
  h.task = guarded("regularity_lift", [A, phi, samples, schedule, opt]() {
    return TaskOutcome{regularity_lift_experiment(A, phi, samples, schedule, opt)};
  });
  return h;
}

Handler handle_continuity(const Json& s, const std::string& ctx, const Globals& g) {
  expect_object(s, {"operator", "r", "component"}, {"samples", "bandwidth", "weight", "seed"},
                ctx);
  Handler h;
  const MatrixDiffOp A = resolve_operator(s, ctx, g, h.resolved);
  const int r = static_cast<int>(json_integer(s, "r", ctx));
  const int component = static_cast<int>(json_integer(s, "component", ctx));
  const int samples = json_int_or(s, "samples", 25, ctx);
  const RoFunction phi = resolve_weight(s, g, ctx, h.resolved);
  ExperimentOptions opt = g.exp;
  opt.bandwidth = json_int_or(s, "bandwidth", opt.bandwidth, ctx);
  opt.seed = resolve_seed(s, g, ctx, h.resolved);
  h.resolved["r"] = r;
  h.resolved["component"] = component;
  h.resolved["samples"] = samples;
  h.resolved["bandwidth"] = opt.bandwidth;
  h.task = guarded("continuity", [A, phi, r, component, samples, opt]() {
    return TaskOutcome{continuity_experiment(A, phi, r, component, samples, opt)};
  });
  return h;
}

Handler handle_classical(const Json& s, const std::string& ctx, const Globals& g) {
  expect_object(s, {"operator"}, {"samples", "bandwidth", "weight", "seed"}, ctx);
  Handler h;
  const MatrixDiffOp A = resolve_operator(s, ctx, g, h.resolved);
  const int samples = json_int_or(s, "samples", 25, ctx);
  const RoFunction phi = resolve_weight(s, g, ctx, h.resolved);
  ExperimentOptions opt = g.exp;
  opt.bandwidth = json_int_or(s, "bandwidth", opt.bandwidth, ctx);
  opt.seed = resolve_seed(s, g, ctx, h.resolved);
  h.resolved["samples"] = samples;
  h.resolved["bandwidth"] = opt.bandwidth;
  h.task = guarded("classical_solution", [A, phi, samples, opt]() {
    return TaskOutcome{classical_solution_check(A, phi, samples, opt)};
  });
  return h;
}

Handler handle_interp_check(const Json& s, const std::string& ctx, const Globals& g) {
  expect_object(s, {"s0", "s1"}, {"samples", "bandwidth", "weight", "seed"}, ctx);
  Handler h;
  const double s0 = json_number(s, "s0", ctx);
  const double s1 = json_number(s, "s1", ctx);
  const int samples = json_int_or(s, "samples", 100, ctx);
  const RoFunction phi = resolve_weight(s, g, ctx, h.resolved);
  ExperimentOptions opt = g.exp;
  opt.bandwidth = json_int_or(s, "bandwidth", opt.bandwidth, ctx);
  opt.seed = resolve_seed(s, g, ctx, h.resolved);
  const int dim = g.dim;
  h.resolved["s0"] = s0;
  h.resolved["s1"] = s1;
  h.resolved["samples"] = samples;
  h.resolved["bandwidth"] = opt.bandwidth;
  h.task = guarded("interpolation_identity", [phi, s0, s1, dim, samples, opt]() {
    return TaskOutcome{interpolation_identity_check(phi, s0, s1, dim, samples, opt)};
  });
  return h;
}

Handler handle_embedding(const Json& s, const std::string& ctx, const Globals& g) {
  expect_object(s, {}, {"s0", "s1", "samples", "bandwidth", "r", "m", "other", "weight", "seed", "t_max"},
                ctx);
  const bool chain = s.contains("s0") || s.contains("s1");
  const bool integral = s.contains("r") || s.contains("m");
  const bool comparison = s.contains("other");
  if (chain + integral + comparison != 1)
    throw ConfigError(ctx +
                      ": give exactly one of {s0,s1} (norm chain), {r,m} (convergence "
                      "decision) or {other} (weight comparison)");
  Handler h;
  const RoFunction phi = resolve_weight(s, g, ctx, h.resolved);

  if (chain) {
    if (!(s.contains("s0") && s.contains("s1")))
      throw ConfigError(ctx + ": the norm chain needs both 's0' and 's1'");
    const double s0 = json_number(s, "s0", ctx);
    const double s1 = json_number(s, "s1", ctx);
    const int samples = json_int_or(s, "samples", 100, ctx);
    ExperimentOptions opt = g.exp;
    opt.bandwidth = json_int_or(s, "bandwidth", opt.bandwidth, ctx);
    opt.seed = resolve_seed(s, g, ctx, h.resolved);
    const int dim = g.dim;
    h.resolved["s0"] = s0;
    h.resolved["s1"] = s1;
    h.resolved["samples"] = samples;
    h.resolved["bandwidth"] = opt.bandwidth;
    h.task = guarded("embedding_chain", [phi, s0, s1, dim, samples, opt]() {
      return TaskOutcome{embedding_chain_check(phi, s0, s1, dim, samples, opt)};
    });
    return h;
  }

  if (integral) {
    if (!(s.contains("r") && s.contains("m")))
      throw ConfigError(ctx + ": the convergence decision needs both 'r' and 'm'");
    const double r = json_number(s, "r", ctx);
    const double m = json_number(s, "m", ctx);
    const int dim = g.dim;
    EmbeddingIntegralOptions opt = g.exp.integral;
    h.resolved["r"] = r;
    h.resolved["m"] = m;
    h.task = guarded("embedding_integral", [phi, r, m, dim, opt]() {
      TaskOutcome out;
      const ConvergenceDecision d = embedding_integral(phi, r, dim, m, opt);
      out.rep.name = "embedding_integral";
      out.rep.parameters = {{"phi", describe(phi)},
                            {"r", std::to_string(r)},
                            {"m", std::to_string(m)},
                            {"dim", std::to_string(dim)}};
      const char* verdict_str = d.verdict == ConvergenceDecision::Verdict::Converges
                                    ? "converges"
                                    : d.verdict == ConvergenceDecision::Verdict::Diverges
                                          ? "diverges"
                                          : "inconclusive";
      const char* method_str = d.decided_by == ConvergenceDecision::Method::IndexCriterion
                                   ? "index criterion"
                                   : d.decided_by == ConvergenceDecision::Method::ClosedForm
                                         ? "closed form"
                                         : "quadrature";
      out.rep.verdict = d.verdict == ConvergenceDecision::Verdict::Converges
                            ? ExperimentVerdict::Pass
                            : d.verdict == ConvergenceDecision::Verdict::Diverges
                                  ? ExperimentVerdict::Fail
                                  : ExperimentVerdict::Inconclusive;
      out.rep.note = std::string("integral ") + verdict_str + " (decided by " + method_str +
                     "); " + d.detail +
                     "; a fail verdict here means the embedding hypothesis does not hold";
      if (d.value_estimate) out.rep.constants["value_estimate"] = *d.value_estimate;
      Json partials = Json::array();
      for (const auto& [log10_T, value] : d.partial_sums)
        partials.push_back(Json::array({log10_T, value}));
      out.extra["partial_integrals"] = std::move(partials);
      out.extra["decision"] = verdict_str;
      return out;
    });
    return h;
  }

  // Weight comparison phi1 -> phi.
  const RoFunction other = weight_from_json(s.at("other"), ctx + ".other");
  const double t_max = json_number_or(s, "t_max", 1e8, ctx);
  h.resolved["other"] = weight_to_json(other);
  h.resolved["t_max"] = t_max;
  h.task = guarded("embedding_compare", [phi, other, t_max]() {
    TaskOutcome out;
    const CompareResult r = compare(phi, other, t_max);
    out.rep.name = "embedding_compare";
    out.rep.parameters = {{"phi", describe(phi)}, {"other", describe(other)}};
    const char* rel = r.relation == EmbeddingRelation::CompactEmbedding
                          ? "compact"
                          : r.relation == EmbeddingRelation::ContinuousEmbedding
                                ? "continuous"
                                : r.relation == EmbeddingRelation::None ? "none" : "inconclusive";
    out.rep.verdict = r.relation == EmbeddingRelation::Inconclusive
                          ? ExperimentVerdict::Inconclusive
                          : ExperimentVerdict::Pass;
    out.rep.note = std::string("relation of the 'other'-weighted space into the phi-weighted "
                               "space: ") +
                   rel + "; " + r.evidence;
    out.extra["relation"] = rel;
    return out;
  });
  return h;
}

Handler handle_lemma41(const Json& s, const std::string& ctx, const Globals& g) {
  expect_object(s, {"scalar_operator"}, {"samples", "schedule", "weight", "seed"}, ctx);
  Handler h;
  const ScalarDiffOp L = scalar_op_from_json(s.at("scalar_operator"), g.dim, ctx + ".scalar_operator");
  h.resolved["scalar_operator"] = scalar_op_to_json(L);
  const int samples = json_int_or(s, "samples", 8, ctx);
  const std::vector<int> schedule = json_schedule_or(s, "schedule", {8, 16, 32, 64}, ctx);
  const RoFunction phi = resolve_weight(s, g, ctx, h.resolved);
  ExperimentOptions opt = g.exp;
  opt.seed = resolve_seed(s, g, ctx, h.resolved);
  h.resolved["samples"] = samples;
  h.resolved["schedule"] = schedule_json(schedule);
  h.task = guarded("lemma41", [L, phi, samples, schedule, opt]() {
    return TaskOutcome{lemma41_check(L, phi, samples, schedule, opt)};
  });
  return h;
}

Handler handle_ro_info(const Json& s, const std::string& ctx, const Globals& g) {
  expect_object(s, {}, {"weight", "a", "t_max", "s0", "s1"}, ctx);
  Handler h;
  const RoFunction phi = resolve_weight(s, g, ctx, h.resolved);
  const double a = json_number_or(s, "a", 2.0, ctx);
  const double t_max = json_number_or(s, "t_max", 1e6, ctx);
  std::optional<std::pair<double, double>> bracket;
  if (s.contains("s0") || s.contains("s1")) {
    if (!(s.contains("s0") && s.contains("s1")))
      throw ConfigError(ctx + ": the interpolation preview needs both 's0' and 's1'");
    bracket = {json_number(s, "s0", ctx), json_number(s, "s1", ctx)};
    h.resolved["s0"] = bracket->first;
    h.resolved["s1"] = bracket->second;
  }
  h.resolved["a"] = a;
  h.resolved["t_max"] = t_max;
  h.task = guarded("ro_info", [phi, a, t_max, bracket]() {
    TaskOutcome out;
    out.rep.name = "ro_info";
    out.rep.parameters = {{"phi", describe(phi)}};
    const MatuszewskaIndices mi = matuszewska(phi);
    const RoCheckResult rc = ro_check(phi, a, t_max);
    out.rep.constants["sigma0"] = mi.sigma0;
    out.rep.constants["sigma1"] = mi.sigma1;
    out.rep.constants["half_width"] = mi.half_width;
    out.rep.constants["dilation_constant"] = rc.c_estimate;
    std::ostringstream note;
    note << "sigma0 = " << mi.sigma0 << ", sigma1 = " << mi.sigma1 << " ("
         << (mi.method == MatuszewskaIndices::Method::Exact ? "exact" : "estimated")
         << ", half-width " << mi.half_width << "); dilation constant over [1," << a
         << "] up to t = " << t_max << ": " << rc.c_estimate;
    if (bracket) {
      const InterpolationParameter psi = interpolation_parameter(phi, bracket->first, bracket->second);
      const double defect = pseudoconcavity_check(psi);
      out.rep.constants["pseudoconcavity_defect"] = defect;
      note << "; pseudoconcavity defect of the interpolation parameter: " << defect;
    }
    out.rep.verdict = rc.ok ? ExperimentVerdict::Pass : ExperimentVerdict::Fail;
    out.rep.note = note.str();
    return out;
  });
  return h;
}

using HandlerFn = Handler (*)(const Json&, const std::string&, const Globals&);

struct SubcommandSpec {
  const char* name;
  const char* section;
  HandlerFn handler;
};

const SubcommandSpec kSubcommands[] = {
    {"check-ellipticity", "check_ellipticity", handle_check_ellipticity},
    {"fredholm", "fredholm", handle_fredholm},
    {"solve", "solve", handle_solve},
    {"apriori", "apriori", handle_apriori},
    {"regularity", "regularity", handle_regularity},
    {"continuity", "continuity", handle_continuity},
    {"classical", "classical", handle_classical},
    {"interp-check", "interp_check", handle_interp_check},
    {"embedding", "embedding", handle_embedding},
    {"lemma41", "lemma41", handle_lemma41},
    {"ro-info", "ro_info", handle_ro_info},
};

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& sc : kSubcommands) out.emplace_back(sc.name);
    return out;
  }();
  return names;
}

int run(const RunOptions& options) {
  try {
    const SubcommandSpec* spec = nullptr;
    for (const auto& sc : kSubcommands)
      if (options.subcommand == sc.name) spec = &sc;
    if (!spec) throw ConfigError("unknown subcommand '" + options.subcommand + "'");

    std::ifstream in(options.config_path);
    if (!in) throw ConfigError("cannot open config file " + options.config_path);
    Json config;
    try {
      config = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    // Top level: globals plus one section (object or array) per subcommand.
    std::vector<std::string> top_optional = {"dim", "weight", "seed", "tolerances"};
    for (const auto& sc : kSubcommands) top_optional.emplace_back(sc.section);
    expect_object(config, {}, top_optional, "config");

    Globals g;
    if (config.contains("dim")) {
      g.dim = static_cast<int>(json_integer(config, "dim", "config"));
      if (g.dim != 1 && g.dim != 2) throw ConfigError("config: 'dim' must be 1 or 2");
    }
    if (config.contains("weight"))
      g.weight = weight_from_json(config.at("weight"), "config.weight");
    if (config.contains("seed")) {
      if (!config.at("seed").is_number_integer())
        throw ConfigError("config: 'seed' must be an integer");
      g.seed = config.at("seed").get<std::uint64_t>();
    }
    if (options.seed) g.seed = *options.seed;
    apply_tolerances(g, config, options.tolerances);

    if (!config.contains(spec->section))
      throw ConfigError("config: missing section '" + std::string(spec->section) +
                        "' required by subcommand " + std::string(spec->name));
    const Json& section = config.at(spec->section);
    std::vector<Json> entries;
    if (section.is_array()) {
      if (section.empty())
        throw ConfigError("config: section '" + std::string(spec->section) + "' is empty");
      for (const auto& e : section) entries.push_back(e);
    } else {
      entries.push_back(section);
    }

    std::vector<Handler> handlers;
    handlers.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      std::string ctx = std::string(spec->section);
      if (section.is_array()) ctx += "[" + std::to_string(i) + "]";
      handlers.push_back(spec->handler(entries[i], ctx, g));
    }

    // Run experiments, possibly in parallel; results keep config order.
    std::vector<TaskOutcome> outcomes(handlers.size(), TaskOutcome{});
    std::vector<std::exception_ptr> failures(handlers.size());
    const int jobs = std::clamp(options.jobs, 1, 64);
    if (jobs <= 1 || handlers.size() <= 1) {
      for (std::size_t i = 0; i < handlers.size(); ++i) {
        try {
          outcomes[i] = handlers[i].task();
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    } else {
      std::atomic<std::size_t> next{0};
      auto worker = [&]() {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= handlers.size()) return;
          try {
            outcomes[i] = handlers[i].task();
          } catch (...) {
            failures[i] = std::current_exception();
          }
        }
      };
      std::vector<std::thread> pool;
      const int n_threads = std::min<std::size_t>(jobs, handlers.size());
      pool.reserve(n_threads);
      for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    for (const auto& failure : failures)
      if (failure) std::rethrow_exception(failure);

    // Emit one JSON + one CSV per experiment, atomically, in config order.
    const std::filesystem::path out_dir = options.out_dir;
    std::filesystem::create_directories(out_dir);
    bool any_fail = false, any_inconclusive = false;
    const std::string stamp = timestamp_utc();
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const ExperimentReport& rep = outcomes[i].rep;
      Json doc = report_to_json(rep);
      for (const auto& item : outcomes[i].extra.items()) doc[item.key()] = item.value();
      Json cfg;
      cfg["subcommand"] = options.subcommand;
      cfg["dim"] = g.dim;
      cfg["seed"] = g.seed;
      cfg["tolerances"] = g.tolerances_resolved;
      cfg["section"] = handlers[i].resolved;
      doc["config"] = std::move(cfg);
      doc["timestamp"] = stamp;
      doc["determinism"] =
          "all fields are reproducible from config + seed except 'timestamp'";
      std::string base = rep.name;
      if (outcomes.size() > 1) base += "_" + std::to_string(i);
      write_text_atomic(out_dir / (base + ".json"), doc.dump(2) + "\n");
      write_text_atomic(out_dir / (base + ".csv"), report_csv(rep));
      if (rep.verdict == ExperimentVerdict::Fail) any_fail = true;
      if (rep.verdict == ExperimentVerdict::Inconclusive) any_inconclusive = true;
      std::cout << "[" << verdict_name(rep.verdict) << "] " << rep.name << ": " << rep.note
                << " -> " << (out_dir / (base + ".json")).string() << "\n";
    }
    return any_fail ? 2 : any_inconclusive ? 3 : 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace sobscale
