#include "sobscale/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "sobscale/errors.hpp"
#include "sobscale/quadrature.hpp"

namespace sobscale {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string fmt_schedule(const std::vector<int>& schedule) {
  std::ostringstream os;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (i) os << ",";
    os << schedule[i];
  }
  return os.str();
}

std::string fmt_orders(const std::vector<int>& m) { return fmt_schedule(m); }

void require_schedule(const std::vector<int>& schedule) {
  if (schedule.empty()) throw DomainError("bandwidth schedule must not be empty");
  for (int b : schedule)
    if (b < 1) throw DomainError("bandwidth schedule entries must be >= 1");
}

void require_samples(int samples) {
  if (samples < 1) throw DomainError("need at least one sample");
}

/// Dyadic shell index: s with 2^s <= t < 2^{s+1} (t >= 1 always here).
int shell_index(double t) { return static_cast<int>(std::floor(std::log2(std::max(t, 1.0)))); }

double sq(double x) { return x * x; }

/// Enumerates the lattice band |k|_inf <= B for dim 1 or 2.
std::vector<Frequency> lattice_band(int dim, int B) {
  std::vector<Frequency> out;
  if (dim == 1) {
    out.reserve(2 * B + 1);
    for (int k = -B; k <= B; ++k) out.push_back(Frequency{{k}});
  } else {
    out.reserve(static_cast<std::size_t>(2 * B + 1) * (2 * B + 1));
    for (int k1 = -B; k1 <= B; ++k1)
      for (int k2 = -B; k2 <= B; ++k2) out.push_back(Frequency{{k1, k2}});
  }
  return out;
}

void finish_plateau_verdict(ExperimentReport& rep, const std::vector<double>& curve,
                            double tol, const std::string& quantity) {
  if (curve.size() < 3) {
    rep.verdict = ExperimentVerdict::Inconclusive;
    rep.note = "schedule has fewer than three bands; cannot call a plateau for " + quantity;
  } else if (plateau_reached(curve, tol)) {
    rep.verdict = ExperimentVerdict::Pass;
    rep.note = quantity + " saturates across the last bands (growth within " + fmt(tol * 100) +
               "%): the constant is band-independent in this range";
  } else {
    rep.verdict = ExperimentVerdict::Fail;
    rep.note = quantity + " keeps growing across the last bands; no uniform constant observed";
  }
}

std::string method_name(ConvergenceDecision::Method m) {
  switch (m) {
    case ConvergenceDecision::Method::IndexCriterion: return "index criterion";
    case ConvergenceDecision::Method::ClosedForm: return "closed form";
    default: return "quadrature";
  }
}

}  // namespace

bool plateau_reached(const std::vector<double>& curve, double tol) {
  const std::size_t n = curve.size();
  if (n < 3) return false;
  return curve[n - 1] <= (1.0 + tol) * curve[n - 3] + 1e-30;
}

ExperimentReport apriori_experiment(const MatrixDiffOp& A, const RoFunction& phi,
                                    double sigma, int samples,
                                    const std::vector<int>& schedule,
                                    const ExperimentOptions& options) {
  if (!(sigma > 0.0)) throw DomainError("the order drop sigma must be positive");
  require_samples(samples);
  require_schedule(schedule);
  const EllipticityResult ell = ellipticity_check(A);
  if (!ell.elliptic) {
    std::ostringstream msg;
    msg << "a priori estimate needs an elliptic system: min |det principal symbol| = "
        << ell.min_abs_det;
    throw EllipticityError(msg.str(), ell.min_abs_det);
  }

  const std::vector<int> m = A.column_orders();
  std::vector<double> up(m.begin(), m.end());
  std::vector<double> low;
  low.reserve(m.size());
  for (int mk : m) low.push_back(mk - sigma);

  ExperimentReport rep;
  rep.name = "apriori";
  rep.parameters = {{"p", std::to_string(A.p())},
                    {"dim", std::to_string(A.dim())},
                    {"phi", describe(phi)},
                    {"column_orders", fmt_orders(m)},
                    {"sigma", fmt(sigma)},
                    {"samples", std::to_string(samples)},
                    {"schedule", fmt_schedule(schedule)},
                    {"seed", std::to_string(options.seed)}};

  // Kernel elements maximize the ratio (A u = 0 kills the first denominator
  // term), so for constant coefficients they join as deterministic probes.
  std::vector<TrigVector> probes;
  if (A.constant_coefficients()) probes = kernel_cokernel(A).kernel_basis;

  std::uint64_t seed = options.seed;
  std::vector<double> curve;
  for (int B : schedule) {
    double worst = 0.0;
    int sample_idx = 0;
    auto measure = [&](const TrigVector& u) {
      const TrigVector f = A.apply(u);
      const double num = vec_hnorm(u, phi, up);
      const double den = hnorm_vector(f, phi) + vec_hnorm(u, phi, low);
      const double ratio = den > 0.0 ? num / den : 0.0;
      rep.observations.push_back({B, sample_idx++, ratio});
      worst = std::max(worst, ratio);
    };
    for (int s = 0; s < samples; ++s) {
      std::vector<TrigPoly> comps;
      comps.reserve(m.size());
      for (std::size_t j = 0; j < m.size(); ++j)
        comps.push_back(random_trig(A.dim(), B, phi.shifted(m[j]), 1.0, seed++));
      measure(TrigVector(std::move(comps)));
    }
    for (const auto& probe : probes) measure(probe);
    // Constant estimate at band B: worst ratio seen at any band up to B.
    // The running maximum is what a single constant must cover, and it damps
    // per-band sampling noise without hiding genuine growth.
    const double running = curve.empty() ? worst : std::max(curve.back(), worst);
    curve.push_back(running);
    rep.constants["c[B=" + std::to_string(B) + "]"] = running;
  }
  rep.constants["c"] = curve.back();
  finish_plateau_verdict(rep, curve, options.plateau_tol, "the worst a priori ratio");
  if (!probes.empty())
    rep.note += "; " + std::to_string(probes.size()) + " kernel basis probe(s) included per band";
  return rep;
}

ExperimentReport regularity_lift_experiment(const MatrixDiffOp& A, const RoFunction& phi,
                                            int samples, const std::vector<int>& schedule,
                                            const ExperimentOptions& options) {
  require_samples(samples);
  require_schedule(schedule);
  if (!A.constant_coefficients())
    throw DomainError("the regularity-lift experiment solves exactly and needs constant coefficients");
  const FredholmReport fr = kernel_cokernel(A);
  const std::vector<int> m = A.column_orders();

  ExperimentReport rep;
  rep.name = "regularity_lift";
  rep.parameters = {{"p", std::to_string(A.p())},
                    {"dim", std::to_string(A.dim())},
                    {"phi", describe(phi)},
                    {"column_orders", fmt_orders(m)},
                    {"samples", std::to_string(samples)},
                    {"schedule", fmt_schedule(schedule)},
                    {"seed", std::to_string(options.seed)}};

  std::uint64_t seed = options.seed;
  std::vector<double> curve;
  for (int B : schedule) {
    // Shell energies accumulated over all samples at this band: data shells
    // carry weight phi^2, solution shells phi^2 t^{2 m_k}.
    const int max_shell =
        shell_index(std::sqrt(1.0 + static_cast<double>(A.dim()) * sq(B))) + 1;
    std::vector<double> num(max_shell + 1, 0.0), den(max_shell + 1, 0.0);
    for (int s = 0; s < samples; ++s) {
      std::vector<TrigPoly> comps;
      comps.reserve(m.size());
      for (std::size_t j = 0; j < m.size(); ++j)
        comps.push_back(random_trig(A.dim(), B, phi, 1.0, seed++));
      const TrigVector f = project_range(TrigVector(std::move(comps)), fr);
      const SolveResult sol = solve_const(A, f, phi);
      for (int j = 0; j < A.p(); ++j) {
        for (const auto& [k, c] : sol.u[j].coeffs()) {
          const double t = smoothed_abs(k);
          num[shell_index(t)] += sq(phi(t) * std::pow(t, m[j]) * std::abs(c));
        }
        for (const auto& [k, c] : f[j].coeffs()) {
          const double t = smoothed_abs(k);
          den[shell_index(t)] += sq(phi(t) * std::abs(c));
        }
      }
    }
    double worst = 0.0;
    for (int s = 0; s <= max_shell; ++s) {
      if (den[s] <= 0.0) continue;  // empty data shell => empty solution shell
      const double ratio = num[s] / den[s];
      rep.observations.push_back({B, s, ratio});
      worst = std::max(worst, ratio);
    }
    // Running maximum: the shell-ratio constant must cover all bands up to B.
    const double running = curve.empty() ? worst : std::max(curve.back(), worst);
    curve.push_back(running);
    rep.constants["r[B=" + std::to_string(B) + "]"] = running;
  }
  rep.constants["r"] = curve.back();
  finish_plateau_verdict(rep, curve, options.plateau_tol, "the worst shell energy ratio");
  rep.note += "; observation columns are (band, shell index, ratio)";
  return rep;
}

ExperimentReport continuity_experiment(const MatrixDiffOp& A, const RoFunction& phi,
                                       int r, int component, int samples,
                                       const ExperimentOptions& options) {
  require_samples(samples);
  if (r < 0) throw DomainError("derivative count r must be >= 0");
  if (component < 0 || component >= A.p()) throw DomainError("component index out of range");
  if (!A.constant_coefficients())
    throw DomainError("the continuity experiment solves exactly and needs constant coefficients");
  const std::vector<int> m = A.column_orders();
  const int mk = m[component];
  const int B = options.bandwidth;

  ExperimentReport rep;
  rep.name = "continuity";
  rep.parameters = {{"p", std::to_string(A.p())},
                    {"dim", std::to_string(A.dim())},
                    {"phi", describe(phi)},
                    {"column_orders", fmt_orders(m)},
                    {"r", std::to_string(r)},
                    {"component", std::to_string(component)},
                    {"samples", std::to_string(samples)},
                    {"bandwidth", std::to_string(B)},
                    {"seed", std::to_string(options.seed)}};

  const ConvergenceDecision dec = embedding_integral(phi, r, A.dim(), mk, options.integral);
  if (dec.verdict == ConvergenceDecision::Verdict::Diverges) {
    rep.verdict = ExperimentVerdict::Inconclusive;
    rep.note = "embedding hypothesis fails (" + method_name(dec.decided_by) +
               "): the weight integral diverges, so the sup-norm bound is not claimed";
    return rep;
  }
  if (dec.verdict == ConvergenceDecision::Verdict::Inconclusive) {
    rep.verdict = ExperimentVerdict::Inconclusive;
    rep.note = "embedding hypothesis undecided (" + dec.detail +
               "); refusing to assert the sup-norm bound";
    return rep;
  }
  if (dec.value_estimate) rep.constants["integral_estimate"] = *dec.value_estimate;

  // Constant S: exact lattice sum over the resolved band plus an integral
  // bound for everything beyond it (shell counts: 2 per radius on the line,
  // 8 j at radius j in the plane).
  double band_sq = 0.0;
  for (const auto& k : lattice_band(A.dim(), B)) {
    const double t = smoothed_abs(k);
    band_sq += std::pow(t, 2.0 * r) / sq(phi(t) * std::pow(t, mk));
  }
  const double a_lin = 2.0 * r + A.dim() - 2.0 * mk;
  const auto integrand = [&](double u) {
    return std::exp(a_lin * u - 2.0 * phi.log_eval(u));
  };
  const double u0 = std::log(std::max(1.0, static_cast<double>(B)));
  const double u_hor = std::log(options.integral.horizon);
  double tail = 0.0;
  double lo = u0, span = 1.0;
  while (lo < u_hor) {
    const double hi = std::min(lo + span, u_hor);
    tail += integrate([&](double u) { return integrand(u); }, lo, hi).value;
    lo = hi;
    span *= 2.0;
  }
  const double c_n = A.dim() == 1 ? 2.0 : 8.0;
  const double S = std::sqrt(band_sq + c_n * tail);
  rep.constants["S_band"] = std::sqrt(band_sq);
  rep.constants["S_tail"] = std::sqrt(c_n * tail);
  rep.constants["S"] = S;

  const FredholmReport fr = kernel_cokernel(A);
  std::uint64_t seed = options.seed;
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    std::vector<TrigPoly> comps;
    comps.reserve(m.size());
    for (std::size_t j = 0; j < m.size(); ++j)
      comps.push_back(random_trig(A.dim(), B, phi, 1.0, seed++));
    const TrigVector f = project_range(TrigVector(std::move(comps)), fr);
    const SolveResult sol = solve_const(A, f, phi);
    const TrigPoly& uk = sol.u[component];
    const double lhs = sup_norm_deriv(uk, r);
    const double rhs = S * hnorm(uk, phi.shifted(mk));
    const double ratio = rhs > 0.0 ? lhs / rhs : 0.0;
    rep.observations.push_back({B, s, ratio});
    worst = std::max(worst, ratio);
  }
  rep.constants["worst_ratio"] = worst;
  if (worst <= 1.0 + options.inequality_slack) {
    rep.verdict = ExperimentVerdict::Pass;
    rep.note = "hypothesis confirmed by " + method_name(dec.decided_by) +
               "; sup-norm bound holds on every sample with finite S";
  } else {
    rep.verdict = ExperimentVerdict::Fail;
    rep.note = "sup-norm bound violated: worst ratio " + fmt(worst);
  }
  return rep;
}

ExperimentReport classical_solution_check(const MatrixDiffOp& A, const RoFunction& phi,
                                          int samples, const ExperimentOptions& options) {
  const std::vector<int> m = A.column_orders();

  ExperimentReport rep;
  rep.name = "classical_solution";
  rep.parameters = {{"p", std::to_string(A.p())},
                    {"dim", std::to_string(A.dim())},
                    {"phi", describe(phi)},
                    {"column_orders", fmt_orders(m)},
                    {"samples", std::to_string(samples)},
                    {"bandwidth", std::to_string(options.bandwidth)},
                    {"seed", std::to_string(options.seed)}};

  bool any_fail = false, any_inconclusive = false;
  std::ostringstream note;
  for (int k = 0; k < A.p(); ++k) {
    ExperimentOptions sub_options = options;
    sub_options.seed = options.seed + static_cast<std::uint64_t>(1000) * k;
    ExperimentReport sub = continuity_experiment(A, phi, m[k], k, samples, sub_options);
    for (Observation obs : sub.observations) {
      obs.sample += k * samples;
      rep.observations.push_back(obs);
    }
    for (const auto& [key, value] : sub.constants)
      rep.constants[key + "[k=" + std::to_string(k) + "]"] = value;
    if (sub.verdict == ExperimentVerdict::Fail) any_fail = true;
    if (sub.verdict == ExperimentVerdict::Inconclusive) any_inconclusive = true;
    if (k) note << "; ";
    note << "component " << k << " (r=" << m[k] << "): "
         << (sub.verdict == ExperimentVerdict::Pass
                 ? "ok"
                 : sub.verdict == ExperimentVerdict::Fail ? "violated" : "hypothesis unconfirmed");
  }
  rep.verdict = any_fail ? ExperimentVerdict::Fail
                         : any_inconclusive ? ExperimentVerdict::Inconclusive
                                            : ExperimentVerdict::Pass;
  rep.note = note.str();
  return rep;
}

ExperimentReport interpolation_identity_check(const RoFunction& phi, double s0, double s1,
                                              int dim, int samples,
                                              const ExperimentOptions& options) {
  require_samples(samples);
  const InterpolationParameter psi = interpolation_parameter(phi, s0, s1);

  ExperimentReport rep;
  rep.name = "interpolation_identity";
  rep.parameters = {{"dim", std::to_string(dim)},
                    {"phi", describe(phi)},
                    {"s0", fmt(s0)},
                    {"s1", fmt(s1)},
                    {"samples", std::to_string(samples)},
                    {"bandwidth", std::to_string(options.bandwidth)},
                    {"seed", std::to_string(options.seed)}};

  const RoFunction flat = RoFunction::log_power(0.0);
  std::uint64_t seed = options.seed;
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const TrigPoly u = random_trig(dim, options.bandwidth, flat, 1.0, seed++);
    const double direct = hnorm(u, phi);
    double interp_sq = 0.0;
    for (const auto& [k, c] : u.coeffs()) {
      const double t = smoothed_abs(k);
      interp_sq += sq(psi(std::pow(t, s1 - s0)) * std::pow(t, s0) * std::abs(c));
    }
    const double via_psi = std::sqrt(interp_sq);
    const double dev = std::abs(direct - via_psi) /
                       std::max({direct, via_psi, std::numeric_limits<double>::min()});
    rep.observations.push_back({options.bandwidth, s, dev});
    worst = std::max(worst, dev);
  }
  rep.constants["max_rel_dev"] = worst;
  if (worst <= options.identity_tol) {
    rep.verdict = ExperimentVerdict::Pass;
    rep.note = "norm with weight psi(t^{s1-s0}) t^{s0} matches the phi-norm to " + fmt(worst);
  } else {
    rep.verdict = ExperimentVerdict::Fail;
    rep.note = "interpolation identity deviates by " + fmt(worst) + " (tolerance " +
               fmt(options.identity_tol) + ")";
  }
  return rep;
}

ExperimentReport embedding_chain_check(const RoFunction& phi, double s0, double s1,
                                       int dim, int samples,
                                       const ExperimentOptions& options) {
  require_samples(samples);
  interpolation_parameter(phi, s0, s1);  // validates the strict index bracket

  ExperimentReport rep;
  rep.name = "embedding_chain";
  rep.parameters = {{"dim", std::to_string(dim)},
                    {"phi", describe(phi)},
                    {"s0", fmt(s0)},
                    {"s1", fmt(s1)},
                    {"samples", std::to_string(samples)},
                    {"bandwidth", std::to_string(options.bandwidth)},
                    {"seed", std::to_string(options.seed)}};

  const int B = options.bandwidth;
  const std::vector<Frequency> band = lattice_band(dim, B);
  double C0 = 0.0, C1 = 0.0, t_max = 1.0;
  for (const auto& k : band) {
    const double t = smoothed_abs(k);
    C0 = std::max(C0, std::pow(t, s0) / phi(t));
    C1 = std::max(C1, phi(t) / std::pow(t, s1));
    t_max = std::max(t_max, t);
  }
  rep.constants["C0"] = C0;
  rep.constants["C1"] = C1;

  // Tail constants over growing thresholds: restricted suprema can only
  // shrink, witnessing that the two-sided comparison sharpens at high
  // frequency. Recorded for the report; monotonicity is checked.
  bool tails_monotone = true;
  double prev0 = C0, prev1 = C1;
  for (double T = 2.0; T < t_max; T *= 2.0) {
    double tail0 = 0.0, tail1 = 0.0;
    bool nonempty = false;
    for (const auto& k : band) {
      const double t = smoothed_abs(k);
      if (t <= T) continue;
      nonempty = true;
      tail0 = std::max(tail0, std::pow(t, s0) / phi(t));
      tail1 = std::max(tail1, phi(t) / std::pow(t, s1));
    }
    if (!nonempty) break;
    const std::string suffix = "[T=" + fmt(T) + "]";
    rep.constants["tail_lower" + suffix] = tail0;
    rep.constants["tail_upper" + suffix] = tail1;
    if (tail0 > prev0 * (1.0 + 1e-12) || tail1 > prev1 * (1.0 + 1e-12)) tails_monotone = false;
    prev0 = tail0;
    prev1 = tail1;
  }

  const RoFunction w0 = RoFunction::log_power(s0);
  const RoFunction w1 = RoFunction::log_power(s1);
  std::uint64_t seed = options.seed;
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const TrigPoly u = random_trig(dim, B, phi, 1.0, seed++);
    const double h_phi = hnorm(u, phi);
    const double lower = hnorm(u, w0);  // |u|_{s0} <= C0 |u|_phi
    const double upper = hnorm(u, w1);  // |u|_phi <= C1 |u|_{s1}
    const double r0 = C0 * h_phi > 0.0 ? lower / (C0 * h_phi) : 0.0;
    const double r1 = C1 * upper > 0.0 ? h_phi / (C1 * upper) : 0.0;
    const double ratio = std::max(r0, r1);
    rep.observations.push_back({B, s, ratio});
    worst = std::max(worst, ratio);
  }
  rep.constants["worst_ratio"] = worst;
  if (worst <= 1.0 + options.inequality_slack && tails_monotone) {
    rep.verdict = ExperimentVerdict::Pass;
    rep.note = "both norm inequalities hold on every sample and the tail constants are non-increasing";
  } else {
    rep.verdict = ExperimentVerdict::Fail;
    rep.note = tails_monotone ? "a norm inequality failed: worst ratio " + fmt(worst)
                              : "tail constants are not monotone";
  }
  return rep;
}

ExperimentReport lemma41_check(const ScalarDiffOp& L, const RoFunction& phi,
                               int samples, const std::vector<int>& schedule,
                               const ExperimentOptions& options) {
  require_samples(samples);
  require_schedule(schedule);
  const int l = L.order();
  if (l < 0) throw DomainError("the zero expression has no order bound to test");

  ExperimentReport rep;
  rep.name = "lemma41";
  rep.parameters = {{"dim", std::to_string(L.dim())},
                    {"order", std::to_string(l)},
                    {"phi", describe(phi)},
                    {"samples", std::to_string(samples)},
                    {"schedule", fmt_schedule(schedule)},
                    {"seed", std::to_string(options.seed)}};

  const RoFunction shifted = phi.shifted(l);
  std::uint64_t seed = options.seed;
  std::vector<double> curve;
  for (int B : schedule) {
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
      const TrigPoly u = random_trig(L.dim(), B, shifted, 1.0, seed++);
      const double den = hnorm(u, shifted);
      const double ratio = den > 0.0 ? hnorm(L.apply(u), phi) / den : 0.0;
      rep.observations.push_back({B, s, ratio});
      worst = std::max(worst, ratio);
    }
    // Running maximum, as in the a priori experiment.
    const double running = curve.empty() ? worst : std::max(curve.back(), worst);
    curve.push_back(running);
    rep.constants["c[B=" + std::to_string(B) + "]"] = running;
  }
  rep.constants["c"] = curve.back();
  finish_plateau_verdict(rep, curve, options.plateau_tol, "the worst order-bound ratio");
  return rep;
}

ExperimentReport local_regularity_diagnostic(const MatrixDiffOp& A, const RoFunction& phi,
                                             const TrigPoly& chi, const TrigVector& u) {
  if (chi.dim() != A.dim() || u.dim() != A.dim() || u.p() != A.p())
    throw DimensionError("cutoff / vector dimensions do not match the system");
  const std::vector<int> m = A.column_orders();

  ExperimentReport rep;
  rep.name = "local_regularity";
  rep.parameters = {{"p", std::to_string(A.p())},
                    {"dim", std::to_string(A.dim())},
                    {"phi", describe(phi)},
                    {"column_orders", fmt_orders(m)},
                    {"cutoff_bandwidth", std::to_string(chi.bandwidth())},
                    {"vector_bandwidth", std::to_string(u.bandwidth())}};

  std::ostringstream note;
  note << "diagnostic only; observation columns are (shell index, component, "
          "log2 of count-normalized shell energy)";
  for (int j = 0; j < A.p(); ++j) {
    const TrigPoly w = multiply(chi, u[j]);
    const int Bw = w.bandwidth();
    const int max_shell =
        shell_index(std::sqrt(1.0 + static_cast<double>(A.dim()) * sq(Bw))) + 1;
    std::vector<double> energy(max_shell + 1, 0.0);
    std::vector<int> count(max_shell + 1, 0);
    for (const auto& k : lattice_band(A.dim(), Bw)) ++count[shell_index(smoothed_abs(k))];
    for (const auto& [k, c] : w.coeffs()) {
      const double t = smoothed_abs(k);
      energy[shell_index(t)] += sq(phi(t) * std::pow(t, m[j]) * std::abs(c));
    }
    // Least-squares slope of log2(mean energy per mode) against the shell
    // index; strongly negative slopes flag local smoothness beyond phi.
    std::vector<std::pair<double, double>> points;
    for (int s = 0; s <= max_shell; ++s) {
      if (count[s] == 0 || energy[s] <= 0.0) continue;
      const double density = std::log2(energy[s] / count[s]);
      rep.observations.push_back({s, j, density});
      points.emplace_back(static_cast<double>(s), density);
    }
    double slope = 0.0;
    if (points.size() >= 2) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (const auto& [x, y] : points) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      const double denom = points.size() * sxx - sx * sx;
      if (denom > 0.0) slope = (points.size() * sxy - sx * sy) / denom;
    }
    rep.constants["slope[k=" + std::to_string(j) + "]"] = slope;
  }
  rep.verdict = ExperimentVerdict::Inconclusive;
  rep.note = note.str();
  return rep;
}

}  // namespace sobscale
