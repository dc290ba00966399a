#ifndef SOBSCALE_ROFUNC_HPP
#define SOBSCALE_ROFUNC_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sobscale {

/**
 * Smoothness weights: positive functions on [1, inf) whose ratio
 * phi(lambda*t)/phi(t) stays within fixed bounds for bounded dilations
 * lambda. Four concrete shapes are supported:
 *
 *   LogPower         phi(t) = t^s * (1+ln t)^b1 * (1+ln(1+ln t))^b2
 *   PowerSineLog     phi(t) = t^s * exp(theta * sin(ln t))
 *   BGRepresentation phi(t) = exp(beta(t) + integral_1^t gamma(tau)/tau dtau)
 *                    with beta, gamma bounded callables
 *   Tabulated        log-log interpolation of a geometric sample grid,
 *                    power-law extension beyond the last sample
 *
 * Instances are immutable values; copies of a BGRepresentation share the
 * quadrature cache behind a mutex.
 */
class RoFunction {
public:
  enum class Kind { LogPower, PowerSineLog, BGRepresentation, Tabulated };

  struct LogPowerParams {
    double s = 0.0, b1 = 0.0, b2 = 0.0;
  };
  struct PowerSineLogParams {
    double s = 0.0, theta = 0.0;
  };

  static RoFunction log_power(double s, double b1 = 0.0, double b2 = 0.0);
  static RoFunction power_sine_log(double s, double theta);

  /// Builds a weight from bounded callables beta, gamma on [1, inf).
  /// The caller supplies finite sup-norm bounds; missing (non-finite or
  /// negative) bounds are a configuration error.
  static RoFunction from_bg(std::function<double(double)> beta, double beta_bound,
                            std::function<double(double)> gamma, double gamma_bound);

  /// Samples (t_i, phi_i) with t strictly increasing from 1. When
  /// extension_exponent is absent it is fitted to the last decade of samples.
  /// Non-positive samples are accepted here and rejected at evaluation time.
  static RoFunction tabulated(std::vector<double> t, std::vector<double> phi,
                              std::optional<double> extension_exponent = std::nullopt);

  Kind kind() const;
  std::string kind_name() const;

  /// phi(t) for t >= 1. Throws InvalidFunctionError when the value is not
  /// finite and positive, DomainError for t < 1.
  double operator()(double t) const;

  /// ln phi(e^u) for u >= 0. Safe far beyond the overflow range of direct
  /// evaluation; the BG variant is limited to u <= 700 (argument range of
  /// its callables).
  double log_eval(double u) const;

  /// The weight t^m * phi(t); every variant is closed under this shift.
  RoFunction shifted(double m) const;

  double at_one() const { return (*this)(1.0); }

  /// Effective parameters with any t^m shift folded in; empty for other kinds.
  std::optional<LogPowerParams> log_power_params() const;
  std::optional<PowerSineLogParams> power_sine_log_params() const;

  struct TabulatedView {
    const std::vector<double>* t;
    const std::vector<double>* phi;
    double extension_exponent;  // effective (shift folded in)
    double shift;               // multiply samples by t^shift to serialize
  };
  std::optional<TabulatedView> tabulated_view() const;

  struct BgView {
    double beta_bound;
    double gamma_bound;
    double shift;
  };
  std::optional<BgView> bg_view() const;

private:
  RoFunction() = default;
  struct BgData;
  struct TabData;

  Kind kind_ = Kind::LogPower;
  LogPowerParams lp_;
  PowerSineLogParams psl_;
  std::shared_ptr<BgData> bg_;
  std::shared_ptr<TabData> tab_;
  double shift_ = 0.0;  // multiplies by t^shift_ on top of the base shape
};

/// Indices of the two-sided power bounds c0*lambda^s0 <= phi(lambda t)/phi(t)
/// <= c1*lambda^s1. Exact for LogPower; otherwise estimated from dilation
/// envelopes with a confidence half-width attached.
struct MatuszewskaIndices {
  double sigma0 = 0.0;
  double sigma1 = 0.0;
  enum class Method { Exact, Estimated } method = Method::Exact;
  double half_width = 0.0;
};

/// Compact human-readable descriptor, e.g. "log_power(s=1, b1=0, b2=0)".
std::string describe(const RoFunction& phi);

MatuszewskaIndices matuszewska(const RoFunction& phi);

/// The numeric estimator used for non-LogPower shapes, exposed separately so
/// it can be cross-checked against the exact branch. Reports the most
/// conservative (envelope) slopes seen across dilation scales, so an
/// oscillating weight yields the full oscillation band rather than its
/// asymptotic mean. Throws EstimationError when two grid resolutions
/// disagree badly.
MatuszewskaIndices matuszewska_estimate(const RoFunction& phi);

struct RoCheckResult {
  double c_estimate = 0.0;
  bool ok = false;
};

/// Grid estimate of the dilation-ratio constant over t in [1, t_max],
/// lambda in [1, a]. Diagnostic: evaluation failures surface as ok=false.
RoCheckResult ro_check(const RoFunction& phi, double a, double t_max);

enum class EmbeddingRelation { CompactEmbedding, ContinuousEmbedding, None, Inconclusive };

struct CompareResult {
  EmbeddingRelation relation = EmbeddingRelation::Inconclusive;
  std::string evidence;
};

/// Decides how the space weighted by phi1 sits inside the space weighted by
/// phi: bounded phi/phi1 gives a continuous embedding, vanishing phi/phi1 a
/// compact one. Exact for a LogPower pair; otherwise decided from index
/// gaps or a grid trend, with Inconclusive allowed.
CompareResult compare(const RoFunction& phi, const RoFunction& phi1, double t_max = 1e8);

/// The reparametrized weight psi built from phi and a bracket s0 < s1:
///   psi(t) = t^(-s0/(s1-s0)) * phi(t^(1/(s1-s0)))   for t >= 1,
///   psi(t) = phi(1)                                 for 0 < t < 1.
class InterpolationParameter {
public:
  InterpolationParameter(RoFunction phi, double s0, double s1);
  double operator()(double t) const;
  const RoFunction& source() const { return phi_; }
  double s0() const { return s0_; }
  double s1() const { return s1_; }

private:
  RoFunction phi_;
  double s0_, s1_;
};

/// Checks s0 < sigma0(phi) and s1 > sigma1(phi) (strictly against the
/// widened interval when the indices are estimated) and returns psi.
InterpolationParameter interpolation_parameter(const RoFunction& phi, double s0, double s1);

struct PseudoconcavityGrid {
  double t_lo = 1.0;
  double t_hi = 1e6;
  int points = 256;
};

/// Ratio bound sup majorant/psi >= 1 where the majorant is the least concave
/// function above psi on a geometric grid (upper convex hull of the graph).
double pseudoconcavity_check(const InterpolationParameter& psi, PseudoconcavityGrid grid = {});

struct ConvergenceDecision {
  enum class Verdict { Converges, Diverges, Inconclusive } verdict = Verdict::Inconclusive;
  enum class Method { IndexCriterion, ClosedForm, Quadrature } decided_by = Method::Quadrature;
  std::optional<double> value_estimate;
  /// Pairs (log10 of the upper limit T, integral over [1, T]).
  std::vector<std::pair<double, double>> partial_sums;
  std::string detail;
};

struct EmbeddingIntegralOptions {
  double horizon = 1e12;
  double rel_tol = 1e-9;
};

/// Decides convergence of  integral_1^inf t^(2r+n-1-2m) / omega(t)^2 dt.
/// Ladder: strict index criteria first, the closed-form borderline rule for
/// LogPower, then adaptive quadrature over a doubling schedule with
/// Inconclusive allowed. Divergence is never claimed from quadrature alone.
ConvergenceDecision embedding_integral(const RoFunction& omega, double r, int n, double m,
                                       EmbeddingIntegralOptions options = {});

}  // namespace sobscale

#endif
