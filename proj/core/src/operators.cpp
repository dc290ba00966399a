#include "sobscale/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sobscale/errors.hpp"

namespace sobscale {

namespace {

int abs_order(const MultiIndex& alpha) { return std::accumulate(alpha.begin(), alpha.end(), 0); }

void check_alpha_shape(const MultiIndex& alpha, int dim) {
  if (static_cast<int>(alpha.size()) != dim)
    throw DimensionError("multi-index length does not match torus dimension");
  for (int a : alpha)
    if (a < 0) throw DomainError("multi-index entries must be non-negative");
}

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

}  // namespace

ScalarDiffOp::ScalarDiffOp(int dim) : dim_(dim) {
  if (dim != 1 && dim != 2) throw DimensionError("torus dimension must be 1 or 2");
}

ScalarDiffOp ScalarDiffOp::derivative_op(int dim, MultiIndex alpha) {
  return term(std::move(alpha), TrigPoly::constant(dim, 1.0));
}

ScalarDiffOp ScalarDiffOp::multiplication(const TrigPoly& a) {
  return term(MultiIndex(a.dim(), 0), a);
}

ScalarDiffOp ScalarDiffOp::term(MultiIndex alpha, TrigPoly a) {
  ScalarDiffOp op(a.dim());
  check_alpha_shape(alpha, a.dim());
  if (!a.is_zero()) op.terms_.emplace(std::move(alpha), std::move(a));
  return op;
}

int ScalarDiffOp::order() const {
  int best = -1;
  for (const auto& [alpha, a] : terms_) best = std::max(best, abs_order(alpha));
  return best;
}

bool ScalarDiffOp::constant_coefficients() const {
  for (const auto& [alpha, a] : terms_)
    if (a.bandwidth() != 0) return false;
  return true;
}

int ScalarDiffOp::coefficient_bandwidth() const {
  int b = 0;
  for (const auto& [alpha, a] : terms_) b = std::max(b, a.bandwidth());
  return b;
}

ScalarDiffOp ScalarDiffOp::operator+(const ScalarDiffOp& o) const {
  if (dim_ != o.dim_) throw DimensionError("adding expressions of different dimensions");
  ScalarDiffOp out(dim_);
  out.terms_ = terms_;
  for (const auto& [alpha, a] : o.terms_) {
    auto it = out.terms_.find(alpha);
    if (it == out.terms_.end()) {
      out.terms_.emplace(alpha, a);
    } else {
      TrigPoly sum = it->second + a;
      if (sum.is_zero()) {
        out.terms_.erase(it);
      } else {
        it->second = std::move(sum);
      }
    }
  }
  return out;
}

ScalarDiffOp ScalarDiffOp::operator*(Complex scale) const {
  ScalarDiffOp out(dim_);
  if (scale != Complex{})
    for (const auto& [alpha, a] : terms_) out.terms_.emplace(alpha, a * scale);
  return out;
}

TrigPoly ScalarDiffOp::apply(const TrigPoly& u) const {
  if (u.dim() != dim_) throw DimensionError("operand dimension mismatch");
  TrigPoly out(dim_);
  for (const auto& [alpha, a] : terms_) out = out + multiply(a, derivative(u, alpha));
  return out;
}

ScalarDiffOp ScalarDiffOp::formal_adjoint() const {
  ScalarDiffOp out(dim_);
  for (const auto& [alpha, a] : terms_) {
    const TrigPoly abar = a.conjugate();
    // D^alpha(abar v) = sum_{beta <= alpha} binom(alpha, beta) D^{alpha-beta}(abar) D^beta v
    std::vector<MultiIndex> betas;
    if (dim_ == 1) {
      for (int b = 0; b <= alpha[0]; ++b) betas.push_back({b});
    } else {
      for (int b1 = 0; b1 <= alpha[0]; ++b1)
        for (int b2 = 0; b2 <= alpha[1]; ++b2) betas.push_back({b1, b2});
    }
    for (const auto& beta : betas) {
      double factor = 1.0;
      MultiIndex gap(dim_);
      for (int j = 0; j < dim_; ++j) {
        factor *= binomial(alpha[j], beta[j]);
        gap[j] = alpha[j] - beta[j];
      }
      const TrigPoly coeff = derivative(abar, gap) * Complex(factor, 0.0);
      out = out + term(beta, coeff);
    }
  }
  return out;
}

Complex ScalarDiffOp::full_symbol(const std::vector<double>& x,
                                  const std::vector<double>& xi) const {
  return principal_symbol(x, xi, -1);
}

Complex ScalarDiffOp::principal_symbol(const std::vector<double>& x,
                                       const std::vector<double>& xi, int top_order) const {
  if (static_cast<int>(xi.size()) != dim_)
    throw DimensionError("covector length does not match torus dimension");
  Complex sum{};
  for (const auto& [alpha, a] : terms_) {
    if (top_order >= 0 && abs_order(alpha) != top_order) continue;
    double mono = 1.0;
    for (int j = 0; j < dim_; ++j)
      for (int rep = 0; rep < alpha[j]; ++rep) mono *= xi[j];
    sum += a.evaluate(x) * mono;
  }
  return sum;
}

MatrixDiffOp::MatrixDiffOp(int p, int dim, std::vector<ScalarDiffOp> entries_row_major)
    : p_(p), dim_(dim), e_(std::move(entries_row_major)) {
  if (p_ < 2) throw DimensionError("systems need at least two equations");
  if (dim_ != 1 && dim_ != 2) throw DimensionError("torus dimension must be 1 or 2");
  if (static_cast<int>(e_.size()) != p_ * p_)
    throw DimensionError("entry list must hold p*p expressions row-major");
  for (const auto& op : e_)
    if (op.dim() != dim_) throw DimensionError("entry dimension mismatch");
  for (int col = 0; col < p_; ++col) {
    bool nonzero = false;
    for (int row = 0; row < p_; ++row) nonzero = nonzero || !entry(row, col).is_zero();
    if (!nonzero)
      throw DomainError("column " + std::to_string(col) + " of the system is identically zero");
  }
}

const ScalarDiffOp& MatrixDiffOp::entry(int row, int col) const {
  return e_.at(row * p_ + col);
}

std::vector<int> MatrixDiffOp::column_orders() const {
  std::vector<int> m(p_, -1);
  for (int col = 0; col < p_; ++col)
    for (int row = 0; row < p_; ++row) m[col] = std::max(m[col], entry(row, col).order());
  return m;
}

bool MatrixDiffOp::constant_coefficients() const {
  return std::all_of(e_.begin(), e_.end(),
                     [](const ScalarDiffOp& op) { return op.constant_coefficients(); });
}

int MatrixDiffOp::coefficient_bandwidth() const {
  int b = 0;
  for (const auto& op : e_) b = std::max(b, op.coefficient_bandwidth());
  return b;
}

TrigVector MatrixDiffOp::apply(const TrigVector& u) const {
  if (u.p() != p_ || u.dim() != dim_) throw DimensionError("operand shape mismatch");
  std::vector<TrigPoly> out;
  out.reserve(p_);
  for (int row = 0; row < p_; ++row) {
    TrigPoly acc(dim_);
    for (int col = 0; col < p_; ++col) acc = acc + entry(row, col).apply(u[col]);
    out.push_back(std::move(acc));
  }
  return TrigVector(std::move(out));
}

MatrixDiffOp MatrixDiffOp::formal_adjoint() const {
  std::vector<ScalarDiffOp> out;
  out.reserve(e_.size());
  for (int row = 0; row < p_; ++row)
    for (int col = 0; col < p_; ++col) out.push_back(entry(col, row).formal_adjoint());
  return MatrixDiffOp(p_, dim_, std::move(out));
}

SymbolMatrix principal_symbol(const MatrixDiffOp& A, const std::vector<double>& x,
                              const std::vector<double>& xi) {
  const std::vector<int> m = A.column_orders();
  SymbolMatrix sym;
  sym.matrix.resize(A.p(), A.p());
  sym.x = x;
  sym.xi = xi;
  for (int row = 0; row < A.p(); ++row)
    for (int col = 0; col < A.p(); ++col)
      sym.matrix(row, col) = A.entry(row, col).principal_symbol(x, xi, m[col]);
  return sym;
}

EllipticityResult ellipticity_check(const MatrixDiffOp& A, EllipticityOptions options) {
  if (options.x_grid < 1 || options.sphere_grid < 2)
    throw DomainError("ellipticity grids need at least 1 x-point and 2 directions");
  // The symbol of a constant-coefficient system does not depend on x, so a
  // single base point suffices.
  const int nx = A.constant_coefficients() ? 1 : options.x_grid;
  std::vector<std::vector<double>> xs;
  if (A.dim() == 1) {
    for (int i = 0; i < nx; ++i) xs.push_back({2.0 * M_PI * i / nx});
  } else {
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nx; ++j)
        xs.push_back({2.0 * M_PI * i / nx, 2.0 * M_PI * j / nx});
  }
  std::vector<std::vector<double>> dirs;
  if (A.dim() == 1) {
    dirs = {{1.0}, {-1.0}};
  } else {
    for (int i = 0; i < options.sphere_grid; ++i) {
      const double th = 2.0 * M_PI * i / options.sphere_grid;
      dirs.push_back({std::cos(th), std::sin(th)});
    }
  }
  double min_det = std::numeric_limits<double>::infinity();
  for (const auto& x : xs)
    for (const auto& xi : dirs) {
      const SymbolMatrix sym = principal_symbol(A, x, xi);
      min_det = std::min(min_det, std::abs(sym.matrix.determinant()));
    }
  return {min_det, min_det > options.tol};
}

BoundednessCurve boundedness_estimate(const MatrixDiffOp& A, const RoFunction& phi, int samples,
                                      int B_max, std::uint64_t seed) {
  if (samples < 1 || B_max < 4) throw DomainError("need samples >= 1 and B_max >= 4");
  const std::vector<int> m_int = A.column_orders();
  const std::vector<double> m(m_int.begin(), m_int.end());
  BoundednessCurve curve;
  std::uint64_t draw = seed;
  for (int B = 4; B <= B_max; B *= 2) {
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
      std::vector<TrigPoly> comps;
      for (int j = 0; j < A.p(); ++j)
        comps.push_back(random_trig(A.dim(), B, phi.shifted(m[j]), 1.0, draw++));
      const TrigVector u{std::move(comps)};
      const double denom = vec_hnorm(u, phi, m);
      if (denom == 0.0) continue;
      worst = std::max(worst, hnorm_vector(A.apply(u), phi) / denom);
    }
    curve.points.emplace_back(B, worst);
  }
  return curve;
}

}  // namespace sobscale
