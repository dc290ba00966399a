#include "sobscale/torus.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sobscale/errors.hpp"

namespace sobscale {

namespace {

void check_dim(int dim) {
  if (dim != 1 && dim != 2) throw DimensionError("torus dimension must be 1 or 2");
}

void check_freq(const Frequency& k, int dim) {
  if (k.dim() != dim) throw DimensionError("frequency length does not match torus dimension");
}

void check_alpha(const MultiIndex& alpha, int dim) {
  if (static_cast<int>(alpha.size()) != dim)
    throw DimensionError("multi-index length does not match torus dimension");
  for (int a : alpha)
    if (a < 0) throw DomainError("multi-index entries must be non-negative");
}

// Deterministic standard complex normal: Box-Muller over mt19937_64 draws,
// independent of the standard library's distribution internals.
class ComplexNormal {
public:
  explicit ComplexNormal(std::uint64_t seed) : rng_(seed) {}
  Complex next() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-std::log(u1));  // |z|^2 ~ Exp(1), E|z|^2 = 1
    return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
  }

private:
  double uniform() {
    // in (0, 1]; never 0 so the log above is finite
    return (static_cast<double>(rng_()) + 1.0) * 0x1.0p-64;
  }
  std::mt19937_64 rng_;
};

}  // namespace

int Frequency::sup_abs() const {
  int m = 0;
  for (int v : k) m = std::max(m, std::abs(v));
  return m;
}

double smoothed_abs(const Frequency& k) {
  double s = 1.0;
  for (int v : k.k) s += static_cast<double>(v) * v;
  return std::sqrt(s);
}

TrigPoly::TrigPoly(int dim) : dim_(dim) { check_dim(dim); }

TrigPoly::TrigPoly(int dim, std::map<Frequency, Complex> coeffs) : dim_(dim) {
  check_dim(dim);
  for (auto it = coeffs.begin(); it != coeffs.end();) {
    check_freq(it->first, dim);
    if (it->second == Complex{}) {
      it = coeffs.erase(it);
    } else {
      ++it;
    }
  }
  c_ = std::move(coeffs);
}

TrigPoly TrigPoly::monomial(int dim, Frequency k, Complex c) {
  TrigPoly u(dim);
  check_freq(k, dim);
  if (c != Complex{}) u.c_.emplace(std::move(k), c);
  return u;
}

TrigPoly TrigPoly::constant(int dim, Complex c) {
  return monomial(dim, Frequency{std::vector<int>(dim, 0)}, c);
}

Complex TrigPoly::coeff(const Frequency& k) const {
  check_freq(k, dim_);
  auto it = c_.find(k);
  return it == c_.end() ? Complex{} : it->second;
}

int TrigPoly::bandwidth() const {
  int b = 0;
  for (const auto& [k, c] : c_) b = std::max(b, k.sup_abs());
  return b;
}

bool TrigPoly::is_real(double tol) const {
  double scale = 0.0;
  for (const auto& [k, c] : c_) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return true;
  for (const auto& [k, c] : c_) {
    Frequency neg{k.k};
    for (int& v : neg.k) v = -v;
    if (std::abs(coeff(neg) - std::conj(c)) > tol * scale) return false;
  }
  return true;
}

Complex TrigPoly::evaluate(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != dim_)
    throw DimensionError("evaluation point length does not match torus dimension");
  Complex sum{};
  for (const auto& [k, c] : c_) {
    double phase = 0.0;
    for (int j = 0; j < dim_; ++j) phase += k.k[j] * x[j];
    sum += c * Complex{std::cos(phase), std::sin(phase)};
  }
  return sum;
}

TrigPoly TrigPoly::conjugate() const {
  std::map<Frequency, Complex> out;
  for (const auto& [k, c] : c_) {
    Frequency neg{k.k};
    for (int& v : neg.k) v = -v;
    out.emplace(std::move(neg), std::conj(c));
  }
  return TrigPoly(dim_, std::move(out));
}

TrigPoly TrigPoly::operator+(const TrigPoly& o) const {
  if (dim_ != o.dim_) throw DimensionError("adding trig polynomials of different dimensions");
  std::map<Frequency, Complex> out = c_;
  for (const auto& [k, c] : o.c_) {
    auto [it, inserted] = out.emplace(k, c);
    if (!inserted) it->second += c;
  }
  return TrigPoly(dim_, std::move(out));
}

TrigPoly TrigPoly::operator-(const TrigPoly& o) const { return *this + (o * Complex(-1.0, 0.0)); }

TrigPoly TrigPoly::operator*(Complex scale) const {
  std::map<Frequency, Complex> out;
  if (scale != Complex{})
    for (const auto& [k, c] : c_) out.emplace(k, c * scale);
  return TrigPoly(dim_, std::move(out));
}

TrigPoly derivative(const TrigPoly& u, const MultiIndex& alpha) {
  check_alpha(alpha, u.dim());
  std::map<Frequency, Complex> out;
  for (const auto& [k, c] : u.coeffs()) {
    double factor = 1.0;
    for (int j = 0; j < u.dim(); ++j)
      for (int rep = 0; rep < alpha[j]; ++rep) factor *= k.k[j];
    if (factor != 0.0) out.emplace(k, c * factor);
  }
  return TrigPoly(u.dim(), std::move(out));
}

TrigPoly multiply(const TrigPoly& u, const TrigPoly& v) {
  if (u.dim() != v.dim())
    throw DimensionError("multiplying trig polynomials of different dimensions");
  std::map<Frequency, Complex> out;
  for (const auto& [k, a] : u.coeffs()) {
    for (const auto& [q, b] : v.coeffs()) {
      Frequency sum{k.k};
      for (int j = 0; j < u.dim(); ++j) sum.k[j] += q.k[j];
      auto [it, inserted] = out.emplace(std::move(sum), a * b);
      if (!inserted) it->second += a * b;
    }
  }
  return TrigPoly(u.dim(), std::move(out));
}

double hnorm(const TrigPoly& u, const RoFunction& phi) {
  double s = 0.0;
  for (const auto& [k, c] : u.coeffs()) {
    const double w = phi(smoothed_abs(k));
    s += w * w * std::norm(c);
  }
  return std::sqrt(s);
}

Complex inner_product(const TrigPoly& u, const TrigPoly& v) {
  if (u.dim() != v.dim()) throw DimensionError("inner product of different dimensions");
  Complex s{};
  for (const auto& [k, c] : u.coeffs()) {
    const Complex d = v.coeff(k);
    if (d != Complex{}) s += c * std::conj(d);
  }
  return s;
}

double sup_norm_deriv(const TrigPoly& u, int r) {
  if (r < 0) throw DomainError("derivative order bound must be non-negative");
  const int points = std::max(4 * u.bandwidth() + 4, 8);
  // Enumerate all multi-indices with |beta| <= r.
  std::vector<MultiIndex> betas;
  if (u.dim() == 1) {
    for (int b = 0; b <= r; ++b) betas.push_back({b});
  } else {
    for (int b1 = 0; b1 <= r; ++b1)
      for (int b2 = 0; b1 + b2 <= r; ++b2) betas.push_back({b1, b2});
  }
  double best = 0.0;
  std::vector<double> x(u.dim());
  for (const auto& beta : betas) {
    const TrigPoly du = derivative(u, beta);
    if (u.dim() == 1) {
      for (int i = 0; i < points; ++i) {
        x[0] = 2.0 * M_PI * i / points;
        best = std::max(best, std::abs(du.evaluate(x)));
      }
    } else {
      for (int i = 0; i < points; ++i) {
        x[0] = 2.0 * M_PI * i / points;
        for (int j = 0; j < points; ++j) {
          x[1] = 2.0 * M_PI * j / points;
          best = std::max(best, std::abs(du.evaluate(x)));
        }
      }
    }
  }
  return best;
}

TrigPoly random_trig(int dim, int bandwidth, const RoFunction& phi, double margin,
                     std::uint64_t seed) {
  check_dim(dim);
  if (bandwidth < 0) throw DomainError("bandwidth must be non-negative");
  ComplexNormal z(seed);
  std::map<Frequency, Complex> out;
  std::vector<int> k(dim, -bandwidth);
  // Lexicographic sweep over the full band keeps draws deterministic.
  while (true) {
    Frequency f{k};
    const double t = smoothed_abs(f);
    const double w = phi(t) * std::pow(t, (dim + margin) / 2.0);
    const Complex c = z.next() / w;
    if (c != Complex{}) out.emplace(std::move(f), c);
    int j = dim - 1;
    while (j >= 0 && k[j] == bandwidth) {
      k[j] = -bandwidth;
      --j;
    }
    if (j < 0) break;
    ++k[j];
  }
  return TrigPoly(dim, std::move(out));
}

TrigVector::TrigVector(int p, int dim) : dim_(dim) {
  check_dim(dim);
  if (p < 1) throw DimensionError("vector needs at least one component");
  comps_.assign(p, TrigPoly(dim));
}

TrigVector::TrigVector(std::vector<TrigPoly> components) {
  if (components.empty()) throw DimensionError("vector needs at least one component");
  dim_ = components.front().dim();
  for (const auto& c : components)
    if (c.dim() != dim_) throw DimensionError("vector components disagree on torus dimension");
  comps_ = std::move(components);
}

TrigVector TrigVector::with_component(int i, TrigPoly value) const {
  if (value.dim() != dim_) throw DimensionError("component dimension mismatch");
  TrigVector out = *this;
  out.comps_.at(i) = std::move(value);
  return out;
}

int TrigVector::bandwidth() const {
  int b = 0;
  for (const auto& c : comps_) b = std::max(b, c.bandwidth());
  return b;
}

TrigVector TrigVector::operator+(const TrigVector& o) const {
  if (p() != o.p() || dim_ != o.dim_) throw DimensionError("vector shape mismatch");
  std::vector<TrigPoly> out;
  out.reserve(comps_.size());
  for (int i = 0; i < p(); ++i) out.push_back(comps_[i] + o.comps_[i]);
  return TrigVector(std::move(out));
}

TrigVector TrigVector::operator-(const TrigVector& o) const {
  return *this + (o * Complex(-1.0, 0.0));
}

TrigVector TrigVector::operator*(Complex scale) const {
  std::vector<TrigPoly> out;
  out.reserve(comps_.size());
  for (const auto& c : comps_) out.push_back(c * scale);
  return TrigVector(std::move(out));
}

double hnorm_vector(const TrigVector& u, const RoFunction& phi) {
  double s = 0.0;
  for (const auto& c : u.components()) {
    const double h = hnorm(c, phi);
    s += h * h;
  }
  return std::sqrt(s);
}

double vec_hnorm(const TrigVector& u, const RoFunction& phi, const std::vector<double>& shifts) {
  if (static_cast<int>(shifts.size()) != u.p())
    throw DimensionError("one shift per component is required");
  double s = 0.0;
  for (int i = 0; i < u.p(); ++i) {
    const double h = hnorm(u[i], phi.shifted(shifts[i]));
    s += h * h;
  }
  return std::sqrt(s);
}

Complex inner_product(const TrigVector& u, const TrigVector& v) {
  if (u.p() != v.p() || u.dim() != v.dim()) throw DimensionError("vector shape mismatch");
  Complex s{};
  for (int i = 0; i < u.p(); ++i) s += inner_product(u[i], v[i]);
  return s;
}

}  // namespace sobscale
