#ifndef SOBSCALE_TORUS_HPP
#define SOBSCALE_TORUS_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "sobscale/rofunc.hpp"

namespace sobscale {

using Complex = std::complex<double>;
using MultiIndex = std::vector<int>;  // non-negative entries

/// Integer frequency vector on the n-torus; ordered lexicographically.
struct Frequency {
  std::vector<int> k;
  auto operator<=>(const Frequency&) const = default;
  int dim() const { return static_cast<int>(k.size()); }
  int sup_abs() const;
};

/// Smoothed absolute value (1 + |k|^2)^(1/2).
double smoothed_abs(const Frequency& k);

/**
 * Sparse trigonometric polynomial sum_k c_k e^{i k.x} on [0, 2pi)^n with the
 * coefficient normalization  c_k = (2pi)^{-n} integral u(x) e^{-i k.x} dx,
 * so a single exponential has coefficient 1. Dimensions 1 and 2 are
 * supported. Exactly-zero coefficients are never stored. Value type; all
 * operations build new instances.
 */
class TrigPoly {
public:
  explicit TrigPoly(int dim);
  TrigPoly(int dim, std::map<Frequency, Complex> coeffs);

  static TrigPoly monomial(int dim, Frequency k, Complex c);
  static TrigPoly constant(int dim, Complex c);

  int dim() const { return dim_; }
  const std::map<Frequency, Complex>& coeffs() const { return c_; }
  Complex coeff(const Frequency& k) const;
  bool is_zero() const { return c_.empty(); }
  /// Largest sup-norm |k|_inf over stored frequencies; 0 for the zero poly.
  int bandwidth() const;
  /// Conjugate symmetry c_{-k} = conj(c_k) within tol, relative to the
  /// largest coefficient.
  bool is_real(double tol = 1e-12) const;

  Complex evaluate(const std::vector<double>& x) const;
  TrigPoly conjugate() const;

  TrigPoly operator+(const TrigPoly&) const;
  TrigPoly operator-(const TrigPoly&) const;
  TrigPoly operator*(Complex scale) const;
  TrigPoly operator-() const { return *this * Complex(-1.0, 0.0); }

private:
  int dim_;
  std::map<Frequency, Complex> c_;
};

/// Coefficient-wise derivative for D_j = -i d/dx_j: the coefficient at k is
/// multiplied by k^alpha.
TrigPoly derivative(const TrigPoly& u, const MultiIndex& alpha);

/// Exact sparse convolution product; no truncation, only exact zeros pruned.
TrigPoly multiply(const TrigPoly& u, const TrigPoly& v);

/// Norm (sum_k phi(<k>)^2 |c_k|^2)^(1/2).
double hnorm(const TrigPoly& u, const RoFunction& phi);

/// Coefficient pairing sum_k c_k conj(d_k); equals the L2 inner product
/// scaled by (2pi)^{-n}. Conjugate-linear in the second slot.
Complex inner_product(const TrigPoly& u, const TrigPoly& v);

/// max over |beta| <= r and a uniform grid (at least 4B+4 points per axis)
/// of |D^beta u(x)|.
double sup_norm_deriv(const TrigPoly& u, int r);

/// Seeded sample with coefficients z_k / (phi(<k>) <k>^{(n+margin)/2}) over
/// the band |k|_inf <= bandwidth, z_k standard complex normal drawn in
/// lexicographic frequency order (deterministic per seed).
TrigPoly random_trig(int dim, int bandwidth, const RoFunction& phi, double margin,
                     std::uint64_t seed);

/// Column vector of p trig polynomials sharing one torus dimension.
class TrigVector {
public:
  TrigVector(int p, int dim);
  explicit TrigVector(std::vector<TrigPoly> components);

  int p() const { return static_cast<int>(comps_.size()); }
  int dim() const { return dim_; }
  const TrigPoly& operator[](int i) const { return comps_.at(i); }
  const std::vector<TrigPoly>& components() const { return comps_; }
  TrigVector with_component(int i, TrigPoly value) const;
  int bandwidth() const;

  TrigVector operator+(const TrigVector&) const;
  TrigVector operator-(const TrigVector&) const;
  TrigVector operator*(Complex scale) const;

private:
  int dim_;
  std::vector<TrigPoly> comps_;
};

/// Unshifted vector norm (sum_j hnorm(u_j, phi)^2)^(1/2).
double hnorm_vector(const TrigVector& u, const RoFunction& phi);

/// Shifted vector norm (sum_j hnorm(u_j, phi * t^{shifts_j})^2)^(1/2);
/// shifts may be fractional (used with order drops).
double vec_hnorm(const TrigVector& u, const RoFunction& phi, const std::vector<double>& shifts);

Complex inner_product(const TrigVector& u, const TrigVector& v);

}  // namespace sobscale

#endif
