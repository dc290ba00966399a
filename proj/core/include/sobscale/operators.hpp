#ifndef SOBSCALE_OPERATORS_HPP
#define SOBSCALE_OPERATORS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "sobscale/torus.hpp"

namespace sobscale {

/**
 * Linear differential expression sum_alpha a_alpha(x) D^alpha with
 * trig-polynomial coefficients, D_j = -i d/dx_j, so the full symbol of
 * D^alpha is xi^alpha. Canonical form: one term per multi-index, zero
 * coefficients dropped.
 */
class ScalarDiffOp {
public:
  explicit ScalarDiffOp(int dim);  // the zero expression

  static ScalarDiffOp derivative_op(int dim, MultiIndex alpha);
  static ScalarDiffOp multiplication(const TrigPoly& a);
  static ScalarDiffOp term(MultiIndex alpha, TrigPoly a);

  int dim() const { return dim_; }
  const std::map<MultiIndex, TrigPoly>& terms() const { return terms_; }
  /// Highest |alpha| with a nonzero coefficient; -1 for the zero expression.
  int order() const;
  bool is_zero() const { return terms_.empty(); }
  bool constant_coefficients() const;
  /// Largest bandwidth over the coefficients.
  int coefficient_bandwidth() const;

  ScalarDiffOp operator+(const ScalarDiffOp&) const;
  ScalarDiffOp operator*(Complex scale) const;

  TrigPoly apply(const TrigPoly& u) const;

  /// Formal adjoint under the coefficient pairing: the adjoint of a(x) D^alpha
  /// maps v to D^alpha(conj(a) v), expanded into canonical terms by the
  /// Leibniz rule.
  ScalarDiffOp formal_adjoint() const;

  /// Full symbol sum_alpha a_alpha(x) xi^alpha at a point (x, xi).
  Complex full_symbol(const std::vector<double>& x, const std::vector<double>& xi) const;
  /// Only the terms with |alpha| = top_order.
  Complex principal_symbol(const std::vector<double>& x, const std::vector<double>& xi,
                           int top_order) const;

private:
  int dim_;
  std::map<MultiIndex, TrigPoly> terms_;
};

/**
 * Square p x p system of scalar expressions (p >= 2). Column orders
 * m_k = max_j ord A_{j,k} are recomputed from the entries on demand; every
 * column must contain a nonzero entry.
 */
class MatrixDiffOp {
public:
  MatrixDiffOp(int p, int dim, std::vector<ScalarDiffOp> entries_row_major);

  int p() const { return p_; }
  int dim() const { return dim_; }
  const ScalarDiffOp& entry(int row, int col) const;
  std::vector<int> column_orders() const;
  bool constant_coefficients() const;
  int coefficient_bandwidth() const;

  TrigVector apply(const TrigVector& u) const;

  /// Entry-wise formal adjoint of the transpose.
  MatrixDiffOp formal_adjoint() const;

private:
  int p_, dim_;
  std::vector<ScalarDiffOp> e_;
};

/// Principal symbol matrix at one point: entry (j,k) sums the terms of
/// A_{j,k} with |alpha| equal to the column order m_k (zero when the entry's
/// order is lower).
struct SymbolMatrix {
  Eigen::MatrixXcd matrix;
  std::vector<double> x, xi;
};

SymbolMatrix principal_symbol(const MatrixDiffOp& A, const std::vector<double>& x,
                              const std::vector<double>& xi);

struct EllipticityOptions {
  int x_grid = 64;       // points per x-axis
  int sphere_grid = 360; // directions on the unit circle (dimension 2)
  double tol = 1e-9;
};

struct EllipticityResult {
  double min_abs_det = 0.0;
  bool elliptic = false;
};

/// min |det principal symbol| over an x-grid and unit directions
/// ({-1, +1} on the line, sphere_grid angles on the circle). The principal
/// determinant is homogeneous in xi, so unit directions suffice.
EllipticityResult ellipticity_check(const MatrixDiffOp& A, EllipticityOptions options = {});

/// Ratio curve (bandwidth, max over seeded samples of
/// hnorm_vector(A u, phi) / vec_hnorm(u, phi, m)) over a doubling bandwidth
/// schedule 4, 8, ..., B_max. A flattening curve evidences boundedness.
struct BoundednessCurve {
  std::vector<std::pair<int, double>> points;
};

BoundednessCurve boundedness_estimate(const MatrixDiffOp& A, const RoFunction& phi, int samples,
                                      int B_max, std::uint64_t seed);

}  // namespace sobscale

#endif
