#ifndef SOBSCALE_FREDHOLM_HPP
#define SOBSCALE_FREDHOLM_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sobscale/errors.hpp"
#include "sobscale/operators.hpp"

namespace sobscale {

/// Full (unlocalized) symbol matrix A(k) of a constant-coefficient system at
/// an integer frequency. Non-constant coefficients are rejected.
Eigen::MatrixXcd full_symbol_const(const MatrixDiffOp& A, const Frequency& k);

enum class ScanGuarantee { Exact, HeuristicRadius };

struct SingularScanOptions {
  int user_radius = 16;    // minimum scan radius in |k|_inf
  int certified_cap = 512; // largest certified radius worth scanning
  double rank_rel_tol = 1e-8;
};

struct SingularScan {
  std::vector<std::pair<Frequency, int>> frequencies;  // (k, nullity of A(k))
  ScanGuarantee guarantee = ScanGuarantee::HeuristicRadius;
  int radius = 0;
};

/// Integer frequencies where det A(k) = 0, for elliptic constant-coefficient
/// systems. On the line the scan radius is certified by the Cauchy root
/// bound of the determinant polynomial (guarantee Exact). On the plane a
/// lower bound on |det| away from a computable radius certifies the scan
/// when that radius is affordable; otherwise the scan stops at user_radius
/// and the guarantee downgrades to HeuristicRadius.
SingularScan singular_frequencies(const MatrixDiffOp& A, SingularScanOptions options = {});

struct FredholmReport {
  std::vector<TrigVector> kernel_basis;    // orthonormal under the coefficient pairing
  std::vector<TrigVector> cokernel_basis;  // likewise
  int index = 0;
  std::vector<std::pair<Frequency, int>> singular_frequencies;
  ScanGuarantee guarantee = ScanGuarantee::HeuristicRadius;
  int scan_radius = 0;
};

FredholmReport kernel_cokernel(const MatrixDiffOp& A, SingularScanOptions options = {});

/// Thrown when f has a component along the cokernel above tolerance; carries
/// the violating cokernel element.
class IncompatibleDataError : public Error {
public:
  IncompatibleDataError(const std::string& msg, TrigVector witness, double overlap)
      : Error(msg), witness_(std::move(witness)), overlap_(overlap) {}
  const TrigVector& witness() const { return witness_; }
  double overlap() const { return overlap_; }

private:
  TrigVector witness_;
  double overlap_;
};

struct SolveResult {
  TrigVector u;
  double residual = 0.0;               // hnorm_vector(A u - f, phi)
  double compatibility_violation = 0.0;
  bool projected = false;              // true when a singular frequency was handled
};

struct SolveOptions {
  double compat_tol = 1e-8;
  double rank_rel_tol = 1e-8;
};

/// Frequency-by-frequency solve of A u = f for constant coefficients:
/// direct inversion at regular frequencies, the minimum-norm pseudo-solution
/// at singular ones (so u is orthogonal to the kernel directions there).
SolveResult solve_const(const MatrixDiffOp& A, const TrigVector& f, const RoFunction& phi,
                        SolveOptions options = {});

struct GalerkinOptions {
  double rank_rel_tol = 1e-8;
  double compat_tol = 1e-8;
  long max_rows = 20000;      // memory guard on the dense matrix
  double two_path_tol = 1e-8; // agreement bound for the adjoint-assembled matrix
  std::optional<RoFunction> residual_phi;  // norm for the reported residual; default phi == 1
};

struct GalerkinResult {
  SolveResult result;
  int numerical_kernel_dim = 0;
  int numerical_cokernel_dim = 0;
  /// max entry gap between the conjugate transpose of the assembled matrix
  /// and the independently assembled matrix of the formal adjoint.
  double two_path_gap = 0.0;
};

/// Dense compression of A onto span{e^{i k.x} e_j : |k|_inf <= K}, solved by
/// rank-truncated least squares. Requires an elliptic A and f bandlimited to
/// K minus the coefficient bandwidth. The residual is measured against the
/// full (uncompressed) action of A.
GalerkinResult solve_galerkin(const MatrixDiffOp& A, const TrigVector& f, int K,
                              GalerkinOptions options = {});

/// u minus its components along the kernel basis.
TrigVector project_kernel_complement(const TrigVector& u, const FredholmReport& report);

/// f minus its components along the cokernel basis (projection onto the range).
TrigVector project_range(const TrigVector& f, const FredholmReport& report);

}  // namespace sobscale

#endif
