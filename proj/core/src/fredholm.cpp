#include "sobscale/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace sobscale {

namespace {

int abs_order(const MultiIndex& alpha) { return std::accumulate(alpha.begin(), alpha.end(), 0); }

Complex constant_coeff(const TrigPoly& a) {
  if (a.bandwidth() != 0)
    throw DomainError("constant coefficients are required here; use the dense compression "
                      "for variable coefficients");
  return a.coeff(Frequency{std::vector<int>(a.dim(), 0)});
}

// Ascending-coefficient univariate polynomial arithmetic for the line case.
using Poly = std::vector<Complex>;

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, Complex{});
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly poly_add(Poly a, const Poly& b) {
  if (b.size() > a.size()) a.resize(b.size(), Complex{});
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}

// det of a matrix of polynomials via cofactor expansion over active columns.
Poly poly_det(const std::vector<Poly>& entries, int p, std::vector<int>& cols, int row) {
  if (static_cast<int>(cols.size()) == 1)
    return entries[row * p + cols[0]];
  Poly acc{Complex{}};
  for (std::size_t pick = 0; pick < cols.size(); ++pick) {
    const int col = cols[pick];
    std::vector<int> rest;
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (i != pick) rest.push_back(cols[i]);
    Poly minor = poly_det(entries, p, rest, row + 1);
    Poly term = poly_mul(entries[row * p + col], minor);
    if (pick % 2 == 1)
      for (auto& c : term) c = -c;
    acc = poly_add(std::move(acc), term);
  }
  return acc;
}

int nullity_of(const Eigen::MatrixXcd& M, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  const auto& sv = svd.singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  if (top == 0.0) return static_cast<int>(M.cols());
  int count = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) < rel_tol * top) ++count;
  return count;
}

// Unit-normalizes and fixes the phase so the largest-magnitude entry is real
// positive; keeps emitted bases deterministic.
Eigen::VectorXcd canonical_phase(Eigen::VectorXcd v) {
  int arg = 0;
  double best = -1.0;
  for (int i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) > best) {
      best = std::abs(v(i));
      arg = i;
    }
  if (best > 0.0) v *= std::conj(v(arg)) / std::abs(v(arg));
  v.normalize();
  return v;
}

TrigVector monomial_vector(int p, int dim, const Frequency& k, const Eigen::VectorXcd& v) {
  std::vector<TrigPoly> comps;
  comps.reserve(p);
  for (int j = 0; j < p; ++j) comps.push_back(TrigPoly::monomial(dim, k, v(j)));
  return TrigVector(std::move(comps));
}

void append_null_bases(const MatrixDiffOp& A, const Frequency& k, double rank_rel_tol,
                       std::vector<TrigVector>& kernel, std::vector<TrigVector>& cokernel) {
  const Eigen::MatrixXcd M = full_symbol_const(A, k);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  for (int i = 0; i < sv.size(); ++i) {
    if (top != 0.0 && sv(i) >= rank_rel_tol * top) continue;
    kernel.push_back(monomial_vector(A.p(), A.dim(), k, canonical_phase(svd.matrixV().col(i))));
    cokernel.push_back(monomial_vector(A.p(), A.dim(), k, canonical_phase(svd.matrixU().col(i))));
  }
}

}  // namespace

Eigen::MatrixXcd full_symbol_const(const MatrixDiffOp& A, const Frequency& k) {
  if (k.dim() != A.dim()) throw DimensionError("frequency length does not match the system");
  Eigen::MatrixXcd M(A.p(), A.p());
  for (int row = 0; row < A.p(); ++row)
    for (int col = 0; col < A.p(); ++col) {
      Complex sum{};
      for (const auto& [alpha, a] : A.entry(row, col).terms()) {
        double mono = 1.0;
        for (int j = 0; j < A.dim(); ++j)
          for (int rep = 0; rep < alpha[j]; ++rep) mono *= k.k[j];
        sum += constant_coeff(a) * mono;
      }
      M(row, col) = sum;
    }
  return M;
}

SingularScan singular_frequencies(const MatrixDiffOp& A, SingularScanOptions options) {
  if (!A.constant_coefficients())
    throw DomainError("the singular-frequency scan needs constant coefficients");
  const EllipticityResult ell = ellipticity_check(A);
  if (!ell.elliptic) {
    std::ostringstream msg;
    msg << "system is not elliptic: min |det principal symbol| = " << ell.min_abs_det;
    throw EllipticityError(msg.str(), ell.min_abs_det);
  }

  SingularScan scan;
  if (A.dim() == 1) {
    // det A(k) as an exact polynomial in k; the Cauchy bound certifies that
    // every root, hence every singular integer, lies inside the scan radius.
    std::vector<Poly> entries(A.p() * A.p());
    for (int row = 0; row < A.p(); ++row)
      for (int col = 0; col < A.p(); ++col) {
        Poly e{Complex{}};
        for (const auto& [alpha, a] : A.entry(row, col).terms()) {
          Poly t(alpha[0] + 1, Complex{});
          t[alpha[0]] = constant_coeff(a);
          e = poly_add(std::move(e), t);
        }
        entries[row * A.p() + col] = std::move(e);
      }
    std::vector<int> cols(A.p());
    std::iota(cols.begin(), cols.end(), 0);
    Poly det = poly_det(entries, A.p(), cols, 0);
    std::size_t deg = det.size() - 1;
    while (deg > 0 && std::abs(det[deg]) == 0.0) --deg;
    double worst = 0.0;
    for (std::size_t i = 0; i < deg; ++i)
      worst = std::max(worst, std::abs(det[i]) / std::abs(det[deg]));
    scan.radius = static_cast<int>(std::floor(1.0 + worst));
    scan.guarantee = ScanGuarantee::Exact;
    for (int k = -scan.radius; k <= scan.radius; ++k) {
      const Frequency f{{k}};
      const int nullity = nullity_of(full_symbol_const(A, f), options.rank_rel_tol);
      if (nullity > 0) scan.frequencies.emplace_back(f, nullity);
    }
    return scan;
  }

  // Plane case. |det A(xi)| >= c_e |xi|^M - C_low |xi|^{M-1} for |xi| >= 1,
  // so nothing is singular beyond C_low / c_e. c_e comes from a fine grid
  // with a factor-of-two safety margin.
  EllipticityOptions fine;
  fine.sphere_grid = 720;
  const double c_e = 0.5 * ellipticity_check(A, fine).min_abs_det;
  const std::vector<int> m = A.column_orders();
  const int p = A.p();
  Eigen::MatrixXd principal_mass(p, p), lower_mass(p, p);
  for (int row = 0; row < p; ++row)
    for (int col = 0; col < p; ++col) {
      double pr = 0.0, lo = 0.0;
      for (const auto& [alpha, a] : A.entry(row, col).terms()) {
        const double mag = std::abs(constant_coeff(a));
        (abs_order(alpha) == m[col] ? pr : lo) += mag;
      }
      principal_mass(row, col) = pr;
      lower_mass(row, col) = lo;
    }
  double c_low = 0.0;
  std::vector<int> perm(p);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    double with = 1.0, without = 1.0;
    for (int j = 0; j < p; ++j) {
      with *= principal_mass(perm[j], j) + lower_mass(perm[j], j);
      without *= principal_mass(perm[j], j);
    }
    c_low += with - without;
  } while (std::next_permutation(perm.begin(), perm.end()));

  const int certified = static_cast<int>(std::ceil(c_low / c_e)) + 1;
  if (certified <= options.certified_cap) {
    scan.radius = std::max(options.user_radius, certified);
    scan.guarantee = ScanGuarantee::Exact;
  } else {
    scan.radius = options.user_radius;
    scan.guarantee = ScanGuarantee::HeuristicRadius;
  }
  for (int k1 = -scan.radius; k1 <= scan.radius; ++k1)
    for (int k2 = -scan.radius; k2 <= scan.radius; ++k2) {
      const Frequency f{{k1, k2}};
      const int nullity = nullity_of(full_symbol_const(A, f), options.rank_rel_tol);
      if (nullity > 0) scan.frequencies.emplace_back(f, nullity);
    }
  return scan;
}

FredholmReport kernel_cokernel(const MatrixDiffOp& A, SingularScanOptions options) {
  const SingularScan scan = singular_frequencies(A, options);
  FredholmReport report;
  report.singular_frequencies = scan.frequencies;
  report.guarantee = scan.guarantee;
  report.scan_radius = scan.radius;
  for (const auto& [k, nullity] : scan.frequencies)
    append_null_bases(A, k, options.rank_rel_tol, report.kernel_basis, report.cokernel_basis);
  report.index =
      static_cast<int>(report.kernel_basis.size()) - static_cast<int>(report.cokernel_basis.size());
  return report;
}

SolveResult solve_const(const MatrixDiffOp& A, const TrigVector& f, const RoFunction& phi,
                        SolveOptions options) {
  if (f.p() != A.p() || f.dim() != A.dim()) throw DimensionError("data shape mismatch");
  singular_frequencies(A);  // validates constant coefficients and ellipticity

  // Collect the support of f.
  std::map<Frequency, Eigen::VectorXcd> fhat;
  for (int j = 0; j < f.p(); ++j)
    for (const auto& [k, c] : f[j].coeffs()) {
      auto [it, inserted] = fhat.emplace(k, Eigen::VectorXcd::Zero(f.p()));
      it->second(j) = c;
    }

  std::vector<TrigPoly> comps(A.p(), TrigPoly(A.dim()));
  double worst_violation = 0.0;
  bool projected = false;
  std::optional<std::pair<TrigVector, double>> witness;

  for (const auto& [k, rhs] : fhat) {
    const Eigen::MatrixXcd M = full_symbol_const(A, k);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double top = sv.size() ? sv(0) : 0.0;
    Eigen::VectorXcd coeffs = svd.matrixU().adjoint() * rhs;
    Eigen::VectorXcd solved = Eigen::VectorXcd::Zero(A.p());
    for (int i = 0; i < sv.size(); ++i) {
      if (top == 0.0 || sv(i) < options.rank_rel_tol * top) {
        const double overlap = std::abs(coeffs(i));
        projected = true;
        if (overlap > worst_violation) {
          worst_violation = overlap;
          witness = {monomial_vector(A.p(), A.dim(), k, canonical_phase(svd.matrixU().col(i))),
                     overlap};
        }
        continue;  // minimum-norm: drop the defective direction
      }
      solved += svd.matrixV().col(i) * (coeffs(i) / sv(i));
    }
    for (int j = 0; j < A.p(); ++j)
      if (solved(j) != Complex{})
        comps[j] = comps[j] + TrigPoly::monomial(A.dim(), k, solved(j));
  }

  if (worst_violation > options.compat_tol) {
    std::ostringstream msg;
    msg << "right-hand side is not in the range: overlap " << worst_violation
        << " with a cokernel direction exceeds tolerance " << options.compat_tol;
    throw IncompatibleDataError(msg.str(), std::move(witness->first), witness->second);
  }

  SolveResult out{TrigVector(std::move(comps)), 0.0, worst_violation, projected};
  out.residual = hnorm_vector(A.apply(out.u) - f, phi);
  return out;
}

namespace {

std::vector<Frequency> band_frequencies(int dim, int K) {
  std::vector<Frequency> out;
  if (dim == 1) {
    for (int k = -K; k <= K; ++k) out.push_back(Frequency{{k}});
  } else {
    for (int k1 = -K; k1 <= K; ++k1)
      for (int k2 = -K; k2 <= K; ++k2) out.push_back(Frequency{{k1, k2}});
  }
  return out;
}

Eigen::MatrixXcd assemble(const MatrixDiffOp& A, const std::vector<Frequency>& band,
                          const std::map<Frequency, int>& pos, int K) {
  const int N = static_cast<int>(band.size());
  const int D = A.p() * N;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(D, D);
  for (int comp = 0; comp < A.p(); ++comp)
    for (int fi = 0; fi < N; ++fi) {
      const int col = comp * N + fi;
      TrigVector basis(A.p(), A.dim());
      basis = basis.with_component(comp, TrigPoly::monomial(A.dim(), band[fi], 1.0));
      const TrigVector image = A.apply(basis);
      for (int row_comp = 0; row_comp < A.p(); ++row_comp)
        for (const auto& [k, c] : image[row_comp].coeffs()) {
          if (k.sup_abs() > K) continue;  // compression: spill outside the span is dropped
          M(row_comp * N + pos.at(k), col) = c;
        }
    }
  return M;
}

}  // namespace

GalerkinResult solve_galerkin(const MatrixDiffOp& A, const TrigVector& f, int K,
                              GalerkinOptions options) {
  if (f.p() != A.p() || f.dim() != A.dim()) throw DimensionError("data shape mismatch");
  const EllipticityResult ell = ellipticity_check(A);
  if (!ell.elliptic) {
    std::ostringstream msg;
    msg << "system is not elliptic: min |det principal symbol| = " << ell.min_abs_det;
    throw EllipticityError(msg.str(), ell.min_abs_det);
  }
  if (f.bandwidth() > K - A.coefficient_bandwidth())
    throw DomainError("right-hand side bandwidth exceeds K minus the coefficient bandwidth");

  const std::vector<Frequency> band = band_frequencies(A.dim(), K);
  const long rows = static_cast<long>(A.p()) * band.size();
  if (rows > options.max_rows)
    throw DomainError("dense compression would need " + std::to_string(rows) +
                      " rows, above the guard of " + std::to_string(options.max_rows));
  std::map<Frequency, int> pos;
  for (std::size_t i = 0; i < band.size(); ++i) pos.emplace(band[i], static_cast<int>(i));

  const Eigen::MatrixXcd M = assemble(A, band, pos, K);
  const Eigen::MatrixXcd Madj = assemble(A.formal_adjoint(), band, pos, K);
  const double two_path_gap = (Madj - M.adjoint()).cwiseAbs().maxCoeff();
  if (two_path_gap > options.two_path_tol)
    throw Error("adjoint-assembled compression disagrees with the conjugate transpose by " +
                std::to_string(two_path_gap));

  const int N = static_cast<int>(band.size());
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(A.p() * N);
  for (int j = 0; j < A.p(); ++j)
    for (const auto& [k, c] : f[j].coeffs()) rhs(j * N + pos.at(k)) = c;

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  Eigen::VectorXcd coeffs = svd.matrixU().adjoint() * rhs;
  Eigen::VectorXcd solved = Eigen::VectorXcd::Zero(A.p() * N);
  int null_dim = 0;
  double violation = 0.0;
  for (int i = 0; i < sv.size(); ++i) {
    if (top == 0.0 || sv(i) < options.rank_rel_tol * top) {
      ++null_dim;
      violation = std::max(violation, std::abs(coeffs(i)));
      continue;
    }
    solved += svd.matrixV().col(i) * (coeffs(i) / sv(i));
  }
  if (violation > options.compat_tol)
    throw IncompatibleDataError(
        "right-hand side overlaps the numerical cokernel by " + std::to_string(violation),
        TrigVector(A.p(), A.dim()), violation);

  std::vector<TrigPoly> comps;
  comps.reserve(A.p());
  for (int j = 0; j < A.p(); ++j) {
    std::map<Frequency, Complex> c;
    for (int fi = 0; fi < N; ++fi)
      if (solved(j * N + fi) != Complex{}) c.emplace(band[fi], solved(j * N + fi));
    comps.emplace_back(A.dim(), std::move(c));
  }

  SolveResult sres{TrigVector(std::move(comps)), 0.0, violation, null_dim > 0};
  const RoFunction phi = options.residual_phi ? *options.residual_phi : RoFunction::log_power(0.0);
  sres.residual = hnorm_vector(A.apply(sres.u) - f, phi);
  GalerkinResult out{std::move(sres), null_dim, null_dim, two_path_gap};
  return out;
}

namespace {

TrigVector subtract_span(const TrigVector& v, const std::vector<TrigVector>& basis) {
  TrigVector out = v;
  for (const auto& b : basis) {
    const Complex overlap = inner_product(out, b);
    if (overlap != Complex{}) out = out - b * overlap;
  }
  return out;
}

}  // namespace

TrigVector project_kernel_complement(const TrigVector& u, const FredholmReport& report) {
  return subtract_span(u, report.kernel_basis);
}

TrigVector project_range(const TrigVector& f, const FredholmReport& report) {
  return subtract_span(f, report.cokernel_basis);
}

}  // namespace sobscale
