#include "biotline/linsolve.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/CholmodSupport>
#include <Eigen/SparseLU>

namespace biotline {

namespace {

constexpr int kRefinementSweeps = 3;

std::string describe(const char* what, double residual, double tol) {
  std::ostringstream msg;
  msg << what << ": relative residual " << residual << " exceeds tolerance " << tol;
  return msg.str();
}

void check_finite(const SparseMatrix& a, const Vector& b) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw std::invalid_argument("linear system dimensions are inconsistent");
  }
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      if (!std::isfinite(it.value())) throw std::invalid_argument("matrix has non-finite entries");
    }
  }
  if (!b.allFinite()) throw std::invalid_argument("right-hand side has non-finite entries");
}

// Solves, then refines while the residual is above tol.
template <class Factor>
Vector refine(const Factor& solve_once, const SparseMatrix& a, const Vector& b, double tol, const char* label) {
  const double bnorm = b.norm();
  if (bnorm == 0.0) return Vector::Zero(b.size());
  Vector x = solve_once(b);
  double res = relative_residual(a, x, b);
  for (int sweep = 0; sweep < kRefinementSweeps && !(res <= tol); ++sweep) {
    x += solve_once(b - a * x);
    res = relative_residual(a, x, b);
  }
  if (!(res <= tol)) throw SolveError(describe(label, res, tol), res);
  return x;
}

}  // namespace

double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& b) {
  const double bnorm = b.norm();
  const double r = (a * x - b).norm();
  return bnorm == 0.0 ? r : r / bnorm;
}

struct SpdSolver::Impl {
  Eigen::CholmodSupernodalLLT<SparseMatrix> llt;
};

SpdSolver::SpdSolver(const SparseMatrix& matrix) : matrix_(matrix), impl_(std::make_unique<Impl>()) {
  check_finite(matrix_, Vector::Zero(matrix_.rows()));
  impl_->llt.compute(matrix_);
  if (impl_->llt.info() != Eigen::Success) {
    throw SolveError("Cholesky factorization failed (matrix not SPD?)", std::numeric_limits<double>::quiet_NaN());
  }
}

SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

Vector SpdSolver::apply_inverse(const Vector& rhs) const { return impl_->llt.solve(rhs); }

Vector SpdSolver::solve(const Vector& rhs, double tol) const {
  auto once = [this](const Vector& b) -> Vector { return apply_inverse(b); };
  return refine(once, matrix_, rhs, tol, "Cholesky solve");
}

Vector solve(const LinearSystem& system, double tol) {
  check_finite(system.matrix, system.rhs);
  if (system.kind == SystemKind::Spd) return SpdSolver(system.matrix).solve(system.rhs, tol);

  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  SparseMatrix a = system.matrix;
  a.makeCompressed();
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) {
    throw SolveError("sparse LU factorization failed: " + lu.lastErrorMessage(),
                     std::numeric_limits<double>::quiet_NaN());
  }
  auto once = [&lu](const Vector& b) -> Vector { return lu.solve(b); };
  return refine(once, a, system.rhs, tol, "sparse LU solve");
}

namespace {

Vector positive_diagonal(const SparseMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("pressure mass must be square");
  Vector d = m.diagonal();
  if (m.nonZeros() != static_cast<Eigen::Index>((d.array() != 0.0).count()) || !(d.array() > 0.0).all()) {
    throw std::invalid_argument("pressure mass must be diagonal with positive entries");
  }
  return d;
}

SparseMatrix condensed_matrix(const Vector& d, const SparseMatrix& div, const SparseMatrix& flux_mass, double scale) {
  const SparseMatrix scaled_div = (scale * d.cwiseInverse()).asDiagonal() * div;
  SparseMatrix s = flux_mass + SparseMatrix(div.transpose()) * scaled_div;
  s.makeCompressed();
  return s;
}

}  // namespace

MixedDarcySolver::MixedDarcySolver(const SparseMatrix& pressure_mass, const SparseMatrix& divergence,
                                   const SparseMatrix& flux_mass, double scale)
    : d_(positive_diagonal(pressure_mass)),
      div_(divergence),
      flux_mass_(flux_mass),
      scale_(scale),
      condensed_(condensed_matrix(d_, divergence, flux_mass, scale)) {}

std::pair<Vector, Vector> MixedDarcySolver::solve(const Vector& rhs_p, const Vector& rhs_w, double tol) const {
  if (rhs_p.size() != d_.size() || rhs_w.size() != flux_mass_.rows()) {
    throw std::invalid_argument("mixed Darcy right-hand side has wrong size");
  }
  const Vector dinv = d_.cwiseInverse();
  auto eliminate = [&](const Vector& bp, const Vector& bw) {
    Vector w = condensed_.apply_inverse(bw + div_.transpose() * dinv.cwiseProduct(bp));
    Vector p = dinv.cwiseProduct(bp - scale_ * (div_ * w));
    return std::pair{std::move(p), std::move(w)};
  };
  auto residual = [&](const Vector& p, const Vector& w) {
    return std::pair<Vector, Vector>{rhs_p - d_.cwiseProduct(p) - scale_ * (div_ * w),
                                     rhs_w - flux_mass_ * w + div_.transpose() * p};
  };

  const double bnorm = std::sqrt(rhs_p.squaredNorm() + rhs_w.squaredNorm());
  if (bnorm == 0.0) return {Vector::Zero(rhs_p.size()), Vector::Zero(rhs_w.size())};
  auto [p, w] = eliminate(rhs_p, rhs_w);
  double res = 0.0;
  for (int sweep = 0;; ++sweep) {
    const auto [rp, rw] = residual(p, w);
    res = std::sqrt(rp.squaredNorm() + rw.squaredNorm()) / bnorm;
    if (res <= tol || sweep == kRefinementSweeps) break;
    const auto [dp, dw] = eliminate(rp, rw);
    p += dp;
    w += dw;
  }
  if (!(res <= tol)) throw SolveError(describe("mixed Darcy solve", res, tol), res);
  return {std::move(p), std::move(w)};
}

SparseMatrix MixedDarcySolver::block_matrix() const {
  const int np = static_cast<int>(d_.size());
  const int nw = static_cast<int>(flux_mass_.rows());
  std::vector<Eigen::Triplet<double>> trips;
  for (int i = 0; i < np; ++i) trips.emplace_back(i, i, d_[i]);
  for (int k = 0; k < div_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(div_, k); it; ++it) {
      trips.emplace_back(it.row(), np + it.col(), scale_ * it.value());
      trips.emplace_back(np + it.col(), it.row(), -it.value());
    }
  }
  for (int k = 0; k < flux_mass_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(flux_mass_, k); it; ++it) {
      trips.emplace_back(np + it.row(), np + it.col(), it.value());
    }
  }
  SparseMatrix m(np + nw, np + nw);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return m;
}

}  // namespace biotline
