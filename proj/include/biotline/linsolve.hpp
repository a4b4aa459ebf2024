#pragma once

#include <memory>
#include <stdexcept>

#include "biotline/fem.hpp"

namespace biotline {

/// Raised when a factorization breaks down or the residual contract fails.
class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  /// Relative residual achieved, or NaN if no solution was produced.
  double residual() const { return residual_; }

 private:
  double residual_;
};

enum class SystemKind { Spd, SaddlePoint };

struct LinearSystem {
  SparseMatrix matrix;
  Vector rhs;
  SystemKind kind = SystemKind::SaddlePoint;
};

inline constexpr double kDefaultSolveTolerance = 1e-10;

/// Direct solve: supernodal Cholesky for SPD systems, sparse LU otherwise.
/// Guarantees |A x - b| <= tol |b| (after up to three refinement sweeps)
/// or throws SolveError.
Vector solve(const LinearSystem& system, double tol = kDefaultSolveTolerance);

double relative_residual(const SparseMatrix& a, const Vector& x, const Vector& b);

/// Cholesky factorization of an SPD matrix, reused across many solves.
class SpdSolver {
 public:
  explicit SpdSolver(const SparseMatrix& matrix);
  ~SpdSolver();
  SpdSolver(SpdSolver&&) noexcept;
  SpdSolver& operator=(SpdSolver&&) noexcept;

  Vector solve(const Vector& rhs, double tol = kDefaultSolveTolerance) const;
  /// One forward/backward substitution, no residual check.
  Vector apply_inverse(const Vector& rhs) const;
  const SparseMatrix& matrix() const { return matrix_; }

 private:
  struct Impl;
  SparseMatrix matrix_;
  std::unique_ptr<Impl> impl_;
};

/// Solver for the two-field mixed system
///
///   [ D     scale*B ] [p]   [r_p]
///   [ -B^T  Mw      ] [w] = [r_w]
///
/// with D diagonal positive (P0 mass), B the divergence matrix and Mw the
/// RT0 mass. p is eliminated exactly, leaving the SPD system
/// (Mw + scale B^T D^-1 B) w = r_w + B^T D^-1 r_p, which is factorized once.
class MixedDarcySolver {
 public:
  MixedDarcySolver(const SparseMatrix& pressure_mass, const SparseMatrix& divergence, const SparseMatrix& flux_mass,
                   double scale);

  /// Returns (p, w). Refines against the residual of the block system, which
  /// must end up below tol relative to |(r_p, r_w)|.
  std::pair<Vector, Vector> solve(const Vector& rhs_p, const Vector& rhs_w,
                                  double tol = kDefaultSolveTolerance) const;

  /// The block system in assembled form (for generic solves and checks).
  SparseMatrix block_matrix() const;

 private:
  Vector d_;
  SparseMatrix div_;
  SparseMatrix flux_mass_;
  double scale_;
  SpdSolver condensed_;
};

}  // namespace biotline
