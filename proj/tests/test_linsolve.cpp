#include <cmath>
#include <limits>

#include "biotline/linsolve.hpp"
#include "doctest.h"

using namespace biotline;

namespace {

SparseMatrix dense_to_sparse(const Eigen::MatrixXd& d) { return d.sparseView(); }

}  // namespace

TEST_CASE("identity system returns the right-hand side") {
  LinearSystem s;
  s.matrix = dense_to_sparse(Eigen::MatrixXd::Identity(5, 5));
  s.rhs = Vector::LinSpaced(5, 1.0, 5.0);
  for (SystemKind kind : {SystemKind::Spd, SystemKind::SaddlePoint}) {
    s.kind = kind;
    CHECK((solve(s) - s.rhs).norm() == 0.0);
  }
}

TEST_CASE("2x2 saddle point") {
  Eigen::MatrixXd a(2, 2);
  a << 1, 1, 1, 0;
  LinearSystem s{dense_to_sparse(a), Vector::Ones(2), SystemKind::SaddlePoint};
  const Vector x = solve(s);
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(std::abs(x[1]) < 1e-15);
}

TEST_CASE("failures are reported") {
  Eigen::MatrixXd singular(2, 2);
  singular << 1, 2, 2, 4;
  CHECK_THROWS_AS(solve({dense_to_sparse(singular), Vector::Ones(2), SystemKind::SaddlePoint}), SolveError);

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1, 0, 0, -1;
  CHECK_THROWS_AS(solve({dense_to_sparse(indefinite), Vector::Ones(2), SystemKind::Spd}), SolveError);

  CHECK_THROWS_AS(solve({dense_to_sparse(Eigen::MatrixXd::Identity(3, 3)), Vector::Ones(2), SystemKind::Spd}),
                  std::invalid_argument);
  Vector bad = Vector::Ones(2);
  bad[1] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(solve({dense_to_sparse(Eigen::MatrixXd::Identity(2, 2)), bad, SystemKind::Spd}),
                  std::invalid_argument);
}

TEST_CASE("zero right-hand side") {
  LinearSystem s{dense_to_sparse(Eigen::MatrixXd::Identity(3, 3) * 2.0), Vector::Zero(3), SystemKind::Spd};
  CHECK(solve(s).norm() == 0.0);
}

TEST_CASE("n = 4 flow system") {
  const Mesh mesh = build_structured_tet_mesh(4);
  const MaterialParams params;
  const double tau = 0.1;
  const SparseMatrix mp = assemble_p_mass(mesh, 1.0 / params.biot_modulus + params.beta_fs());
  const SparseMatrix b = assemble_div(mesh);
  const SparseMatrix mw = assemble_rt0_mass(mesh, 1.0 / params.kappa);
  const MixedDarcySolver darcy(mp, b, mw, tau);

  Vector rp(mesh.num_cells()), rw(mesh.num_faces());
  for (int c = 0; c < rp.size(); ++c) rp[c] = std::sin(0.37 * c) * 1e-3;
  for (int f = 0; f < rw.size(); ++f) rw[f] = std::cos(0.11 * f);
  const auto [p, w] = darcy.solve(rp, rw);

  const SparseMatrix block = darcy.block_matrix();
  Vector x(p.size() + w.size()), rhs(p.size() + w.size());
  x << p, w;
  rhs << rp, rw;
  CHECK(relative_residual(block, x, rhs) < 1e-10);

  // Same system through the generic LU path.
  const Vector lu = solve({block, rhs, SystemKind::SaddlePoint});
  CHECK(relative_residual(block, lu, rhs) < 1e-10);
  CHECK((lu - x).norm() < 1e-8 * x.norm());

  CHECK_THROWS_AS(darcy.solve(Vector::Zero(3), rw), std::invalid_argument);
  CHECK_THROWS_AS(MixedDarcySolver(mw, b, mw, tau), std::invalid_argument);
}

TEST_CASE("SPD solver reuse") {
  Eigen::MatrixXd a(3, 3);
  a << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  const SpdSolver s(dense_to_sparse(a));
  for (int k = 0; k < 3; ++k) {
    const Vector rhs = Vector::Unit(3, k);
    CHECK((a * s.solve(rhs) - rhs).norm() < 1e-14);
  }
  CHECK(s.matrix().rows() == 3);
}
