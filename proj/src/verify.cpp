#include "biotline/verify.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "biotline/fem.hpp"
#include "biotline/greens.hpp"
#include "biotline/manufactured.hpp"

namespace biotline {

namespace {

std::string fmt(const char* label, double value) {
  std::ostringstream s;
  s << label << value;
  return s.str();
}

// Uniform points in the unit cube at least `min_dist` from the network.
std::vector<Vec3> sample_points(const LineSourceNetwork& net, int count, double min_dist, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec3> pts;
  while (static_cast<int>(pts.size()) < count) {
    const Vec3 x(u(rng), u(rng), u(rng));
    if (distance_to_network(net, x) >= min_dist) pts.push_back(x);
  }
  return pts;
}

double single_layer(const LineSegment& seg, const Vec3& x) {
  auto f = [&](double s) { return 1.0 / (x - seg.a() - s * seg.tangent()).norm(); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, seg.length(), 15, 1e-13) /
         (4.0 * std::numbers::pi);
}

}  // namespace

std::vector<CheckResult> run_greens_checks() {
  const ManufacturedCase mc;
  const LineSegment seg(mc.a, mc.b);
  const LineSourceNetwork net = LineSourceNetwork::time_only({seg}, [](double) { return 1.0; },
                                                             [](double) { return 0.0; });
  std::vector<CheckResult> out;

  double worst = 0.0;
  for (const Vec3& x : sample_points(net, 100, 0.05, 11)) {
    worst = std::max(worst, std::abs(eval_G(seg, x) - single_layer(seg, x)));
  }
  out.push_back({"G matches single-layer quadrature", worst < 1e-10, fmt("max abs error ", worst)});

  worst = 0.0;
  for (const Vec3& x : sample_points(net, 100, 0.05, 12)) {
    Vec3 fd;
    const double h = 1e-5;
    for (int i = 0; i < 3; ++i) {
      Vec3 e = Vec3::Zero();
      e[i] = h;
      fd[i] = (eval_G(seg, x + e) - eval_G(seg, x - e)) / (2.0 * h);
    }
    worst = std::max(worst, (grad_G(seg, x) - fd).norm() / grad_G(seg, x).norm());
  }
  out.push_back({"grad G matches central differences", worst < 1e-6, fmt("max relative error ", worst)});

  worst = 0.0;
  for (const Vec3& x : sample_points(net, 100, 0.1, 13)) {
    const double h = 1e-3;
    double lap = 0.0;
    for (int i = 0; i < 3; ++i) {
      Vec3 e = Vec3::Zero();
      e[i] = h;
      lap += (-eval_G(seg, x + 2 * e) + 16 * eval_G(seg, x + e) - 30 * eval_G(seg, x) + 16 * eval_G(seg, x - e) -
              eval_G(seg, x - 2 * e)) /
             (12.0 * h * h);
    }
    worst = std::max(worst, std::abs(lap) / std::abs(eval_G(seg, x)));
  }
  out.push_back({"G is harmonic off the segment", worst < 1e-4, fmt("max |lap G| / |G| ", worst)});

  const TestFunction bubble{
      [](const Vec3& x) { return x[0] * (1 - x[0]) * x[1] * (1 - x[1]) * x[2] * (1 - x[2]); },
      [](const Vec3& x) {
        const Vec3 s(x[0] * (1 - x[0]), x[1] * (1 - x[1]), x[2] * (1 - x[2]));
        return Vec3((1 - 2 * x[0]) * s[1] * s[2], s[0] * (1 - 2 * x[1]) * s[2], s[0] * s[1] * (1 - 2 * x[2]));
      }};
  bool monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  double last = 0.0;
  for (int order : {2, 4, 8, 16}) {
    last = verify_weak_laplacian(net, bubble, {order, 1}).residual;
    monotone = monotone && last < prev;
    prev = last;
  }
  out.push_back({"weak Laplacian residual decreases", monotone && last < 1e-4, fmt("final residual ", last)});
  return out;
}

std::vector<CheckResult> run_fem_checks(int n) {
  const Mesh mesh = build_structured_tet_mesh(n);
  const MaterialParams params;
  const DofMaps dofs = DofMaps::build(mesh);
  std::vector<CheckResult> out;

  const SparseMatrix k_full = assemble_elasticity_unconstrained(mesh, params);
  double worst = 0.0;
  for (int mode = 0; mode < 6; ++mode) {
    Vector r(3 * mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      const Vec3& x = mesh.vertex(v);
      Vec3 d = Vec3::Zero();
      if (mode < 3) d[mode] = 1.0;
      else d = Vec3::Unit(mode - 3).cross(x);
      r.segment<3>(3 * v) = d;
    }
    worst = std::max(worst, (k_full * r).norm() / (k_full.norm() * r.norm()));
  }
  out.push_back({"rigid-body modes in elasticity kernel", worst < 1e-10, fmt("max relative residual ", worst)});

  const SparseMatrix k = assemble_elasticity(mesh, dofs, params);
  const SparseMatrix mw = assemble_rt0_mass(mesh, 1.0 / params.kappa);
  const SparseMatrix mp = assemble_p_mass(mesh, 1.0);
  worst = 0.0;
  for (const SparseMatrix* m : {&k, &mw, &mp}) {
    worst = std::max(worst, SparseMatrix(*m - SparseMatrix(m->transpose())).norm() / m->norm());
  }
  out.push_back({"elasticity and mass matrices symmetric", worst < 1e-12, fmt("max relative asymmetry ", worst)});

  // RT0 reproduces w = c + d x exactly; its divergence moments equal 3 d |K|.
  const Vec3 c(0.3, -1.2, 0.7);
  const double d = 0.8;
  const Vector w = interpolate_rt0(mesh, [&](const Vec3& x, double) { return Vec3(c + d * x); }, 0.0, 2);
  const SparseMatrix div = assemble_div(mesh);
  const Vector moments = div * w;
  worst = 0.0;
  for (int cell = 0; cell < mesh.num_cells(); ++cell) {
    const Vec3 x = mesh.cell_centroid(cell) + 0.1 * (mesh.vertex(mesh.cell(cell)[1]) - mesh.cell_centroid(cell));
    worst = std::max(worst, (eval_rt0(mesh, w, cell, x) - (c + d * x)).norm());
    worst = std::max(worst, std::abs(moments[cell] - 3.0 * d * mesh.cell_volume(cell)) / mesh.cell_volume(cell));
  }
  const Vector p0 = interpolate_p0(mesh, [](const Vec3& x, double) { return 1.0 + x[0] - 2.0 * x[2]; }, 0.0, 1);
  for (int cell = 0; cell < mesh.num_cells(); ++cell) {
    const Vec3 xc = mesh.cell_centroid(cell);
    worst = std::max(worst, std::abs(p0[cell] - (1.0 + xc[0] - 2.0 * xc[2])));
  }
  out.push_back({"RT0 and P0 exact on constant and linear fields", worst < 1e-12, fmt("max error ", worst)});

  // <alpha div u, q> and <alpha p, div v> through C and its transpose.
  const SparseMatrix coupling = assemble_coupling_div_u(mesh, dofs, params.alpha);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u01(-1.0, 1.0);
  Vector uvec(dofs.num_u), q(dofs.num_p);
  for (auto& v : uvec) v = u01(rng);
  for (auto& v : q) v = u01(rng);
  const double lhs = q.dot(coupling * uvec);
  const double rhs = (SparseMatrix(coupling.transpose()) * q).dot(uvec);
  worst = std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
  const Vector ulin = interpolate_p1(mesh, dofs, [](const Vec3& x, double) { return Vec3(x[0], 2 * x[1], -x[2]); }, 0.0);
  // The interpolant is zero on the boundary, so only interior cells see div u = 2.
  const Vector cu = coupling * ulin;
  for (int cell = 0; cell < mesh.num_cells(); ++cell) {
    bool interior = true;
    for (int v : mesh.cell(cell)) interior = interior && !mesh.is_boundary_vertex(v);
    if (interior) worst = std::max(worst, std::abs(cu[cell] - 2.0 * params.alpha * mesh.cell_volume(cell)));
  }
  out.push_back({"coupling matrix transpose identity", worst < 1e-12, fmt("max error ", worst)});
  return out;
}

}  // namespace biotline
