#include "biotline/manufactured.hpp"

#include <cmath>
#include <numbers>

namespace biotline {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

// Bubble q = x(1-x) y(1-y) z(1-z) and its derivatives.
struct Bubble {
  double value;
  Vec3 grad;
  Eigen::Matrix3d hessian;
};

Bubble bubble(const Vec3& x) {
  Vec3 s, ds, dds;
  for (int i = 0; i < 3; ++i) {
    s[i] = x[i] * (1.0 - x[i]);
    ds[i] = 1.0 - 2.0 * x[i];
    dds[i] = -2.0;
  }
  Bubble q;
  q.value = s.prod();
  q.grad = {ds[0] * s[1] * s[2], s[0] * ds[1] * s[2], s[0] * s[1] * ds[2]};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double v = 1.0;
      for (int k = 0; k < 3; ++k) {
        if (k == i && k == j) v *= dds[k];
        else if (k == i || k == j) v *= ds[k];
        else v *= s[k];
      }
      q.hessian(i, j) = v;
    }
  }
  return q;
}

}  // namespace

LineSourceNetwork ManufacturedCase::network() const {
  return LineSourceNetwork::time_only({LineSegment(a, b)}, [](double t) { return std::sin(t); },
                                      [](double t) { return std::cos(t); });
}

double ManufacturedCase::intensity(double t) const { return std::sin(t); }
double ManufacturedCase::intensity_dt(double t) const { return std::cos(t); }

double ManufacturedCase::remainder_pressure(const Vec3& x, double t, const MaterialParams& params) const {
  return intensity(t) / (kFourPi * params.kappa) * ((x - a).norm() - (x - b).norm());
}

Vec3 ManufacturedCase::remainder_flux(const Vec3& x, double t) const {
  const double ra = (x - a).norm();
  const double rb = (x - b).norm();
  if (ra == 0.0 || rb == 0.0) throw OnSegmentError("remainder flux evaluated at a segment endpoint");
  return -intensity(t) / kFourPi * ((x - a) / ra - (x - b) / rb);
}

double ManufacturedCase::remainder_flux_div(const Vec3& x, double t) const {
  const double ra = (x - a).norm();
  const double rb = (x - b).norm();
  if (ra == 0.0 || rb == 0.0) throw OnSegmentError("remainder flux evaluated at a segment endpoint");
  return -intensity(t) / kFourPi * (2.0 / ra - 2.0 / rb);
}

Vec3 ManufacturedCase::displacement(const Vec3& x, double t) const {
  return Vec3::Constant(t * bubble(x).value);
}

double ManufacturedCase::displacement_div(const Vec3& x, double t) const { return t * bubble(x).grad.sum(); }

double ManufacturedCase::pressure(const Vec3& x, double t, const MaterialParams& params) const {
  return eval_ps(network(), x, t, params.kappa) + remainder_pressure(x, t, params);
}

Vec3 ManufacturedCase::flux(const Vec3& x, double t, const MaterialParams& params) const {
  return eval_ws(network(), x, t, params.kappa) + remainder_flux(x, t);
}

double ManufacturedCase::remainder_source(const Vec3& x, double t, const MaterialParams& params) const {
  const double dp_dt = intensity_dt(t) / (kFourPi * params.kappa) * ((x - a).norm() - (x - b).norm());
  const double ddiv_dt = bubble(x).grad.sum();
  return dp_dt / params.biot_modulus + params.alpha * ddiv_dt + remainder_flux_div(x, t);
}

Vec3 ManufacturedCase::elastic_load(const Vec3& x, double t, const MaterialParams& params) const {
  // u_i = t q for every i: -div sigma_i = -t (mu lap q + (mu + lambda) sum_j q_ij).
  const Bubble q = bubble(x);
  const double lap = q.hessian.trace();
  const Vec3 grad_div = q.hessian.rowwise().sum();
  return -t * (params.mu() * lap * Vec3::Ones() + (params.mu() + params.lambda()) * grad_div);
}

ProblemData manufactured_sources(const ManufacturedCase& mcase, const MaterialParams& params) {
  ProblemData data;
  data.network = mcase.network();
  const LineSourceNetwork net = data.network;
  // psi = psi_r + d_t(p_s) / M, so that the regularized source equals the
  // remainder source (the intensity has no spatial variation).
  data.source = [mcase, params, net](const Vec3& x, double t) {
    const double dps_dt = mcase.intensity_dt(t) * eval_G(net, x) / params.kappa;
    return mcase.remainder_source(x, t, params) + dps_dt / params.biot_modulus;
  };
  data.body_force = [mcase, params](const Vec3& x, double t) { return mcase.elastic_load(x, t, params); };
  data.body_force_div = [mcase, params](const Vec3& x, double t) {
    return -params.alpha * mcase.pressure(x, t, params);
  };
  data.boundary_pressure = [mcase, params](const Vec3& x, double t) { return mcase.pressure(x, t, params); };
  return data;
}

}  // namespace biotline
