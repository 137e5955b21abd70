#pragma once

#include <array>
#include <cstdint>

namespace netsync::dtsched {

struct Mat2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;

  double trace() const { return a11 + a22; }
  static Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }
};

// Smallest eigenvalue of a symmetric 2x2 (for PSD checks).
double min_eigenvalue(const Mat2& m);

/// One tracked object: x = (position, velocity), constant-velocity
/// dynamics x+ = F x + w with F = [[1, tau],[0, 1]] and process noise
/// covariance Q(q, tau) = q * [[tau^3/3, tau^2/2],[tau^2/2, tau]].
struct ProcessModel {
  double tau_s = 0.1;
  double q = 0.01;

  Mat2 Q() const {
    const double t = tau_s;
    return {q * t * t * t / 3.0, q * t * t / 2.0,
            q * t * t / 2.0,     q * t};
  }
};

struct Belief {
  std::array<double, 2> mean{0.0, 0.0};
  Mat2 cov;
};

// mean <- F mean, cov <- F cov F^T + Q.
void kalman_predict(Belief& b, const ProcessModel& model);

// Scalar-measurement update of component (0 = position, 1 = velocity)
// with observation z and measurement noise variance r.
void kalman_update(Belief& b, int component, double z, double r);

// Covariance-only form of the update (the mean plays no role in VoI).
Mat2 covariance_after_update(const Mat2& cov, int component, double r);

// Expected trace reduction from querying a sensor on this (predicted)
// belief; independent of the realized measurement value.
double voi(const Mat2& cov, int component, double r);

}  // namespace netsync::dtsched
