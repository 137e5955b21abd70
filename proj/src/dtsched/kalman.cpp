#include "netsync/dtsched/kalman.hpp"

#include <cmath>
#include <stdexcept>

namespace netsync::dtsched {

double min_eigenvalue(const Mat2& m) {
  const double tr = m.a11 + m.a22;
  const double det = m.a11 * m.a22 - m.a12 * m.a21;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  return tr / 2.0 - disc;
}

void kalman_predict(Belief& b, const ProcessModel& model) {
  const double t = model.tau_s;
  b.mean[0] += t * b.mean[1];

  const Mat2 p = b.cov;
  const Mat2 q = model.Q();
  // F P F^T with F = [[1,t],[0,1]].
  Mat2 out;
  out.a11 = p.a11 + t * (p.a12 + p.a21) + t * t * p.a22 + q.a11;
  out.a12 = p.a12 + t * p.a22 + q.a12;
  out.a21 = p.a21 + t * p.a22 + q.a21;
  out.a22 = p.a22 + q.a22;
  b.cov = out;
}

Mat2 covariance_after_update(const Mat2& cov, int component, double r) {
  if (component != 0 && component != 1) {
    throw std::invalid_argument("component must be 0 or 1");
  }
  if (r <= 0.0) {
    throw std::invalid_argument("measurement variance must be > 0");
  }
  // P' = P - P H^T (H P H^T + r)^-1 H P, H selecting one component.
  const double p_cc = component == 0 ? cov.a11 : cov.a22;
  const double s = p_cc + r;
  // Column P[:,c] (== row by symmetry).
  const double k1 = (component == 0 ? cov.a11 : cov.a12) / s;
  const double k2 = (component == 0 ? cov.a21 : cov.a22) / s;
  const double r1 = component == 0 ? cov.a11 : cov.a21;
  const double r2 = component == 0 ? cov.a12 : cov.a22;
  Mat2 out = cov;
  out.a11 -= k1 * r1;
  out.a12 -= k1 * r2;
  out.a21 -= k2 * r1;
  out.a22 -= k2 * r2;
  return out;
}

void kalman_update(Belief& b, int component, double z, double r) {
  const double p_cc = component == 0 ? b.cov.a11 : b.cov.a22;
  const double s = p_cc + r;
  const double innov = z - b.mean[component];
  const double k1 = (component == 0 ? b.cov.a11 : b.cov.a12) / s;
  const double k2 = (component == 0 ? b.cov.a21 : b.cov.a22) / s;
  b.cov = covariance_after_update(b.cov, component, r);
  b.mean[0] += k1 * innov;
  b.mean[1] += k2 * innov;
}

double voi(const Mat2& cov, int component, double r) {
  return cov.trace() - covariance_after_update(cov, component, r).trace();
}

}  // namespace netsync::dtsched
