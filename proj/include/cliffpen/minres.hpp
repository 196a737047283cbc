#pragma once

// Preconditioned MINRES for symmetric (possibly indefinite or singular)
// systems A x = b with a symmetric positive definite preconditioner.

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace cliffpen {

struct MinresResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double rel_residual = 0.0;  // preconditioned residual estimate / ||b||_{M^-1}
  bool converged = false;
};

template <class Op, class Prec>
MinresResult minres(const Op& apply_a, const Prec& apply_minv, const Eigen::VectorXd& b,
                    double rtol, int max_iter) {
  using Eigen::VectorXd;
  const Eigen::Index n = b.size();
  MinresResult res;
  res.x = VectorXd::Zero(n);
  VectorXd r1 = b;
  VectorXd y = apply_minv(r1);
  const double b2 = r1.dot(y);
  if (b2 < 0) throw std::invalid_argument("minres: preconditioner is not positive definite");
  const double beta1 = std::sqrt(b2);
  if (beta1 == 0.0) {
    res.converged = true;
    return res;
  }
  VectorXd r2 = r1, w = VectorXd::Zero(n), w1(n), w2 = VectorXd::Zero(n), v(n);
  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  const double tiny = std::numeric_limits<double>::epsilon();
  for (int itn = 1; itn <= max_iter; ++itn) {
    v = y / beta;
    y = apply_a(v);
    if (itn >= 2) y -= (beta / oldb) * r1;
    const double alfa = v.dot(y);
    y -= (alfa / beta) * r2;
    r1 = r2;
    r2 = y;
    y = apply_minv(r2);
    oldb = beta;
    const double bb = r2.dot(y);
    if (bb < 0) throw std::invalid_argument("minres: preconditioner is not positive definite");
    beta = std::sqrt(bb);
    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), tiny);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;
    w1 = w2;
    w2 = w;
    w = (v - oldeps * w1 - delta * w2) / gamma;
    res.x += phi * w;
    res.iterations = itn;
    res.rel_residual = phibar / beta1;
    if (res.rel_residual <= rtol || beta == 0.0) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace cliffpen
