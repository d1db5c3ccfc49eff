#include "dotmark/bessel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dotmark/errors.hpp"

namespace dotmark {

namespace {

constexpr double kEps = 1e-17;
constexpr int kMaxIter = 100000;

// Coefficients of 1/Gamma(z) = sum c_k z^k (Abramowitz & Stegun 6.1.34), even k >= 2.
constexpr double kRecipGammaEven[] = {
    0.5772156649015329,   // c2
    -0.0420026350340952,  // c4
    -0.0421977345555443,  // c6
    0.0072189432466630,   // c8
    -0.0002152416741149,  // c10
    -0.0000201348547807,  // c12
    0.0000011330272320,   // c14
};

/// gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu), gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2.
void temme_gammas(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
  gampl = 1.0 / std::tgamma(1.0 + mu);
  gammi = 1.0 / std::tgamma(1.0 - mu);
  gam2 = 0.5 * (gammi + gampl);
  if (std::abs(mu) < 0.01) {
    // Series avoids the cancellation in the difference quotient.
    const double mu2 = mu * mu;
    double sum = 0.0, power = 1.0;
    for (const double c : kRecipGammaEven) {
      sum += c * power;
      power *= mu2;
    }
    gam1 = -sum;
  } else {
    gam1 = (gammi - gampl) / (2.0 * mu);
  }
}

}  // namespace

double bessel_k(double nu, double x) {
  if (!std::isfinite(nu) || !std::isfinite(x)) throw InvalidArgument("bessel_k: non-finite argument");
  if (x <= 0.0) throw InvalidArgument("bessel_k: x must be positive");
  if (nu < 0.0) nu = -nu;  // K_{-nu} = K_nu

  const int nl = static_cast<int>(nu + 0.5);
  const double mu = nu - nl;
  const double mu2 = mu * mu;
  const double xi = 1.0 / x;
  const double xi2 = 2.0 * xi;
  double k_mu = 0.0;   // K_mu(x)
  double k_mu1 = 0.0;  // K_{mu+1}(x)

  if (x < 2.0) {
    const double x2 = 0.5 * x;
    const double pimu = std::numbers::pi * mu;
    const double fact = std::abs(pimu) < 1e-15 ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    const double fact2 = std::abs(e) < 1e-15 ? 1.0 : std::sinh(e) / e;
    double gam1, gam2, gampl, gammi;
    temme_gammas(mu, gam1, gam2, gampl, gammi);
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    int i = 1;
    for (; i <= kMaxIter; ++i) {
      ff = (i * ff + p + q) / (i * static_cast<double>(i) - mu2);
      c *= d / i;
      p /= i - mu;
      q /= i + mu;
      const double del = c * ff;
      sum += del;
      sum1 += c * (p - i * ff);
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    if (i > kMaxIter) throw NumericalError("bessel_k: series did not converge");
    k_mu = sum;
    k_mu1 = sum1 * xi2;
  } else {
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - mu2;
    double q = a1, c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    int i = 2;
    for (; i <= kMaxIter; ++i) {
      a -= 2 * (i - 1);
      c = -a * c / i;
      const double qnew = (q1 - b * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += c * qnew;
      b += 2.0;
      d = 1.0 / (b + a * d);
      delh = (b * d - 1.0) * delh;
      h += delh;
      const double dels = q * delh;
      s += dels;
      if (std::abs(dels / s) < kEps) break;
    }
    if (i > kMaxIter) throw NumericalError("bessel_k: continued fraction did not converge");
    h *= a1;
    k_mu = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
    k_mu1 = k_mu * (mu + x + 0.5 - h) * xi;
  }

  // K_{v+1} = K_{v-1} + (2v/x) K_v
  for (int i = 1; i <= nl; ++i) {
    const double next = (mu + i) * xi2 * k_mu1 + k_mu;
    k_mu = k_mu1;
    k_mu1 = next;
  }
  return k_mu;
}

}  // namespace dotmark
