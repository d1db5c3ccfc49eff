#pragma once

namespace dotmark {

/**
 * @brief Modified Bessel function of the second kind K_nu(x) for real nu and x > 0.
 *
 * Temme's series for x < 2, Steed's continued fraction otherwise, both at
 * the reduced order mu = nu - round(nu) in [-1/2, 1/2], followed by upward
 * recurrence. Negative orders use K_{-nu} = K_nu. Throws InvalidArgument
 * for x <= 0 or non-finite input.
 */
double bessel_k(double nu, double x);

}  // namespace dotmark
