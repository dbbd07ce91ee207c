#pragma once

#include <functional>

#include "qvar/sequence.hpp"

namespace qvar {

struct SeriesResult {
  double value = 0.0;
  long terms_used = 0;        // directly summed lattice terms
  long truncation_radius = 0; // core summed over |i| <= radius
  double tail_estimate = 0.0; // bound on what the result may still miss
};

/// Discrete a-difference sum_j a_j f((i+j) delta).
double discrete_difference(const Filter& a, const std::function<double(double)>& f,
                           double delta, int i);

/// Integral remainder functional
///   R(i, delta, q, f, a) = -sum_j a_j j^q int_0^1 (1-eta)^(q-1)/(q-1)! f((i+j eta) delta) deta,
/// with R(i, delta, 0, f, a) = -Delta_{a,i}(f) by convention.
/// Panels are split at every eta where (i + j eta) = 0, so the |.|^s kink
/// never sits inside a Gauss-Legendre panel.
double remainder_quadrature(int i, double delta, int q, const std::function<double(double)>& f,
                            const Filter& a, int nodes_per_panel = 64);

/// Closed form of R(i, 1, 2D, |.|^s, b) for a filter b of order > 2D:
///   -[sum_j b_j |i+j|^(2D+s)] / prod_{r=1}^{2D} (s+r).
double remainder_power_closed(int i, int D, double s, const Filter& b);

/// sum over i in Z of R^2(i, 1, 2D, |.|^s, b). Requires order(b)/2 > D + s/2 + 1/4
/// for convergence. Core terms are summed directly over a doubling radius;
/// the remaining two tails are evaluated from the moment expansion of the
/// closed form (exact power sums via Euler-Maclaurin), so slowly decaying
/// cases near the validity boundary still meet rtol.
SeriesResult series_R2(const Filter& b, int D, double s, double rtol = 1e-10);

}  // namespace qvar
