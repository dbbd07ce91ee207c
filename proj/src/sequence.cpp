#include "qvar/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace qvar {

double Filter::at(int j) const {
  if (j < min_index || j > max_index()) return 0.0;
  return coeffs[static_cast<std::size_t>(j - min_index)];
}

double Filter::moment(int q) const {
  double m = 0.0;
  for (int k = 0; k < size(); ++k) {
    double j = static_cast<double>(min_index + k);
    m += coeffs[static_cast<std::size_t>(k)] * std::pow(j, q);
  }
  return m;
}

bool Filter::is_symmetric(double tol) const {
  if (min_index != -max_index()) return false;
  for (int j = 1; j <= max_index(); ++j) {
    if (std::abs(at(j) - at(-j)) > tol) return false;
  }
  return true;
}

Filter Filter::reversed() const {
  Filter r;
  r.coeffs.assign(coeffs.rbegin(), coeffs.rend());
  r.min_index = -max_index();
  return r;
}

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

int filter_order(const Filter& f) {
  const double scale = max_abs(f.coeffs);
  const int width = f.size();
  for (int q = 1; q < width; ++q) {
    double tol = 1e-6 * scale * std::pow(static_cast<double>(width), q);
    if (std::abs(f.moment(q)) > tol) return q;
  }
  throw std::invalid_argument("filter_order: all moments up to L-1 vanish, malformed sequence");
}

VariationSequence::VariationSequence(std::vector<double> coeffs, std::string label,
                                     double zero_sum_tol)
    : coeffs_(std::move(coeffs)), label_(std::move(label)) {
  if (coeffs_.size() < 2)
    throw std::invalid_argument("VariationSequence: need at least two coefficients");
  if (coeffs_.front() == 0.0 || coeffs_.back() == 0.0)
    throw std::invalid_argument("VariationSequence: first and last coefficients must be non-zero");
  double sum = 0.0;
  for (double c : coeffs_) sum += c;
  if (std::abs(sum) > zero_sum_tol)
    throw std::invalid_argument("VariationSequence '" + label_ + "': coefficients must sum to zero (got " +
                                std::to_string(sum) + ")");
  order_ = filter_order(as_filter());
}

VariationSequence elementary(int k) {
  if (k < 1) throw std::invalid_argument("elementary: order must be >= 1");
  std::vector<double> c(static_cast<std::size_t>(k) + 1);
  double binom = 1.0;
  for (int j = 0; j <= k; ++j) {
    double sign = ((k - j) % 2 == 0) ? 1.0 : -1.0;
    c[static_cast<std::size_t>(j)] = sign * binom;
    binom = binom * (k - j) / (j + 1);
  }
  return VariationSequence(std::move(c), "elem" + std::to_string(k));
}

VariationSequence daubechies(int order) {
  // Coefficient lists as printed in the numerical-study literature; they are
  // rounded decimals, hence the relaxed zero-sum tolerance.
  if (order == 2) {
    return VariationSequence({-0.1830127, -0.3169873, 1.1830127, -0.6830127}, "daub2", 1e-6);
  }
  if (order == 3) {
    return VariationSequence({0.0498175, 0.12083221, -0.19093442, -0.650365, 1.14111692, -0.47046721},
                             "daub3", 1e-6);
  }
  throw std::invalid_argument("daubechies: only orders 2 and 3 are available");
}

VariationSequence parse_sequence(const std::string& spec) {
  if (spec == "elem1") return elementary(1);
  if (spec == "elem2") return elementary(2);
  if (spec == "elem3") return elementary(3);
  if (spec == "elem4") return elementary(4);
  if (spec == "seq123") return VariationSequence({-1.0, -2.0, 3.0}, "seq123");
  if (spec == "daub2") return daubechies(2);
  if (spec == "daub3") return daubechies(3);
  if (spec.find(',') == std::string::npos)
    throw std::invalid_argument("parse_sequence: unknown preset '" + spec + "'");
  std::vector<double> coeffs;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t pos = 0;
    double v;
    try {
      v = std::stod(tok, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("parse_sequence: non-numeric coefficient '" + tok + "'");
    }
    while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
    if (pos != tok.size())
      throw std::invalid_argument("parse_sequence: non-numeric coefficient '" + tok + "'");
    coeffs.push_back(v);
  }
  return VariationSequence(std::move(coeffs), spec, 1e-6);
}

Filter convolve_filters(const Filter& a, const Filter& b) {
  Filter out;
  out.min_index = a.min_index - b.max_index();
  out.coeffs.assign(static_cast<std::size_t>(a.size() + b.size() - 1), 0.0);
  for (int ka = 0; ka < a.size(); ++ka) {
    for (int kb = 0; kb < b.size(); ++kb) {
      int j = (a.min_index + ka) - (b.min_index + kb);
      out.coeffs[static_cast<std::size_t>(j - out.min_index)] +=
          a.coeffs[static_cast<std::size_t>(ka)] * b.coeffs[static_cast<std::size_t>(kb)];
    }
  }
  return out;
}

Filter convolve(const VariationSequence& a, const VariationSequence& b) {
  return convolve_filters(a.as_filter(), b.as_filter());
}

Filter self_convolution(const VariationSequence& a) { return convolve(a, a); }

CltCheck validate_clt(const VariationSequence& a, int D, double s) {
  if (D < 0) throw std::invalid_argument("validate_clt: D must be >= 0");
  if (!(s > 0.0 && s < 2.0)) throw std::invalid_argument("validate_clt: s must lie in (0,2)");
  CltCheck check;
  double bound = D + s / 2.0 + 0.25;
  check.valid = a.order() > bound;
  char buf[256];
  if (check.valid) {
    std::snprintf(buf, sizeof(buf),
                  "M = %d satisfies M > D + s/2 + 1/4 = %.4f: CLT applies", a.order(), bound);
  } else {
    std::snprintf(buf, sizeof(buf),
                  "M = %d violates M > D + s/2 + 1/4 = %.4f: slow-rate regime, the variance of "
                  "V_{a,n} decays slower than 1/n (n^{2s-4(M-D)+2} for s>3/2, n log n at s=3/2) "
                  "and no central limit theorem holds",
                  a.order(), bound);
  }
  check.diagnostic = buf;
  return check;
}

}  // namespace qvar
