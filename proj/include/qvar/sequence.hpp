#pragma once

#include <string>
#include <vector>

namespace qvar {

/// A finite real filter with integer support [min_index, min_index+size-1].
/// Convolutions of variation sequences live here (support may be negative).
struct Filter {
  int min_index = 0;
  std::vector<double> coeffs;

  int size() const { return static_cast<int>(coeffs.size()); }
  int max_index() const { return min_index + size() - 1; }
  /// Coefficient at index j, zero outside the support.
  double at(int j) const;
  /// Discrete moment sum_j c_j j^q.
  double moment(int q) const;
  bool is_symmetric(double tol = 1e-9) const;
  Filter reversed() const;
};

/// First non-vanishing moment of the filter, starting at q = 1.
/// A moment counts as zero when |m_q| <= 1e-6 * max|c| * size^q, which
/// absorbs the rounding of coefficients printed to a few decimals.
int filter_order(const Filter& f);

/// A zero-sum variation sequence a_0..a_{L-1} with non-zero endpoints.
/// Immutable after construction; the order M(a) is computed eagerly.
class VariationSequence {
 public:
  VariationSequence(std::vector<double> coeffs, std::string label,
                    double zero_sum_tol = 1e-9);

  const std::vector<double>& coeffs() const { return coeffs_; }
  const std::string& label() const { return label_; }
  int length() const { return static_cast<int>(coeffs_.size()); }
  int order() const { return order_; }
  Filter as_filter() const { return Filter{0, coeffs_}; }

 private:
  std::vector<double> coeffs_;
  std::string label_;
  int order_;
};

/// k-th order elementary sequence, a_j = (-1)^(k-j) * binom(k, j).
VariationSequence elementary(int k);

/// Daubechies-derived sequences of order 2 and 3 (fixed coefficient lists;
/// validated with relaxed tolerance since they are rounded decimals).
VariationSequence daubechies(int order);

/// Accepts a preset name ("elem1".."elem4", "seq123", "daub2", "daub3")
/// or an explicit comma-separated coefficient list.
VariationSequence parse_sequence(const std::string& spec);

/// Convolution b = a * a', b_j = sum_{k-l=j} a_k a'_l,
/// supported on [-(L'-1), L-1].
Filter convolve(const VariationSequence& a, const VariationSequence& b);
Filter convolve_filters(const Filter& a, const Filter& b);

/// Self-convolution a^{2*}: symmetric about 0, order 2 M(a).
Filter self_convolution(const VariationSequence& a);

struct CltCheck {
  bool valid = false;
  std::string diagnostic;
};

/// Central limit theorem validity: M(a) > D + s/2 + 1/4. When false the
/// estimator variance decays slower than 1/n and no Gaussian limit holds.
CltCheck validate_clt(const VariationSequence& a, int D, double s);

}  // namespace qvar
