#pragma once

#include <utility>
#include <vector>

#include "ipkit/field.hpp"

namespace ipkit {

/// Evaluation point in F^k.
using Point = std::vector<FieldElement>;

/// Coefficients in ascending powers, trailing zeros trimmed.
/// The zero polynomial is the empty list.
class UnivariatePoly {
 public:
  UnivariatePoly() = default;
  explicit UnivariatePoly(std::vector<FieldElement> coeffs);

  const std::vector<FieldElement>& coeffs() const { return coeffs_; }

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  FieldElement eval(const FieldElement& x) const;

  friend bool operator==(const UnivariatePoly& a, const UnivariatePoly& b) {
    return a.coeffs_ == b.coeffs_;
  }

 private:
  std::vector<FieldElement> coeffs_;
};

/// Unique polynomial of degree < #points through the given points.
/// Throws std::invalid_argument on duplicate abscissae or empty input.
UnivariatePoly uni_interpolate(
    const std::vector<std::pair<FieldElement, FieldElement>>& points);

/// Values of a function on {0,1}^l in lexicographic order, first variable
/// most significant. Index a(z) = sum z_j * 2^(l-1-j).
class MultilinearTable {
 public:
  /// values.size() must be exactly 2^l for some l >= 0.
  explicit MultilinearTable(std::vector<FieldElement> values);

  /// Zero-pads to the next power of two (length k maps to l = ceil(log2 k)).
  static MultilinearTable padded(std::vector<FieldElement> values,
                                 const PrimeModulus& m);

  int num_vars() const { return num_vars_; }
  const std::vector<FieldElement>& values() const { return values_; }

 private:
  int num_vars_;
  std::vector<FieldElement> values_;
};

/// Indicator basis B(z, p) = prod_j (z_j p_j + (1 - z_j)(1 - p_j)).
/// Equals the Kronecker delta when both points are binary.
FieldElement eq_eval(const Point& z, const Point& p);

/// eq between a field point and the bits of an index, first coordinate
/// most significant. Accepts empty z (index must then be 0, result 1).
FieldElement eq_binary_index(const Point& z, u64 index,
                             const FieldElement& one);

/// Multilinear extension of the table at z, O(2^l) field ops by folding
/// one variable at a time.
FieldElement mle_eval(const MultilinearTable& t, const Point& z);

/// Line gamma(t) = base + t * direction through two points of F^s.
struct AffineLine {
  Point base;
  Point direction;

  Point at(const FieldElement& t) const;
};

/// The line with gamma(0) = z1 and gamma(1) = z2.
AffineLine line_through(const Point& z1, const Point& z2);

/// Univariate restriction of the MLE along a line: the unique polynomial
/// of degree <= num_vars with f(t) = W~(gamma(t)), built by evaluating at
/// num_vars + 1 abscissae and interpolating.
UnivariatePoly mle_restrict_line(const MultilinearTable& t,
                                 const AffineLine& line);

}  // namespace ipkit
