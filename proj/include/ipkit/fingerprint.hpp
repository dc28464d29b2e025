#pragma once

#include <string>
#include <vector>

#include "ipkit/field.hpp"

namespace ipkit {

using DataVector = std::vector<FieldElement>;

/// n x n matrix, row-major.
class SquareMatrix {
 public:
  SquareMatrix(size_t n, std::vector<FieldElement> entries);

  size_t dim() const { return n_; }
  const FieldElement& at(size_t row, size_t col) const {
    return entries_[row * n_ + col];
  }
  FieldElement& at(size_t row, size_t col) { return entries_[row * n_ + col]; }
  const std::vector<FieldElement>& entries() const { return entries_; }

 private:
  size_t n_;
  std::vector<FieldElement> entries_;
};

/// Fingerprint sum_{i=1..n} v_i * r^i, Horner-evaluated.
FieldElement rs_fingerprint(const DataVector& v, const FieldElement& r);

enum class EqualityVerdict { Equal, NotEqual };

struct EqualityResult {
  EqualityVerdict verdict;
  FieldElement r;
};

/// One-round randomized equality test. Requires equal lengths and
/// |F| >= n^2; one-sided error (equal inputs always compare Equal).
EqualityResult equality_protocol(const DataVector& a, const DataVector& b,
                                 RandomSource& rng);

/// Exact O(n^3) product, used as the test oracle.
SquareMatrix mat_mul(const SquareMatrix& a, const SquareMatrix& b);

enum class FreivaldsVerdict { Accept, Reject };

struct FreivaldsResult {
  FreivaldsVerdict verdict;
  FieldElement r;
};

/// Checks C = A*B with x = (r, r^2, ..., r^n): accept iff C*x = A*(B*x).
/// Three matrix-vector products, Theta(n^2) field ops.
FreivaldsResult freivalds_verify(const SquareMatrix& a, const SquareMatrix& b,
                                 const SquareMatrix& c, RandomSource& rng);

/// Plain-text grids of decimal residues: entries split on whitespace or
/// commas, matrix rows on newlines. Lines starting with '#' are skipped.
DataVector parse_vector(const std::string& text, const PrimeModulus& m);
SquareMatrix parse_matrix(const std::string& text, const PrimeModulus& m);

}  // namespace ipkit
