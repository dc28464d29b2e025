#include "ipkit/poly.hpp"

#include <bit>

namespace ipkit {

UnivariatePoly::UnivariatePoly(std::vector<FieldElement> coeffs)
    : coeffs_(std::move(coeffs)) {
  while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

FieldElement UnivariatePoly::eval(const FieldElement& x) const {
  FieldElement acc = x.zero_like();
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * x + *it;
  }
  return acc;
}

UnivariatePoly uni_interpolate(
    const std::vector<std::pair<FieldElement, FieldElement>>& points) {
  if (points.empty()) throw std::invalid_argument("interpolate: no points");
  const PrimeModulus m(points.front().first.modulus());
  const auto zero = FieldElement::zero(m);
  const size_t n = points.size();
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      if (points[i].first == points[j].first)
        throw std::invalid_argument("interpolate: duplicate abscissa");

  // Accumulate y_i * L_i(x) with L_i built as a coefficient vector.
  std::vector<FieldElement> acc(n, zero);
  for (size_t i = 0; i < n; ++i) {
    std::vector<FieldElement> basis{FieldElement::one(m)};
    FieldElement denom = FieldElement::one(m);
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      // basis *= (x - x_j)
      basis.insert(basis.begin(), zero);
      for (size_t k = 0; k + 1 < basis.size(); ++k)
        basis[k] -= points[j].first * basis[k + 1];
      denom *= points[i].first - points[j].first;
    }
    FieldElement scale = points[i].second * denom.inverse();
    for (size_t k = 0; k < basis.size(); ++k) acc[k] += basis[k] * scale;
  }
  return UnivariatePoly(std::move(acc));
}

MultilinearTable::MultilinearTable(std::vector<FieldElement> values)
    : values_(std::move(values)) {
  if (values_.empty() || !std::has_single_bit(values_.size()))
    throw std::invalid_argument("table length must be a power of two");
  num_vars_ = std::countr_zero(values_.size());
}

MultilinearTable MultilinearTable::padded(std::vector<FieldElement> values,
                                          const PrimeModulus& m) {
  size_t target = values.empty() ? 1 : std::bit_ceil(values.size());
  while (values.size() < target) values.push_back(FieldElement::zero(m));
  return MultilinearTable(std::move(values));
}

FieldElement eq_eval(const Point& z, const Point& p) {
  if (z.size() != p.size())
    throw std::invalid_argument("eq_eval: length mismatch");
  if (z.empty()) throw std::invalid_argument("eq_eval: empty points");
  const auto one = z.front().one_like();
  FieldElement out = one;
  for (size_t j = 0; j < z.size(); ++j)
    out *= z[j] * p[j] + (one - z[j]) * (one - p[j]);
  return out;
}

FieldElement eq_binary_index(const Point& z, u64 index,
                             const FieldElement& one) {
  FieldElement out = one;
  const int s = static_cast<int>(z.size());
  for (int j = 0; j < s; ++j) {
    bool bit = (index >> (s - 1 - j)) & 1;
    out *= bit ? z[j] : one - z[j];
  }
  return out;
}

FieldElement mle_eval(const MultilinearTable& t, const Point& z) {
  if (static_cast<int>(z.size()) != t.num_vars())
    throw std::invalid_argument("mle_eval: arity mismatch");
  std::vector<FieldElement> table = t.values();
  // Fold the most-significant variable first: the low half carries z_j = 0,
  // the high half z_j = 1.
  for (const auto& zj : z) {
    size_t half = table.size() / 2;
    for (size_t k = 0; k < half; ++k)
      table[k] += zj * (table[k + half] - table[k]);
    table.resize(half);
  }
  return table.front();
}

Point AffineLine::at(const FieldElement& t) const {
  Point out;
  out.reserve(base.size());
  for (size_t j = 0; j < base.size(); ++j)
    out.push_back(base[j] + t * direction[j]);
  return out;
}

AffineLine line_through(const Point& z1, const Point& z2) {
  if (z1.size() != z2.size())
    throw std::invalid_argument("line_through: length mismatch");
  Point dir;
  dir.reserve(z1.size());
  for (size_t j = 0; j < z1.size(); ++j) dir.push_back(z2[j] - z1[j]);
  return {z1, std::move(dir)};
}

UnivariatePoly mle_restrict_line(const MultilinearTable& t,
                                 const AffineLine& line) {
  if (static_cast<int>(line.base.size()) != t.num_vars())
    throw std::invalid_argument("mle_restrict_line: arity mismatch");
  if (t.num_vars() == 0)
    return UnivariatePoly({t.values().front()});
  std::vector<std::pair<FieldElement, FieldElement>> samples;
  samples.reserve(t.num_vars() + 1);
  for (int k = 0; k <= t.num_vars(); ++k) {
    FieldElement tk = line.base.front().like(static_cast<u64>(k));
    samples.emplace_back(tk, mle_eval(t, line.at(tk)));
  }
  return uni_interpolate(samples);
}

}  // namespace ipkit
