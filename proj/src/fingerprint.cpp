#include "ipkit/fingerprint.hpp"

#include <sstream>

namespace ipkit {

SquareMatrix::SquareMatrix(size_t n, std::vector<FieldElement> entries)
    : n_(n), entries_(std::move(entries)) {
  if (n_ == 0 || entries_.size() != n_ * n_)
    throw std::invalid_argument("matrix needs exactly n^2 entries");
}

FieldElement rs_fingerprint(const DataVector& v, const FieldElement& r) {
  // sum v_i r^i = r * (v_1 + r * (v_2 + ... )), exponents starting at 1.
  FieldElement acc = FieldElement::zero(PrimeModulus(r.modulus()));
  for (auto it = v.rbegin(); it != v.rend(); ++it) acc = (acc + *it) * r;
  return acc;
}

EqualityResult equality_protocol(const DataVector& a, const DataVector& b,
                                 RandomSource& rng) {
  if (a.size() != b.size())
    throw std::invalid_argument("equality: length mismatch");
  if (a.empty()) throw std::invalid_argument("equality: empty vectors");
  const PrimeModulus m(a.front().modulus());
  const u64 n = a.size();
  if (m.value() / n < n)
    throw std::invalid_argument("equality: field too small, need |F| >= n^2");
  FieldElement r = rng.next_element(m);
  EqualityVerdict v = rs_fingerprint(a, r) == rs_fingerprint(b, r)
                          ? EqualityVerdict::Equal
                          : EqualityVerdict::NotEqual;
  return {v, r};
}

SquareMatrix mat_mul(const SquareMatrix& a, const SquareMatrix& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("mat_mul: dimension mismatch");
  const size_t n = a.dim();
  const PrimeModulus m(a.at(0, 0).modulus());
  std::vector<FieldElement> out(n * n, FieldElement::zero(m));
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < n; ++k) {
      const FieldElement& aik = a.at(i, k);
      if (aik.is_zero()) continue;
      for (size_t j = 0; j < n; ++j) out[i * n + j] += aik * b.at(k, j);
    }
  return {n, std::move(out)};
}

static DataVector mat_vec(const SquareMatrix& a, const DataVector& x) {
  const size_t n = a.dim();
  const PrimeModulus m(x.front().modulus());
  DataVector out(n, FieldElement::zero(m));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) out[i] += a.at(i, j) * x[j];
  return out;
}

FreivaldsResult freivalds_verify(const SquareMatrix& a, const SquareMatrix& b,
                                 const SquareMatrix& c, RandomSource& rng) {
  if (a.dim() != b.dim() || a.dim() != c.dim())
    throw std::invalid_argument("freivalds: dimension mismatch");
  const size_t n = a.dim();
  const PrimeModulus m(a.at(0, 0).modulus());
  FieldElement r = rng.next_element(m);

  DataVector x;
  x.reserve(n);
  FieldElement power = r;
  x.push_back(power);
  for (size_t i = 1; i < n; ++i) {
    power *= r;
    x.push_back(power);
  }

  DataVector cx = mat_vec(c, x);
  DataVector abx = mat_vec(a, mat_vec(b, x));
  FreivaldsVerdict v =
      cx == abx ? FreivaldsVerdict::Accept : FreivaldsVerdict::Reject;
  return {v, r};
}

static std::vector<FieldElement> parse_entries(const std::string& text,
                                               const PrimeModulus& m,
                                               std::vector<size_t>* row_ends) {
  std::vector<FieldElement> out;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line[0] == '#') continue;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream fields(line);
    std::string tok;
    bool any = false;
    while (fields >> tok) {
      any = true;
      u64 v = 0;
      try {
        size_t used = 0;
        v = std::stoull(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw std::invalid_argument("bad decimal entry: " + tok);
      }
      if (v >= m.value())
        throw std::invalid_argument("entry out of range: " + tok);
      out.emplace_back(v, m);
    }
    if (any && row_ends) row_ends->push_back(out.size());
  }
  return out;
}

DataVector parse_vector(const std::string& text, const PrimeModulus& m) {
  auto entries = parse_entries(text, m, nullptr);
  if (entries.empty()) throw std::invalid_argument("empty vector file");
  return entries;
}

SquareMatrix parse_matrix(const std::string& text, const PrimeModulus& m) {
  std::vector<size_t> row_ends;
  auto entries = parse_entries(text, m, &row_ends);
  if (row_ends.empty()) throw std::invalid_argument("empty matrix file");
  const size_t n = row_ends.size();
  if (entries.size() != n * n)
    throw std::invalid_argument("matrix grid is not square");
  for (size_t i = 0; i < n; ++i)
    if (row_ends[i] != (i + 1) * n)
      throw std::invalid_argument("ragged matrix row");
  return {n, std::move(entries)};
}

}  // namespace ipkit
