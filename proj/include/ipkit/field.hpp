#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ipkit {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

/// Tally of field operations performed while a CountScope is active.
struct OpCounter {
  u64 adds = 0;
  u64 muls = 0;
  u64 invs = 0;

  u64 total() const { return adds + muls + invs; }
  void reset() { adds = muls = invs = 0; }
};

namespace detail {
extern thread_local OpCounter* active_counter;
inline void count_add() {
  if (active_counter) ++active_counter->adds;
}
inline void count_mul() {
  if (active_counter) ++active_counter->muls;
}
inline void count_inv() {
  if (active_counter) ++active_counter->invs;
}
}  // namespace detail

/// Installs a counter as the per-thread sink for field-op accounting.
/// Scopes nest; the previous sink is restored on destruction.
class CountScope {
 public:
  explicit CountScope(OpCounter& c) : prev_(detail::active_counter) {
    detail::active_counter = &c;
  }
  ~CountScope() { detail::active_counter = prev_; }
  CountScope(const CountScope&) = delete;
  CountScope& operator=(const CountScope&) = delete;

 private:
  OpCounter* prev_;
};

/// Deterministic Miller-Rabin, exact for all n < 2^64.
bool is_prime_u64(u64 n);

/// An odd prime p with 2 < p < 2^62, validated at construction.
class PrimeModulus {
 public:
  explicit PrimeModulus(u64 p);

  u64 value() const { return p_; }

  friend bool operator==(const PrimeModulus& a, const PrimeModulus& b) {
    return a.p_ == b.p_;
  }
  friend bool operator!=(const PrimeModulus& a, const PrimeModulus& b) {
    return a.p_ != b.p_;
  }

  /// 2^61 - 1, the default modulus for protocol runs.
  static const PrimeModulus& mersenne61();

 private:
  u64 p_;
};

/// Canonical residue in F_p. Elements carry their modulus; mixing moduli
/// throws std::invalid_argument.
class FieldElement {
 public:
  FieldElement(u64 value, const PrimeModulus& m)
      : v_(value % m.value()), p_(m.value()) {}

  static FieldElement zero(const PrimeModulus& m) { return {0, m.value()}; }
  static FieldElement one(const PrimeModulus& m) { return {1, m.value()}; }

  u64 value() const { return v_; }
  u64 modulus() const { return p_; }
  bool is_zero() const { return v_ == 0; }

  /// Same-field constants without re-validating the modulus.
  FieldElement zero_like() const { return {0, p_, raw_tag{}}; }
  FieldElement one_like() const { return {1, p_, raw_tag{}}; }
  FieldElement like(u64 v) const { return {v % p_, p_, raw_tag{}}; }

  FieldElement& operator+=(const FieldElement& o) {
    check_same(o);
    detail::count_add();
    v_ += o.v_;
    if (v_ >= p_) v_ -= p_;
    return *this;
  }

  FieldElement& operator-=(const FieldElement& o) {
    check_same(o);
    detail::count_add();
    v_ = v_ >= o.v_ ? v_ - o.v_ : v_ + p_ - o.v_;
    return *this;
  }

  FieldElement& operator*=(const FieldElement& o) {
    check_same(o);
    detail::count_mul();
    v_ = static_cast<u64>(static_cast<u128>(v_) * o.v_ % p_);
    return *this;
  }

  friend FieldElement operator+(FieldElement a, const FieldElement& b) {
    a += b;
    return a;
  }
  friend FieldElement operator-(FieldElement a, const FieldElement& b) {
    a -= b;
    return a;
  }
  friend FieldElement operator*(FieldElement a, const FieldElement& b) {
    a *= b;
    return a;
  }

  FieldElement operator-() const {
    return {v_ == 0 ? 0 : p_ - v_, p_, raw_tag{}};
  }

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    return a.p_ == b.p_ && a.v_ == b.v_;
  }
  friend bool operator!=(const FieldElement& a, const FieldElement& b) {
    return !(a == b);
  }

  /// Multiplicative inverse; throws std::domain_error on zero.
  FieldElement inverse() const;

  /// a^e by square-and-multiply; a^0 = 1 including 0^0.
  FieldElement pow(u64 e) const;

 private:
  struct raw_tag {};
  FieldElement(u64 v, u64 p) : v_(v), p_(p) {}
  FieldElement(u64 v, u64 p, raw_tag) : v_(v), p_(p) {}

  void check_same(const FieldElement& o) const {
    if (p_ != o.p_) throw std::invalid_argument("field modulus mismatch");
  }

  u64 v_;
  u64 p_;

  friend class RandomSource;
};

/// Lowercase minimal hex of the canonical residue ("0" for zero).
std::string to_hex(const FieldElement& x);
std::string to_hex_u64(u64 v);
u64 u64_from_hex(const std::string& s);
FieldElement fe_from_hex(const std::string& s, const PrimeModulus& m);

/// Seeded xoshiro256** stream. Identical seeds give identical sequences;
/// fork(id) derives an independent stream keyed by (parent key, id), so
/// Monte-Carlo trials can draw in parallel without overlap.
class RandomSource {
 public:
  explicit RandomSource(u64 seed);

  RandomSource fork(u64 stream) const;

  u64 seed() const { return seed_; }

  u64 next_u64();

  /// Uniform in [0, n) by masked rejection on the PRNG word.
  u64 next_below(u64 n);

  FieldElement next_element(const PrimeModulus& m) {
    return {next_below(m.value()), m.value()};
  }

 private:
  explicit RandomSource(u64 seed, u64 key);

  std::array<u64, 4> s_;
  u64 seed_;
  u64 key_;
};

}  // namespace ipkit
