#include "ipkit/field.hpp"

#include <bit>

namespace ipkit {

namespace detail {
thread_local OpCounter* active_counter = nullptr;
}

static u64 mulmod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

static u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    if (n % q == 0) return n == q;
  }
  u64 d = n - 1;
  int s = std::countr_zero(d);
  d >>= s;
  // Witness set covering all n < 3.3e24 (Sorenson & Webster).
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                29ull, 31ull, 37ull}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

PrimeModulus::PrimeModulus(u64 p) : p_(p) {
  if (p <= 2 || p >= (1ull << 62))
    throw std::invalid_argument("modulus out of range (2, 2^62)");
  if (!is_prime_u64(p)) throw std::invalid_argument("modulus is not prime");
}

const PrimeModulus& PrimeModulus::mersenne61() {
  static const PrimeModulus m((1ull << 61) - 1);
  return m;
}

FieldElement FieldElement::inverse() const {
  if (v_ == 0) throw std::domain_error("inverse of zero");
  detail::count_inv();
  // Extended Euclid on (v, p); p prime so gcd is 1.
  std::int64_t t = 0, new_t = 1;
  u64 r = p_, new_r = v_;
  while (new_r != 0) {
    u64 q = r / new_r;
    std::int64_t tmp_t = t - static_cast<std::int64_t>(q) * new_t;
    t = new_t;
    new_t = tmp_t;
    u64 tmp_r = r - q * new_r;
    r = new_r;
    new_r = tmp_r;
  }
  u64 inv = t < 0 ? static_cast<u64>(t + static_cast<std::int64_t>(p_))
                  : static_cast<u64>(t);
  return {inv, p_, raw_tag{}};
}

FieldElement FieldElement::pow(u64 e) const {
  FieldElement r(1, p_, raw_tag{});
  FieldElement base = *this;
  while (e) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

std::string to_hex_u64(u64 v) {
  if (v == 0) return "0";
  static const char* digits = "0123456789abcdef";
  std::string out;
  while (v) {
    out.insert(out.begin(), digits[v & 0xf]);
    v >>= 4;
  }
  return out;
}

std::string to_hex(const FieldElement& x) { return to_hex_u64(x.value()); }

u64 u64_from_hex(const std::string& s) {
  if (s.empty() || s.size() > 16) throw std::invalid_argument("bad hex: " + s);
  u64 v = 0;
  for (char c : s) {
    u64 d;
    if (c >= '0' && c <= '9')
      d = static_cast<u64>(c - '0');
    else if (c >= 'a' && c <= 'f')
      d = static_cast<u64>(c - 'a') + 10;
    else
      throw std::invalid_argument("bad hex: " + s);
    v = (v << 4) | d;
  }
  return v;
}

FieldElement fe_from_hex(const std::string& s, const PrimeModulus& m) {
  u64 v = u64_from_hex(s);
  if (v >= m.value()) throw std::invalid_argument("residue out of range: " + s);
  return {v, m};
}

static u64 splitmix_step(u64& x) {
  x += 0x9e3779b97f4a7c15ull;
  u64 z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

RandomSource::RandomSource(u64 seed) : RandomSource(seed, seed) {}

RandomSource::RandomSource(u64 seed, u64 key) : seed_(seed), key_(key) {
  u64 x = key;
  for (auto& w : s_) w = splitmix_step(x);
}

RandomSource RandomSource::fork(u64 stream) const {
  u64 x = key_ + (stream + 1) * 0x9e3779b97f4a7c15ull;
  return RandomSource(seed_, splitmix_step(x));
}

static inline u64 rotl64(u64 x, int k) { return (x << k) | (x >> (64 - k)); }

u64 RandomSource::next_u64() {
  u64 result = rotl64(s_[1] * 5, 7) * 9;
  u64 t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl64(s_[3], 45);
  return result;
}

u64 RandomSource::next_below(u64 n) {
  if (n == 0) throw std::invalid_argument("next_below(0)");
  if (n == 1) return 0;
  u64 mask = ~0ull >> std::countl_zero(n - 1);
  u64 r;
  do {
    r = next_u64() & mask;
  } while (r >= n);
  return r;
}

}  // namespace ipkit
