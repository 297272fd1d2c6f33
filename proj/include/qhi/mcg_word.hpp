#pragma once

// Integer 2x2 matrix arithmetic over Z, LR-word encoding of pseudo-Anosov
// mapping classes of the once-punctured torus / four-punctured sphere, and
// the canonical cyclic decomposition of a hyperbolic SL(2,Z) conjugacy class.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qhi/errors.hpp"

namespace qhi {

inline void validate_word(const std::string& word) {
  if (word.empty()) throw InvalidParameter("mapping class word must be nonempty");
  for (char c : word)
    if (c != 'R' && c != 'L')
      throw InvalidParameter(std::string("invalid letter '") + c + "' in word");
}

// True when the word can represent a pseudo-Anosov class (needs both letters;
// a power of a single twist is reducible with trace +-2).
inline bool word_is_pa_admissible(const std::string& word) {
  return word.find('R') != std::string::npos && word.find('L') != std::string::npos;
}

struct IntMatrix2x2 {
  // Row-major entries [[a, b], [c, d]].
  long long a, b, c, d;

  IntMatrix2x2(long long a_, long long b_, long long c_, long long d_)
      : a(a_), b(b_), c(c_), d(d_) {
    long long ad, bc, det;
    if (__builtin_mul_overflow(a, d, &ad) || __builtin_mul_overflow(b, c, &bc) ||
        __builtin_sub_overflow(ad, bc, &det))
      throw OverflowError("determinant computation overflowed");
    if (det != 1) throw InvalidParameter("matrix is not in SL(2,Z): det != 1");
  }

  static IntMatrix2x2 identity() { return {1, 0, 0, 1}; }
  static IntMatrix2x2 R() { return {1, 1, 0, 1}; }
  static IntMatrix2x2 L() { return {1, 0, 1, 1}; }

  long long trace() const {
    long long t;
    if (__builtin_add_overflow(a, d, &t)) throw OverflowError("trace overflowed");
    return t;
  }

  friend IntMatrix2x2 operator*(const IntMatrix2x2& x, const IntMatrix2x2& y) {
    auto fma = [](long long p, long long q, long long r, long long s) {
      long long pq, rs, out;
      if (__builtin_mul_overflow(p, q, &pq) || __builtin_mul_overflow(r, s, &rs) ||
          __builtin_add_overflow(pq, rs, &out))
        throw OverflowError("2x2 product overflowed (word too long?)");
      return out;
    };
    return {fma(x.a, y.a, x.b, y.c), fma(x.a, y.b, x.b, y.d),
            fma(x.c, y.a, x.d, y.c), fma(x.c, y.b, x.d, y.d)};
  }

  friend bool operator==(const IntMatrix2x2& x, const IntMatrix2x2& y) {
    return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
  }
};

inline IntMatrix2x2 word_to_matrix(const std::string& word) {
  validate_word(word);
  IntMatrix2x2 m = IntMatrix2x2::identity();
  for (char ch : word) m = m * (ch == 'R' ? IntMatrix2x2::R() : IntMatrix2x2::L());
  return m;
}

inline bool is_pseudo_anosov(const IntMatrix2x2& m) {
  long long t = m.trace();
  return t > 2 || t < -2;
}

// Lexicographically least rotation with R < L.  Idempotent.
inline std::string cyclic_normalize(const std::string& word) {
  validate_word(word);
  auto key = [](const std::string& w) {
    std::string k = w;
    for (char& c : k) c = (c == 'R') ? '0' : '1';
    return k;
  };
  std::string best = word;
  std::string bk = key(best);
  for (std::size_t i = 1; i < word.size(); ++i) {
    std::string rot = word.substr(i) + word.substr(0, i);
    std::string rk = key(rot);
    if (rk < bk) { best = std::move(rot); bk = std::move(rk); }
  }
  return best;
}

namespace detail {

inline long long isqrt_ll(long long n) {
  long long s = static_cast<long long>(std::sqrt(static_cast<long double>(n)));
  while (s > 0 && s * s > n) --s;
  while ((s + 1) * (s + 1) <= n) ++s;
  return s;
}

// floor((P + sqrt(D)) / Q) for a non-square D > 0, exact in integers.
inline long long floor_surd(long long P, long long Q, long long D, long long sqrtD) {
  // n is the largest integer with n*Q <= P + sqrt(D).
  auto leq = [&](long long n) {  // does n*Q - P <= sqrt(D) hold?
    __int128 lhs = static_cast<__int128>(n) * Q - P;
    if (lhs <= 0) return true;
    return lhs * lhs <= static_cast<__int128>(D);
  };
  long long n = (Q > 0) ? (P + sqrtD) / Q : (P + sqrtD + 1) / Q;  // close guess
  if (Q > 0) {
    while (leq(n + 1)) ++n;
    while (!leq(n)) --n;
  } else {
    while (!leq(n)) ++n;
    while (leq(n - 1)) --n;
  }
  return n;
}

}  // namespace detail

// Factor a hyperbolic conjugacy class into a positive LR word, unique up to
// cyclic rotation.  Uses the continued-fraction expansion of the attracting
// fixed point x* = ((a-d) + sqrt(t^2-4)) / (2c): the periodic cycle of partial
// quotients, with the letter parity anchored to the absolute position in the
// expansion (even index = R, odd = L), spells the word of a conjugate matrix.
// When Tr < -2 the word for -m is returned (compose with the elliptic
// involution); callers that care can check the trace sign themselves.
inline std::string decompose(const IntMatrix2x2& m) {
  long long t = m.trace();
  if (t <= 2 && t >= -2)
    throw NotPseudoAnosov("matrix has |trace| <= 2, not pseudo-Anosov");
  long long a = m.a, c = m.c, d = m.d;
  if (t < 0) { a = -a; c = -c; d = -d; t = -t; }  // work with -m

  long long D;
  if (__builtin_mul_overflow(t, t, &D) || __builtin_sub_overflow(D, 4, &D))
    throw OverflowError("discriminant overflowed");
  const long long sqrtD = detail::isqrt_ll(D);
  // c == 0 with |t| > 2 is impossible in SL(2,Z): a*d = 1 forces trace +-2.
  long long P = a - d, Q = 2 * c;

  std::map<std::pair<long long, long long>, int> seen;
  std::vector<long long> quots;
  int cycle_start = -1;
  for (int it = 0; it < 100000; ++it) {
    auto ins = seen.emplace(std::make_pair(P, Q), static_cast<int>(quots.size()));
    if (!ins.second) { cycle_start = ins.first->second; break; }
    long long aq = detail::floor_surd(P, Q, D, sqrtD);
    quots.push_back(aq);
    P = aq * Q - P;
    __int128 num = static_cast<__int128>(D) - static_cast<__int128>(P) * P;
    Q = static_cast<long long>(num / Q);
  }
  if (cycle_start < 0) throw Error("continued-fraction cycle not found");

  std::vector<long long> cycle(quots.begin() + cycle_start, quots.end());
  const std::size_t len = cycle.size();
  if (len % 2 == 1) cycle.insert(cycle.end(), cycle.begin(), cycle.begin() + len);

  std::string w;
  for (std::size_t k = 0; k < cycle.size(); ++k) {
    char letter = ((cycle_start + static_cast<long long>(k)) % 2 == 0) ? 'R' : 'L';
    w.append(static_cast<std::size_t>(cycle[k]), letter);
  }

  // The cycle spells the primitive class; m itself may be a proper power.
  std::string cand = w;
  for (int rep = 1; rep <= 512; ++rep) {
    long long tc = word_to_matrix(cand).trace();
    if (tc == t) return cyclic_normalize(cand);
    if (tc > t) break;
    cand += w;
  }
  throw Error("decomposition failed to match trace");
}

}  // namespace qhi
