#include "pdebench/pretext/permutation.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace pdebench {

int hamming_distance(const Perm& p) {
  int d = 0;
  for (size_t i = 0; i < p.size(); ++i)
    if (p[i] != static_cast<int>(i)) ++d;
  return d;
}

uint64_t factorial(int n) {
  uint64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

uint64_t lex_index(const Perm& p) {
  const int n = static_cast<int>(p.size());
  uint64_t idx = 0;
  for (int i = 0; i < n; ++i) {
    int smaller = 0;
    for (int j = i + 1; j < n; ++j)
      if (p[j] < p[i]) ++smaller;
    idx += smaller * factorial(n - 1 - i);
  }
  return idx;
}

Perm nth_permutation(int n, uint64_t idx) {
  if (idx >= factorial(n))
    throw ConfigError("permutation index " + std::to_string(idx) +
                      " out of range for S_" + std::to_string(n));
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  Perm p;
  p.reserve(n);
  for (int i = n - 1; i >= 0; --i) {
    const uint64_t f = factorial(i);
    const int pick = static_cast<int>(idx / f);
    idx %= f;
    p.push_back(pool[pick]);
    pool.erase(pool.begin() + pick);
  }
  return p;
}

std::vector<Perm> jigsaw_bank(int n_patches, int k) {
  if (n_patches < 1 || n_patches > 10)
    throw ConfigError("jigsaw_bank: patch count must be in [1, 10]");
  if (k < 1 || static_cast<uint64_t>(k) > factorial(n_patches))
    throw ConfigError("jigsaw_bank: k = " + std::to_string(k) +
                      " exceeds |S_" + std::to_string(n_patches) + "|");

  // Lexicographic enumeration bucketed by Hamming distance preserves lex
  // order inside each bucket.
  std::vector<std::vector<Perm>> buckets(n_patches + 1);
  Perm p(n_patches);
  std::iota(p.begin(), p.end(), 0);
  do {
    buckets[hamming_distance(p)].push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));

  std::vector<Perm> bank;
  bank.reserve(k);
  for (int d = n_patches; d >= 0 && static_cast<int>(bank.size()) < k; --d)
    for (const Perm& q : buckets[d]) {
      if (static_cast<int>(bank.size()) == k) break;
      bank.push_back(q);
    }
  return bank;
}

}  // namespace pdebench
