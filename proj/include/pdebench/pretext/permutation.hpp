#pragma once

#include <cstdint>
#include <vector>

#include "pdebench/core/errors.hpp"

namespace pdebench {

using Perm = std::vector<int>;

// Positions that differ from the identity.
int hamming_distance(const Perm& p);

// Index of p in the lexicographic enumeration of S_n (0 = identity).
uint64_t lex_index(const Perm& p);

// Inverse of lex_index: the idx-th permutation of S_n in lexicographic order.
Perm nth_permutation(int n, uint64_t idx);

uint64_t factorial(int n);

// The k permutations of S_n_patches ranked by Hamming distance to the
// identity (descending), ties broken lexicographically. For S_8 and k = 1000
// this is the first thousand derangements in lexicographic order.
std::vector<Perm> jigsaw_bank(int n_patches, int k);

}  // namespace pdebench
