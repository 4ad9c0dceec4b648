#pragma once

// Set-partition machinery for moment/cumulant expansions of ordered operator
// products. Elements are labelled 0..n-1 and keep their relative order inside
// every block, so the expansions are valid for non-commuting operators.

#include <functional>
#include <vector>

#include "tmsi/params.hpp"

namespace tmsi::cumulant {

using Block = std::vector<int>;
using Partition = std::vector<Block>;

/// Evaluates a joint quantity (moment or cumulant) of the operators in a block.
using BlockValue = std::function<cplx(const Block&)>;

/// All set partitions of {0, ..., n-1}; there are Bell(n) of them.
std::vector<Partition> set_partitions(int n);

/// n-th moment with the n-th joint cumulant dropped:
///   ⟨X_0 ... X_{n-1}⟩ ≈ Σ_{p ≠ {I}} (|p|−1)!·(−1)^{|p|}·Π_{B∈p} ⟨Π_{i∈B} X_i⟩.
/// Exact whenever the n-th cumulant vanishes (all n ≥ 3 for Gaussian states).
cplx truncated_moment(int n, const BlockValue& moment);

/// ⟨X_0 ... X_{n-1}⟩ = Σ_p Π_{B∈p} κ(B).
cplx moment_from_cumulants(int n, const BlockValue& cumulant);

/// ⟨AB⟩ − ⟨A⟩⟨B⟩ for A = X_0..X_{split-1} and B = X_split..X_{n-1}: the sum
/// over partitions having at least one block that straddles the split.
cplx connected_sum(int n, int split, const BlockValue& cumulant);

}  // namespace tmsi::cumulant
