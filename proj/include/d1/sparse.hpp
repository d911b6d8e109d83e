#pragma once

#include "d1/rational.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace d1 {

// Finite set of naturals with the 5-adic block view S_l = S cap [5^l, 5^{l+1}-1].
// "Sparse by design" demands |S_l| <= 2^{l+1} for every l.
class SparseSet {
public:
    SparseSet() = default;
    explicit SparseSet(std::set<Nat> members) : members_(std::move(members)) {}

    const std::set<Nat>& members() const { return members_; }
    bool contains(const Nat& n) const { return members_.count(n) != 0; }
    bool empty() const { return members_.empty(); }

    // Block index l of n >= 1: the l with 5^l <= n < 5^{l+1}. n = 0 sits
    // below every block and is ignored by the block view.
    static std::size_t block_of(const Nat& n);

    // Elements of S_l in increasing order.
    std::vector<Nat> block(std::size_t l) const;

    // Blocks touched by this set.
    std::set<std::size_t> nonempty_blocks() const;

    SparseSet unioned(const SparseSet& other) const;

private:
    std::set<Nat> members_;
};

// |S cap [5^l, 5^{l+1}-1]| <= 2^{l+1} for every nonempty block.
bool sparse_check(const SparseSet& s);

// Analytic lower bound (5^m - 2^{m+2}) / 5^m on the complement's prefix
// density at n, where m is the block index of n. May be <= 0 for small m,
// in which case it is vacuous.
Rat complement_density_bound(const Nat& n);

struct BlockHalves {
    SparseSet first;
    SparseSet second;
};

// Stage-k halving: for each block l >= k the first 2^{l-k} elements go to
// `first` and the rest to `second`; under-full blocks and blocks l < k go
// wholly to `first`.
BlockHalves block_half(const SparseSet& s, std::size_t k);

struct StagedPart {
    SparseSet set;
    std::size_t stage = 0;
};

struct AssembleReport {
    bool ok = true;
    std::optional<std::size_t> offending_block;
    std::optional<std::size_t> offending_part;
    std::string reason;
};

// Checks the halving-stage invariants on each part (per-block bound
// 2^{l-k} for l >= k, a shared singleton {m_l} for l < k) and that the
// union is sparse by design.
AssembleReport assemble_bound_check(const std::vector<StagedPart>& parts);

} // namespace d1
