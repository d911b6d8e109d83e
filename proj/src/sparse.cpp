#include "d1/sparse.hpp"

#include <algorithm>
#include <map>

namespace d1 {

std::size_t SparseSet::block_of(const Nat& n) {
    if (n < 1) throw domain_error("block_of: n must be >= 1");
    std::size_t l = 0;
    Nat bound = 5; // 5^{l+1}
    while (n >= bound) {
        ++l;
        bound *= 5;
    }
    return l;
}

std::vector<Nat> SparseSet::block(std::size_t l) const {
    std::vector<Nat> out;
    Nat lo = pow5(l);
    Nat hi = pow5(l + 1);
    for (auto it = members_.lower_bound(lo); it != members_.end() && *it < hi; ++it)
        out.push_back(*it);
    return out;
}

std::set<std::size_t> SparseSet::nonempty_blocks() const {
    std::set<std::size_t> out;
    for (const Nat& n : members_)
        if (n >= 1) out.insert(block_of(n));
    return out;
}

SparseSet SparseSet::unioned(const SparseSet& other) const {
    std::set<Nat> m = members_;
    m.insert(other.members().begin(), other.members().end());
    return SparseSet(std::move(m));
}

bool sparse_check(const SparseSet& s) {
    for (std::size_t l : s.nonempty_blocks())
        if (Nat(s.block(l).size()) > pow2(l + 1)) return false;
    return true;
}

Rat complement_density_bound(const Nat& n) {
    std::size_t m = SparseSet::block_of(n); // throws on n = 0
    Nat p5 = pow5(m);
    return Rat(p5 - pow2(m + 2), p5);
}

BlockHalves block_half(const SparseSet& s, std::size_t k) {
    std::set<Nat> first, second;
    // Elements of blocks l < k (and the stray 0) go wholly to `first`.
    for (const Nat& n : s.members())
        if (n < 1 || SparseSet::block_of(n) < k) first.insert(n);
    for (std::size_t l : s.nonempty_blocks()) {
        if (l < k) continue;
        std::vector<Nat> elems = s.block(l);
        Nat quota = pow2(l - k);
        Nat taken = 0;
        for (const Nat& n : elems) {
            if (taken < quota) {
                first.insert(n);
                ++taken;
            } else {
                second.insert(n);
            }
        }
    }
    return {SparseSet(std::move(first)), SparseSet(std::move(second))};
}

AssembleReport assemble_bound_check(const std::vector<StagedPart>& parts) {
    AssembleReport rep;
    // Shared designated element for blocks below a part's stage.
    std::map<std::size_t, Nat> singleton;
    SparseSet acc;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        const StagedPart& part = parts[p];
        for (std::size_t l : part.set.nonempty_blocks()) {
            std::vector<Nat> elems = part.set.block(l);
            if (l >= part.stage) {
                if (Nat(elems.size()) > pow2(l - part.stage)) {
                    rep.ok = false;
                    rep.offending_block = l;
                    rep.offending_part = p;
                    rep.reason = "per-block bound 2^(l-k) exceeded";
                    return rep;
                }
            } else {
                if (elems.size() > 1) {
                    rep.ok = false;
                    rep.offending_block = l;
                    rep.offending_part = p;
                    rep.reason = "block below stage holds more than the designated element";
                    return rep;
                }
                auto [it, inserted] = singleton.emplace(l, elems.front());
                if (!inserted && it->second != elems.front()) {
                    rep.ok = false;
                    rep.offending_block = l;
                    rep.offending_part = p;
                    rep.reason = "parts disagree on the designated below-stage element";
                    return rep;
                }
            }
        }
        acc = acc.unioned(part.set);
    }
    if (!sparse_check(acc)) {
        rep.ok = false;
        rep.reason = "union violates the 2^(l+1) block bound";
    }
    return rep;
}

} // namespace d1
