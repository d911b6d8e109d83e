#include <doctest.h>

#include "d1/sparse.hpp"

#include "d1/bitstream.hpp"

#include <random>

using namespace d1;

namespace {

SparseSet make(std::initializer_list<int> xs) {
    std::set<Nat> s;
    for (int x : xs) s.insert(Nat(x));
    return SparseSet(std::move(s));
}

} // namespace

TEST_CASE("block decomposition") {
    CHECK(SparseSet::block_of(1) == 0);
    CHECK(SparseSet::block_of(4) == 0);
    CHECK(SparseSet::block_of(5) == 1);
    CHECK(SparseSet::block_of(24) == 1);
    CHECK(SparseSet::block_of(25) == 2);
    SparseSet s = make({1, 3, 7, 30, 625});
    CHECK(s.block(0) == std::vector<Nat>{Nat(1), Nat(3)});
    CHECK(s.block(1) == std::vector<Nat>{Nat(7)});
    CHECK(s.block(2) == std::vector<Nat>{Nat(30)});
    CHECK(s.block(3).empty());
    CHECK(s.block(4) == std::vector<Nat>{Nat(625)});
    CHECK(s.nonempty_blocks() == std::set<std::size_t>{0, 1, 2, 4});
}

TEST_CASE("sparse_check examples") {
    CHECK(sparse_check(make({})));
    CHECK(sparse_check(make({17})));
    // Block 0 = [1, 4] admits at most 2 elements.
    CHECK(sparse_check(make({1, 2})));
    CHECK_FALSE(sparse_check(make({1, 2, 3})));
    // Block 1 = [5, 24] admits at most 4.
    CHECK(sparse_check(make({5, 6, 7, 8})));
    CHECK_FALSE(sparse_check(make({5, 6, 7, 8, 9})));
}

TEST_CASE("complement density bound") {
    CHECK(complement_density_bound(Nat(30)) == Rat(9, 25)); // block 2: (25-16)/25
    CHECK(complement_density_bound(Nat(200)) == Rat(93, 125));
    // Vacuous (non-positive) at small blocks.
    CHECK(complement_density_bound(Nat(2)) <= Rat(0));
}

TEST_CASE("sparse complement dominates the analytic bound") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 20; ++trial) {
        std::set<Nat> members;
        for (std::size_t l = 0; l < 4; ++l) {
            Nat lo = pow5(l);
            Nat hi = pow5(l + 1);
            std::size_t quota = static_cast<std::size_t>(rng() % (std::size_t(1) << (l + 1)));
            for (std::size_t i = 0; i <= quota; ++i)
                members.insert(lo + Nat(rng() % static_cast<std::uint64_t>(hi - lo)));
        }
        SparseSet s(members);
        REQUIRE(sparse_check(s));
        DensityProfile p = DensityProfile::of(Bitstream::sparse_complement(s), 625);
        for (std::size_t n = 1; n <= 625; ++n) {
            CHECK(p.d(n) >= complement_density_bound(Nat(n)));
            // Exact cross-check against membership.
            CHECK(p.count(n) + members.size() >= n);
        }
    }
}

TEST_CASE("block_half examples") {
    // Stage 0: block 1 splits 2^{1-0} = 2 first elements / rest.
    BlockHalves h = block_half(make({5, 6, 7, 8}), 0);
    CHECK(h.first.members() == std::set<Nat>{Nat(5), Nat(6)});
    CHECK(h.second.members() == std::set<Nat>{Nat(7), Nat(8)});
    // Blocks below the stage go wholly to first.
    BlockHalves h2 = block_half(make({1, 2, 5, 6, 7, 8}), 2);
    CHECK(h2.first.contains(Nat(1)));
    CHECK(h2.first.contains(Nat(2)));
    // Stage 2 quota for block 1 would be 2^{-1}: block 1 is below stage 2.
    CHECK(h2.first.contains(Nat(5)));
    CHECK(h2.second.empty());
}

TEST_CASE("block_half partitions and preserves sparseness") {
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 30; ++trial) {
        std::set<Nat> members;
        for (int i = 0; i < 12; ++i) members.insert(Nat(rng() % 600 + 1));
        SparseSet s(members);
        if (!sparse_check(s)) continue;
        for (std::size_t k = 0; k <= 3; ++k) {
            BlockHalves h = block_half(s, k);
            // Partition.
            for (const Nat& n : members)
                CHECK((h.first.contains(n) != h.second.contains(n)));
            CHECK(h.first.members().size() + h.second.members().size() == members.size());
            CHECK(sparse_check(h.first));
            CHECK(sparse_check(h.second));
            // Stage-k quota on the first half.
            for (std::size_t l = k; l < 5; ++l)
                CHECK(h.first.block(l).size() <= (std::size_t(1) << (l - k)));
        }
    }
}

TEST_CASE("assemble_bound_check accepts stage-respecting parts") {
    // Stage-0 halves of a full block each hold 2^{l-0} elements.
    SparseSet s = make({5, 6, 7, 8});
    BlockHalves h = block_half(s, 0);
    CHECK(assemble_bound_check({{h.first, 0}, {h.second, 0}}).ok);
    // Deeper stages shrink the per-block quota but stay assemblable while
    // counts fit 2^{l-k}; below-stage blocks share one designated element.
    std::vector<StagedPart> parts = {{make({1, 5, 30, 31}), 1}, {make({1, 6, 32, 33}), 1}};
    CHECK(assemble_bound_check(parts).ok);
    // Disagreeing below-stage designated elements are rejected.
    std::vector<StagedPart> bad = {{make({1, 5}), 1}, {make({2, 6}), 1}};
    AssembleReport r = assemble_bound_check(bad);
    CHECK_FALSE(r.ok);
    CHECK(*r.offending_block == 0);
    CHECK(*r.offending_part == 1);
}

TEST_CASE("assemble_bound_check rejects an overfull part") {
    // Stage-1 part with 3 elements in block 1 breaks the 2^{1-1}... the
    // quota is 2^{l-k} = 1 for l = 1, k = 1.
    std::vector<StagedPart> parts = {{make({5, 6}), 1}};
    AssembleReport r = assemble_bound_check(parts);
    CHECK_FALSE(r.ok);
    REQUIRE(r.offending_block.has_value());
    CHECK(*r.offending_block == 1);
    CHECK(*r.offending_part == 0);
}

TEST_CASE("assemble_bound_check rejects non-sparse unions") {
    // Each part respects its stage-0 quota of 2^0 = 1 in block 0, but the
    // union holds 3 elements there against the sparse bound of 2.
    std::vector<StagedPart> parts = {{make({1}), 0}, {make({2}), 0}, {make({3}), 0}};
    AssembleReport r = assemble_bound_check(parts);
    CHECK_FALSE(r.ok);
}

TEST_CASE("unioned merges members") {
    SparseSet u = make({1, 5}).unioned(make({5, 30}));
    CHECK(u.members() == std::set<Nat>{Nat(1), Nat(5), Nat(30)});
}
