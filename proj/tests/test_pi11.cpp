#include <doctest.h>

#include "d1/pi11.hpp"

using namespace d1;

namespace {

std::shared_ptr<const CodedTree> sample_tree() {
    // root=1, 0->0, 1->1, 00->1
    return std::make_shared<const CodedTree>(CodedTree(
        {{Word{}, true}, {Word{0}, false}, {Word{1}, true}, {Word{0, 0}, true}}));
}

} // namespace

TEST_CASE("block regions from explicit allocations") {
    // Single root with B coded in block 3: the whole of P_3+... the B
    // region is all of [2^3, 2^4) = [8, 15].
    std::map<Word, std::size_t, WordLengthLex> b_over;
    b_over[Word{}] = 3;
    CodedTree t({{Word{}, true}}, {}, b_over);
    Region b = t.b_region(0);
    CHECK(b.first() == 8);
    CHECK(b.last() == 15);
    Bitstream bs = build_b(std::make_shared<const CodedTree>(std::move(t)));
    for (Nat n = 8; n <= 15; ++n) CHECK(bs.bit(n));
    CHECK_FALSE(bs.bit(7));
    CHECK_FALSE(bs.bit(16));
}

TEST_CASE("value region of a length-2 node in block 4") {
    std::map<Word, std::size_t, WordLengthLex> val_over;
    val_over[Word{0, 0}] = 4;
    CodedTree t({{Word{}, true}, {Word{0}, true}, {Word{0, 0}, true}}, {}, {}, val_over);
    Region r = t.value_region(t.index_of(Word{0, 0}));
    CHECK(r.block == 4);
    CHECK(r.size == 4); // last 2^{4-2} positions
    CHECK(r.first() == 28);
    CHECK(r.last() == 31);
}

TEST_CASE("tree construction validation") {
    // Non-prefix-closed node sets are rejected.
    CHECK_THROWS_AS(CodedTree({{Word{}, true}, {Word{0, 0}, true}}), domain_error);
    CHECK_THROWS_AS(CodedTree({{Word{0}, true}}), domain_error);
    // Duplicates are rejected.
    CHECK_THROWS_AS(CodedTree({{Word{}, true}, {Word{}, false}}), domain_error);
}

TEST_CASE("numbering is length-then-lex") {
    auto t = sample_tree();
    CHECK(t->node(0) == Word{});
    CHECK(t->node(1) == Word{0});
    CHECK(t->node(2) == Word{1});
    CHECK(t->node(3) == Word{0, 0});
    CHECK(t->index_of(Word{1}) == 2);
    CHECK(t->parent_of(3).value() == 1);
    CHECK_FALSE(t->parent_of(0).has_value());
}

TEST_CASE("allocated blocks never overlap") {
    auto t = sample_tree();
    std::set<std::size_t> used;
    for (std::size_t i = 0; i < t->node_count(); ++i) {
        CHECK(used.insert(t->alloc_b(i)).second);
        CHECK(used.insert(t->alloc_val(i)).second);
        const std::size_t len = t->node(i).size();
        for (std::size_t m = 0; m < len; ++m)
            for (std::uint32_t tau = 0; tau < (1u << (m + 1)); ++tau)
                for (int j = 0; j <= 1; ++j)
                    for (std::size_t k = 0; k < CodedTree::kDedChoices; ++k)
                        CHECK(used.insert(t->alloc_ded(i, m, tau, j != 0, k)).second);
    }
}

TEST_CASE("a_bit splits into A-tilde and the R-coded characteristic") {
    auto t = sample_tree();
    for (Nat n = 0; n < 256; ++n) {
        if (n % 2 == 0) {
            CHECK(t->a_bit(n) == t->a_tilde_bit(n / 2));
        } else {
            Nat p = (n - 1) / 2;
            bool member = p >= 1 && pow2_valuation(p) < t->node_count();
            CHECK(t->a_bit(n) == member);
        }
    }
    CHECK(t->char_bit(0));
    CHECK(t->char_bit(3));
    CHECK_FALSE(t->char_bit(4));
}

TEST_CASE("true-assumption deductions answer the coded bit") {
    auto t = sample_tree();
    // For sigma = {0,0}, m = 1: predecessors are {0} (bit 0) and {} (bit 1),
    // so the true tau has bit0 = 0, bit1 = 1.
    std::size_t idx = t->index_of(Word{0, 0});
    std::uint32_t tau = t->true_tau(idx, 1);
    CHECK(tau == 2);
    DedBehavior b = t->ded_behavior(idx, 1, tau);
    CHECK(b.answers);
    CHECK(b.j == t->bit_of(idx));
    // False-assumption procedures default to silence.
    CHECK_FALSE(t->ded_behavior(idx, 1, 1).answers);
}

TEST_CASE("truth discipline rejects lying overrides") {
    DedOverride lie;
    lie.sigma = Word{0, 0};
    lie.m = 0;
    lie.tau = 0; // true tau: b_{0} = 0
    lie.behavior = DedBehavior{true, true, 0}; // but b_{00} = 1... j must equal b_sigma
    // b_{00} = 1, j = true: this is legal. Flip j to make it a lie.
    lie.behavior = DedBehavior{true, false, 0};
    CHECK_THROWS_AS(CodedTree({{Word{}, true}, {Word{0}, false}, {Word{1}, true},
                               {Word{0, 0}, true}},
                              {lie}),
                    domain_error);
}

TEST_CASE("full oracle determines every bit") {
    auto t = sample_tree();
    PartialOracle o = PartialOracle::full(build_a(t));
    DeterminedBits bits(o, t, 1000);
    for (std::size_t i = 0; i < t->node_count(); ++i) {
        REQUIRE(bits.value(i).has_value());
        CHECK(*bits.value(i) == t->bit_of(i));
    }
}

TEST_CASE("empty oracle determines nothing") {
    auto t = sample_tree();
    DeterminedBits bits(PartialOracle::empty(), t, 1000);
    for (std::size_t i = 0; i < t->node_count(); ++i)
        CHECK_FALSE(bits.value(i).has_value());
}

TEST_CASE("deduction recovers a bit whose value region is removed") {
    auto t = sample_tree();
    std::size_t idx = t->index_of(Word{0, 0});
    std::vector<RemovedRegion> removed = {
        RemovedRegion{t->value_region(idx), idx, 2, true}};
    PartialOracle o = PartialOracle::full(build_a(t)).punctured(std::move(removed));
    DeterminedBits bits(o, t, 1000);
    REQUIRE(bits.value(idx).has_value());
    CHECK(*bits.value(idx) == t->bit_of(idx)); // deduced through an answer region
    CHECK(can_determine(o, t, Word{0, 0}, 1000).value() == true);
}

TEST_CASE("decode_b_bit agrees with the coded stream on a full oracle") {
    auto t = sample_tree();
    Bitstream b = build_b(t);
    PartialOracle o = PartialOracle::full(build_a(t));
    DeterminedBits bits(o, t, 1000);
    for (Nat n = 0; n < 512; ++n) {
        auto d = decode_b_bit(o, bits, t, n, 1000);
        REQUIRE(d.has_value());
        CHECK(*d == b.bit(n));
    }
}

TEST_CASE("puncture hides exactly the chain bits") {
    auto t = sample_tree();
    PunctureSpec spec;
    spec.chain = {Word{0}, Word{0, 0}};
    PartialOracle o = puncture(t, spec);
    DeterminedBits bits(o, t, 2000);
    CHECK_FALSE(bits.value(t->index_of(Word{0})).has_value());
    CHECK_FALSE(bits.value(t->index_of(Word{0, 0})).has_value());
    REQUIRE(bits.value(t->index_of(Word{})).has_value());
    CHECK(*bits.value(t->index_of(Word{})) == true);
    REQUIRE(bits.value(t->index_of(Word{1})).has_value());
    CHECK(*bits.value(t->index_of(Word{1})) == true);
    // Off-chain positions of A still answer.
    CHECK(o.query(t->value_region(t->index_of(Word{1})).first() * 2, 10).has_value());
}

TEST_CASE("puncture_regions validates the chain") {
    auto t = sample_tree();
    PunctureSpec bad;
    bad.chain = {Word{0}, Word{1}};
    CHECK_THROWS_AS(puncture_regions(*t, bad), domain_error);
    PunctureSpec missing;
    missing.chain = {Word{0, 1}};
    CHECK_THROWS_AS(puncture_regions(*t, missing), domain_error);
}

TEST_CASE("certificate: dips, uniqueness and recovery") {
    auto t = sample_tree();
    PunctureSpec spec;
    spec.chain = {Word{0}, Word{0, 0}};
    PunctureCertificate cert = certify_puncture(*t, spec, 6);
    CHECK(cert.one_region_per_length);
    CHECK_FALSE(cert.regions.empty());
    for (const RegionReport& r : cert.regions) {
        CHECK(r.dips_below_bound);
        CHECK(r.block_local_density < Rat(1));
        CHECK(r.block_local_density >= Rat(0));
    }
    REQUIRE(cert.thresholds.size() == 7);
    // m = 0: density never drops below 0.
    CHECK_FALSE(cert.thresholds[0].last_crossing.has_value());
    // Recovery to 1 - 2^{-(m-1)} holds for thresholds coarser than the
    // deepest removal: the chain removes a whole deduction block (effective
    // length 0, local dip to 0), which recovers to about 1 - 1/8 by the
    // next block, so m <= 3 is the guaranteed range here.
    for (std::size_t m = 0; m <= 3; ++m) CHECK(cert.thresholds[m].recovered_by_next_block);
    // Crossings move outward as the threshold tightens.
    for (std::size_t m = 3; m < cert.thresholds.size(); ++m) {
        REQUIRE(cert.thresholds[m].last_crossing.has_value());
        if (m > 3)
            CHECK(*cert.thresholds[m].last_crossing > *cert.thresholds[m - 1].last_crossing);
    }
    std::string js = cert.to_json();
    CHECK(js.find("\"puncture-certificate/1\"") != std::string::npos);
}

TEST_CASE("certificate crossings match a scan of the domain profile") {
    // A root-only chain keeps the removed region in block 0 (A position 2),
    // so the exact certificate and a brute scan see the same crossings.
    auto t = std::make_shared<const CodedTree>(CodedTree({{Word{}, true}}));
    PunctureSpec spec;
    spec.chain = {Word{}};
    PunctureCertificate cert = certify_puncture(*t, spec, 4);
    PartialOracle o = puncture(t, spec);
    std::size_t horizon = 1 << 10;
    auto scan = domain_crossings(o, horizon, 10, 4);
    REQUIRE(scan.size() == 5);
    for (std::size_t m = 0; m <= 4; ++m) {
        const auto& exact = cert.thresholds[m].last_crossing;
        const auto& scanned = scan[m].last_crossing;
        CHECK(exact.has_value() == scanned.has_value());
        if (exact && scanned) CHECK(*exact == *scanned);
    }
}

TEST_CASE("tree and puncture JSON round-trips") {
    auto t = sample_tree();
    std::string js = t->to_json();
    CHECK(js.find("\"coded-tree/1\"") != std::string::npos);
    CodedTree back = CodedTree::from_json(js);
    CHECK(back.to_json() == js);
    for (Nat n = 0; n < 512; ++n) CHECK(back.a_bit(n) == t->a_bit(n));

    PunctureSpec spec;
    spec.chain = {Word{0}, Word{0, 0}};
    std::string sj = spec.to_json();
    CHECK(sj.find("\"puncture-spec/1\"") != std::string::npos);
    PunctureSpec sback = PunctureSpec::from_json(sj);
    CHECK(sback.chain == spec.chain);
}
