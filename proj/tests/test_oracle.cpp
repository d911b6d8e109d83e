#include <doctest.h>

#include "d1/oracle.hpp"

#include <random>

using namespace d1;

TEST_CASE("fact oracles gate answers by delay") {
    std::map<Nat, Fact> facts;
    facts[Nat(5)] = Fact{true, Nat(10)};
    PartialOracle o = PartialOracle::from_facts(std::move(facts));
    CHECK_FALSE(o.query(5, 9).has_value());
    REQUIRE(o.query(5, 10).has_value());
    CHECK(*o.query(5, 10) == true);
    CHECK(*o.query(5, 1000) == true);
    CHECK_FALSE(o.query(4, 1000).has_value());
    CHECK_FALSE(PartialOracle::empty().query(0, 1000).has_value());
}

TEST_CASE("full and masked oracles") {
    PartialOracle full = PartialOracle::full(Bitstream::evens());
    CHECK(*full.query(4, 0) == true);
    CHECK(*full.query(5, 0) == false);
    PartialOracle delayed = PartialOracle::full(Bitstream::evens(), Nat(3));
    CHECK_FALSE(delayed.query(4, 2).has_value());
    CHECK(*delayed.query(4, 3) == true);
    PartialOracle m = PartialOracle::masked(Bitstream::evens(), Bitstream::evens());
    CHECK(*m.query(4, 0) == true);
    CHECK_FALSE(m.query(5, 100).has_value()); // odd positions masked out
}

TEST_CASE("without_zero_answers drops exactly the 0-facts") {
    PartialOracle o = PartialOracle::full(Bitstream::evens()).without_zero_answers();
    CHECK(*o.query(4, 0) == true);
    CHECK_FALSE(o.query(5, 1000).has_value());
}

TEST_CASE("with_facts overlays win") {
    std::map<Nat, Fact> facts;
    facts[Nat(5)] = Fact{true, Nat(2)};
    PartialOracle o = PartialOracle::full(Bitstream::evens()).with_facts(std::move(facts));
    CHECK(*o.query(5, 2) == true); // overlay beats the base's 0
    CHECK_FALSE(o.query(5, 1).has_value());
    CHECK(*o.query(4, 0) == true);
}

TEST_CASE("query answers are monotone in fuel") {
    std::mt19937_64 rng(21);
    std::map<Nat, Fact> facts;
    for (int i = 0; i < 30; ++i)
        facts[Nat(rng() % 50)] = Fact{(rng() & 1) != 0, Nat(rng() % 40)};
    PartialOracle o = PartialOracle::from_facts(std::move(facts));
    for (Nat n = 0; n < 50; ++n) {
        std::optional<bool> prev;
        for (Nat fuel = 0; fuel <= 45; ++fuel) {
            auto a = o.query(n, fuel);
            if (prev) {
                REQUIRE(a.has_value());
                CHECK(*a == *prev);
            }
            prev = a ? a : prev;
        }
    }
}

TEST_CASE("visible_facts reports delay-minimal facts in position order") {
    std::map<Nat, Fact> facts;
    facts[Nat(3)] = Fact{true, Nat(7)};
    facts[Nat(1)] = Fact{false, Nat(2)};
    facts[Nat(9)] = Fact{true, Nat(100)};
    PartialOracle o = PartialOracle::from_facts(std::move(facts));
    auto vis = o.visible_facts(Nat(10), Nat(10));
    REQUIRE(vis.size() == 2);
    CHECK(vis[0].first == 1);
    CHECK(vis[0].second.answer == false);
    CHECK(vis[0].second.delay == 2);
    CHECK(vis[1].first == 3);
    CHECK(vis[1].second.delay == 7);
}

TEST_CASE("constant and diverge functionals") {
    PartialOracle o = PartialOracle::empty();
    Transcript t = Functional::constant(true).run(o, 7, 10);
    REQUIRE(t.output.has_value());
    CHECK(*t.output == true);
    CHECK(t.queries.empty());
    CHECK(t.fuel_used >= 1);
    CHECK_FALSE(Functional::constant(true).run(o, 7, 0).output.has_value());
    CHECK_FALSE(Functional::diverge().run(o, 7, 100000).output.has_value());
}

TEST_CASE("identity_copy reads its input position") {
    PartialOracle o = PartialOracle::full(Bitstream::evens());
    Transcript t = Functional::identity_copy().run(o, 6, 100);
    REQUIRE(t.output.has_value());
    CHECK(*t.output == true);
    REQUIRE(t.queries.size() == 1);
    CHECK(t.queries[0].pos == 6);
    CHECK_FALSE(Functional::identity_copy().run(PartialOracle::empty(), 6, 100).output.has_value());
}

TEST_CASE("functional halting is monotone in fuel with a stable output") {
    PartialOracle o = PartialOracle::full(Bitstream::evens(), Nat(2));
    Functional f = Functional::both_halves();
    std::optional<bool> first;
    for (Nat fuel = 0; fuel <= 40; ++fuel) {
        Transcript t = f.run(o, 2, fuel);
        if (first) {
            REQUIRE(t.output.has_value());
            CHECK(*t.output == *first);
        } else if (t.output) {
            first = t.output;
            CHECK(t.fuel_used <= fuel);
        }
    }
    REQUIRE(first.has_value());
    CHECK(*first == false); // position 5 is odd
}

TEST_CASE("oracle from a computation reproduces its halting set") {
    // from_functional(constant(1), empty): every position answered 1 with
    // delay = the run's fuel use.
    PartialOracle o = PartialOracle::from_functional(Functional::constant(true),
                                                     PartialOracle::empty());
    CHECK_FALSE(o.query(3, 0).has_value());
    REQUIRE(o.query(3, 1).has_value());
    CHECK(*o.query(3, 1) == true);
    // parity halts everywhere; answer = input mod 2.
    PartialOracle p = PartialOracle::from_functional(Functional::parity(),
                                                     PartialOracle::empty());
    CHECK(*p.query(4, 10) == false);
    CHECK(*p.query(5, 10) == true);
    // diverge yields the empty oracle.
    PartialOracle d = PartialOracle::from_functional(Functional::diverge(),
                                                     PartialOracle::empty());
    CHECK_FALSE(d.query(0, 1000).has_value());
}

TEST_CASE("computation from an oracle searches fuel levels") {
    std::map<Nat, Fact> facts;
    facts[Nat(3)] = Fact{true, Nat(7)};
    PartialOracle o = PartialOracle::from_facts(std::move(facts));
    Functional f = Functional::from_oracle(o);
    Transcript t = f.run(PartialOracle::empty(), 3, 1000);
    REQUIRE(t.output.has_value());
    CHECK(*t.output == true);
    CHECK(t.fuel_used >= 7); // cannot observe the answer below its delay
    CHECK_FALSE(f.run(PartialOracle::empty(), 4, 200).output.has_value());
}

TEST_CASE("round trip oracle -> functional -> oracle preserves facts") {
    std::mt19937_64 rng(22);
    std::map<Nat, Fact> facts;
    for (int i = 0; i < 15; ++i)
        facts[Nat(rng() % 30)] = Fact{(rng() & 1) != 0, Nat(rng() % 10)};
    PartialOracle o = PartialOracle::from_facts(facts);
    PartialOracle o2 = PartialOracle::from_functional(Functional::from_oracle(o),
                                                      PartialOracle::empty());
    for (const auto& [n, f] : facts) {
        auto a = o2.query(n, 1000);
        REQUIRE(a.has_value());
        CHECK(*a == f.answer);
    }
    CHECK_FALSE(o2.query(Nat(31), 1000).has_value());
}

TEST_CASE("only_ones keeps 1-outputs and hides the rest") {
    Functional f = Functional::only_ones(Functional::parity());
    PartialOracle o = PartialOracle::empty();
    for (Nat n = 0; n < 20; ++n) {
        Transcript t = f.run(o, n, 100);
        if (n % 2 == 1) {
            REQUIRE(t.output.has_value());
            CHECK(*t.output == true);
        } else {
            CHECK_FALSE(t.output.has_value());
        }
    }
}

TEST_CASE("only_ones replays the same queries") {
    PartialOracle o = PartialOracle::full(Bitstream::evens());
    Transcript plain = Functional::identity_copy().run(o, 5, 100);
    Transcript wrapped = Functional::only_ones(Functional::identity_copy()).run(o, 5, 100);
    REQUIRE(plain.queries.size() == wrapped.queries.size());
    for (std::size_t i = 0; i < plain.queries.size(); ++i)
        CHECK(plain.queries[i].pos == wrapped.queries[i].pos);
    CHECK_FALSE(wrapped.output.has_value()); // 5 is odd, plain outputs 0
    CHECK(plain.output.has_value());
}

TEST_CASE("subset_reduction only claims members of its witness set") {
    Functional f = Functional::subset_reduction(Bitstream::evens());
    PartialOracle full = PartialOracle::full(Bitstream::all());
    CHECK(*f.run(full, 4, 100).output == true);
    CHECK_FALSE(f.run(full, 5, 100).output.has_value()); // not in b_sub
    PartialOracle zeros = PartialOracle::full(Bitstream::none());
    CHECK_FALSE(f.run(zeros, 4, 100).output.has_value()); // answer was 0
}

TEST_CASE("compose serves outer queries by running inner") {
    // outer = identity_copy, inner = parity: outer's query at n answers
    // n mod 2, so the composite computes parity.
    Functional c = Functional::compose(Functional::identity_copy(), Functional::parity());
    PartialOracle o = PartialOracle::empty();
    CHECK(*c.run(o, 3, 100).output == true);
    CHECK(*c.run(o, 4, 100).output == false);
    // Composing with diverge diverges.
    Functional d = Functional::compose(Functional::identity_copy(), Functional::diverge());
    CHECK_FALSE(d.run(o, 3, 10000).output.has_value());
}

TEST_CASE("decision tables run and round-trip through JSON") {
    DecisionTable dt;
    {
        TableRow r;
        r.needs = {{Nat(2), true}};
        r.action = TableRow::Action::Output1;
        dt.rows.push_back(r);
    }
    {
        TableRow r;
        r.action = TableRow::Action::Query;
        r.query_pos = Nat(2);
        dt.rows.push_back(r);
    }
    Functional f = Functional::table(dt);
    PartialOracle yes = PartialOracle::full(Bitstream::all());
    CHECK(*f.run(yes, 0, 100).output == true);
    PartialOracle no = PartialOracle::full(Bitstream::none());
    CHECK_FALSE(f.run(no, 0, 100).output.has_value()); // needs never satisfied

    std::string js = dt.to_json();
    DecisionTable back = DecisionTable::from_json(js);
    CHECK(back.to_json() == js);
    CHECK(*Functional::table(back).run(yes, 0, 100).output == true);
}

TEST_CASE("transcripts serialize") {
    PartialOracle o = PartialOracle::full(Bitstream::evens());
    Transcript t = Functional::identity_copy().run(o, 6, 100);
    std::string js = t.to_json();
    CHECK(js.find("\"transcript/1\"") != std::string::npos);
    CHECK(js.find("\"output\"") != std::string::npos);
}

TEST_CASE("more_is_more on a query-free functional is unchanged") {
    Functional w = Functional::more_is_more(Functional::constant(true), Nat(16));
    Transcript t = w.run(PartialOracle::empty(), 3, 1000);
    REQUIRE(t.output.has_value());
    CHECK(*t.output == true);
}

TEST_CASE("more_is_more never invents outputs") {
    Functional w = Functional::more_is_more(Functional::diverge(), Nat(16));
    PartialOracle o = PartialOracle::full(Bitstream::all());
    CHECK_FALSE(w.run(o, 0, 5000).output.has_value());
}

TEST_CASE("more_is_more is monotone under adding facts") {
    // Exhaustive over small fact sets: if the wrap outputs v on oracle O,
    // it outputs v on every superset of O's facts.
    Functional base = Functional::table([] {
        DecisionTable dt;
        TableRow r1;
        r1.needs = {{Nat(0), true}};
        r1.action = TableRow::Action::Output1;
        dt.rows.push_back(r1);
        TableRow r2;
        r2.needs = {{Nat(1), true}};
        r2.action = TableRow::Action::Output0;
        dt.rows.push_back(r2);
        TableRow r3;
        r3.action = TableRow::Action::Query;
        r3.query_pos = Nat(0);
        dt.rows.push_back(r3);
        return dt;
    }());
    Functional w = Functional::more_is_more(base, Nat(4));
    // Enumerate fact sets over positions {0,1} with answers in {0,1},
    // delay 0: 3^2 = 9 oracles (each position absent/0/1).
    auto make = [](int s0, int s1) {
        std::map<Nat, Fact> facts;
        if (s0) facts[Nat(0)] = Fact{s0 == 2, 0};
        if (s1) facts[Nat(1)] = Fact{s1 == 2, 0};
        return PartialOracle::from_facts(std::move(facts));
    };
    for (int a0 = 0; a0 < 3; ++a0)
        for (int a1 = 0; a1 < 3; ++a1) {
            auto small = w.run(make(a0, a1), 0, 2000).output;
            if (!small) continue;
            for (int b0 = 0; b0 < 3; ++b0)
                for (int b1 = 0; b1 < 3; ++b1) {
                    bool superset = (a0 == 0 || b0 == a0) && (a1 == 0 || b1 == a1);
                    if (!superset) continue;
                    auto big = w.run(make(b0, b1), 0, 2000).output;
                    REQUIRE(big.has_value());
                    CHECK(*big == *small);
                }
        }
}

TEST_CASE("domain_profile counts halting inputs") {
    DensityProfile p = domain_profile(Functional::parity(), PartialOracle::empty(), 20, 100);
    CHECK(p.count(20) == 20); // parity is total
    DensityProfile q = domain_profile(Functional::only_ones(Functional::parity()),
                                      PartialOracle::empty(), 20, 100);
    CHECK(q.count(20) == 10); // halts on odds only
}
