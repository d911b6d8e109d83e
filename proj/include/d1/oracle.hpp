#pragma once

#include "d1/bitstream.hpp"
#include "d1/rational.hpp"
#include "d1/tree.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace d1 {

class Functional;

struct Fact {
    bool answer = false;
    Nat delay; // fuel units before the answer becomes visible
};

// Immutable set of <position, answer, delay> facts with fuel-bounded query
// semantics: query(n, fuel) answers x iff some fact <n, x, l> has
// l <= fuel. Never answers incorrectly about its base stream; divergence
// is "no answer at this fuel", never an error value.
class PartialOracle {
public:
    static PartialOracle empty();
    static PartialOracle from_facts(std::map<Nat, Fact> facts);
    // Full oracle of a stream: every position answered after `delay`.
    static PartialOracle full(Bitstream base, Nat delay = 0);
    // Answers only where mask(n) = 1.
    static PartialOracle masked(Bitstream base, Bitstream mask, Nat delay = 0);
    // Facts <n, x, l> where f halts on n in l fuel with value x, run
    // against `inner`.
    static PartialOracle from_functional(Functional f, PartialOracle inner);

    // Drops every 0-fact; the density-1 philosophy of keeping only "yes"
    // answers.
    PartialOracle without_zero_answers() const;
    // Removes the even (A-tilde carrying) positions of the given regions;
    // everything else still answered.
    PartialOracle punctured(std::vector<RemovedRegion> regions) const;
    // Overlays explicit facts on top of this oracle (facts win).
    PartialOracle with_facts(std::map<Nat, Fact> facts) const;

    std::optional<bool> query(const Nat& n, const Nat& fuel) const;

    // Finite facts visible at `fuel` among positions < horizon, in
    // position order. The enumeration view used by more-is-more wrapping.
    std::vector<std::pair<Nat, Fact>> visible_facts(const Nat& horizon, const Nat& fuel) const;

    struct Node;
    const Node& node() const { return *node_; }

private:
    explicit PartialOracle(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

struct TranscriptEntry {
    Nat pos;
    std::optional<bool> answer; // nullopt = timed out
};

// Full record of one evaluation: queries in issue order, the output or
// divergence, and fuel consumed.
struct Transcript {
    Nat input;
    std::vector<TranscriptEntry> queries;
    std::optional<bool> output;
    Nat fuel_used;

    std::string to_json() const;
};

struct TableRow {
    std::optional<Nat> input;                  // match a specific input, or any
    std::vector<std::pair<Nat, bool>> needs;   // observed facts required
    enum class Action { Output0, Output1, Query, GiveUp };
    Action action = Action::GiveUp;
    Nat query_pos;
};

struct DecisionTable {
    std::vector<TableRow> rows;

    std::string to_json() const;
    static DecisionTable from_json(const std::string& text);
};

// Deterministic oracle-consuming procedure with query logging and fuel:
// every action (table step, query issue, output) costs one fuel unit, and
// an answered query additionally costs its delay.
class Functional {
public:
    static Functional constant(bool value);
    static Functional diverge();
    // Queries its input position and outputs the answer.
    static Functional identity_copy();
    // Outputs n mod 2 without consulting the oracle.
    static Functional parity();
    // Outputs 1 iff the oracle answers (with any value) at `pos`.
    static Functional answered_at(Nat pos);
    // Outputs 1 iff positions 2n and 2n+1 both answer 1.
    static Functional both_halves();
    // phi(n) = 1 if n is in b_sub and the oracle answers 1 at n; the
    // caller asserts b_sub is a subset of the target.
    static Functional subset_reduction(Bitstream b_sub);
    // Searches fuel levels upward and outputs the first answer found.
    static Functional from_oracle(PartialOracle o);
    // Input m: searches for an answered position (2k+1)*2^m, dovetailing
    // probes with fuel, and outputs that answer.
    static Functional r_decoder();
    static Functional table(DecisionTable t);

    // Same transcripts, but outputs other than 1 become divergence.
    static Functional only_ones(Functional f);
    // Runs f on finite sub-oracles of the visible facts in canonical
    // order (by size, then lexicographically on <n, x, l>) and outputs
    // the first value found.
    static Functional more_is_more(Functional f, Nat fact_horizon);
    // Outer's queries are served by running inner on the ambient oracle.
    static Functional compose(Functional outer, Functional inner);

    Transcript run(const PartialOracle& o, const Nat& input, const Nat& fuel) const;

    struct Node;
    const Node& node() const { return *node_; }

private:
    friend class PartialOracle;
    explicit Functional(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

// Profile of {n < upto : f halts on n within fuel} against oracle o.
DensityProfile domain_profile(const Functional& f, const PartialOracle& o, std::size_t upto,
                              const Nat& fuel);

} // namespace d1
