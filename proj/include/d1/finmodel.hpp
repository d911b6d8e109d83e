#pragma once

#include "d1/rational.hpp"
#include "d1/sparse.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace d1 {

// Finite-model semantics for function-oracle functionals: a "function" is
// a total map {0..prefix_len-1} -> {0..value_bound-1}, domination is
// pointwise on the prefix, and a functional is a table assigning each
// prefix the finite set of inputs on which it halts (outputting 1).
// This is the smallest universe in which the cutting lemma is decidable.
using FnPrefix = std::vector<std::uint8_t>;

class FiniteModel {
public:
    FiniteModel(std::size_t prefix_len, std::size_t value_bound, std::size_t input_bound)
        : prefix_len_(prefix_len), value_bound_(value_bound), input_bound_(input_bound) {}

    std::size_t prefix_len() const { return prefix_len_; }
    std::size_t value_bound() const { return value_bound_; }
    std::size_t input_bound() const { return input_bound_; }

    void set_dom(const FnPrefix& f, std::vector<std::uint8_t> inputs);
    const std::vector<std::uint8_t>& dom(const FnPrefix& f) const;

    // All value_bound^prefix_len prefixes in lexicographic order.
    std::vector<FnPrefix> all_prefixes() const;

    static bool dominates(const FnPrefix& h, const FnPrefix& g);

    // h >> g implies dom(h) subseteq dom(g).
    bool satisfies_bigger_is_less() const;

    bool dom_avoids(const FnPrefix& f, const SparseSet& s) const;

    // Minimal f(0) over prefixes whose halting set misses s; nullopt when
    // no prefix qualifies.
    std::optional<std::uint8_t> min_first_value_avoiding(const SparseSet& s) const;

private:
    std::size_t prefix_len_;
    std::size_t value_bound_;
    std::size_t input_bound_;
    std::map<FnPrefix, std::vector<std::uint8_t>> dom_;
};

struct CuttingOutcome {
    bool holds = true;
    bool vacuous = false; // no qualifying f for S
};

// Lemma statement on one model: with n, n0, n1 the minimal first values
// avoiding S, S0, S1, either n0 = n or n1 = n.
CuttingOutcome cutting_check(const FiniteModel& phi, const SparseSet& s,
                             const SparseSet& s0, const SparseSet& s1);

// psi^g(n) = 1 iff some h >> g (values < value_bound) has phi^h(n) = 1.
// The result is bigger-is-less by construction.
FiniteModel bigger_is_less_wrap(const FiniteModel& phi);

struct SweepReport {
    std::uint64_t models = 0;
    std::uint64_t with_qualifying_f = 0;
    std::uint64_t cutting_failures = 0;
    std::uint64_t max_witness_failures = 0;
};

// Exhaustive sweep over every bigger-is-less table with prefixes of length
// <= max_prefix_len, values <= max_value_bound, and every split of every
// S with |S| <= max_set_size drawn from {0..input_bound-1}. Checks the
// cutting property and the pointwise-max witness in each model.
SweepReport cutting_sweep(std::size_t max_prefix_len, std::size_t max_value_bound,
                          std::size_t max_set_size, std::size_t input_bound);

} // namespace d1
