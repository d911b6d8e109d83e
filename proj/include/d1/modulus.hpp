#pragma once

#include "d1/bitstream.hpp"
#include "d1/growth.hpp"
#include "d1/oracle.hpp"
#include "d1/rational.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace d1 {

// First n at which the oracle's witnessed 1-answers below n reach density
// 1 - 2^{-m}. Witnessing dovetails positions with fuel (level t consults
// positions < t at fuel t) and returns the first (t, n) hit in
// lexicographic order. For oracles whose 1-answers are a subset of
// slow_density(f)'s members, the result dominates f(m).
std::optional<Nat> recover_dominating(const PartialOracle& o, std::size_t m, const Nat& fuel);

struct ModulusResult {
    enum class Kind { Exact, PrefixApprox, Refused };
    Kind kind = Kind::Refused;
    Nat value;
    Nat valid_to;       // PrefixApprox only: horizon the scan covered
    std::string reason; // Refused only
};

// f(m) = smallest number with d(n) > 1 - 2^{-m} for all n > f(m).
// Exact only for streams with an analytic tail certificate (all, none,
// slow-density, sparse-complement, cofinite/finite); other descriptors
// get a prefix-valid approximation when allow_prefix is set, else are
// refused.
ModulusResult modulus_of(const Bitstream& s, std::size_t m, std::size_t scan_horizon,
                         bool allow_prefix = false);

// Rational-valued non-decreasing lower bound h with limit 1, in a closed
// descriptor family so CLI invocations stay reproducible.
class LowerBound {
public:
    static LowerBound one();                  // h(n) = 1
    static LowerBound harmonic();             // h(n) = 1 - 1/(n+1)
    static LowerBound dyadic();               // h(n) = 1 - 2^{-n}
    static LowerBound table(std::vector<Rat> values, Rat tail);

    Rat operator()(std::size_t n) const;

private:
    struct Impl;
    explicit LowerBound(std::shared_ptr<const Impl> i) : impl_(std::move(i)) {}
    std::shared_ptr<const Impl> impl_;
};

// g(m) = least n with h(n) > 1 - 2^{-m}; nullopt if no witness below the
// horizon.
std::optional<Nat> g_from_lower_bound(const LowerBound& h, std::size_t m, std::size_t horizon);

// sigma is in T_g iff for all n, m with n > g(m) and n <= |sigma|, the
// ones-density of sigma below n exceeds 1 - 2^{-m}. g is used in strictly
// increasing canonical form, which bounds both quantifiers.
bool tg_member(const GrowthFunction& g, const std::vector<std::uint8_t>& sigma);

enum class Consensus { Zero, One, NoConsensus };

// Bounded consensus search: enumerates candidate X0-prefixes of length
// <= x0_len, and for each one runs f on input n against the 1's-only
// immediate oracle of X0 intersected with every height-`height` word
// surviving in T_g. Returns the common answer when some X0 makes every
// surviving word halt with one value; otherwise NoConsensus (never a
// guessed bit).
Consensus consensus_decode(const GrowthFunction& g, const Functional& f, const Nat& n,
                           std::size_t height, std::size_t x0_len, const Nat& fuel);

} // namespace d1
