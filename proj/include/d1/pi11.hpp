#pragma once

#include "d1/bitstream.hpp"
#include "d1/oracle.hpp"
#include "d1/rational.hpp"
#include "d1/tree.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace d1 {

// Streams of the Part-1 coding machine.
Bitstream build_b(std::shared_ptr<const CodedTree> t);
Bitstream build_a(std::shared_ptr<const CodedTree> t);

// "The oracle can determine b_sigma": either a direct read from the value
// region, or a deduction from m+1 already-determined predecessor bits
// through an answer region. Computed as an inductive closure over the
// whole tree; sound oracles never produce a wrong bit, only unknowns.
class DeterminedBits {
public:
    DeterminedBits(const PartialOracle& o, std::shared_ptr<const CodedTree> t, const Nat& fuel);

    std::optional<bool> value(std::size_t node_idx) const { return known_[node_idx]; }
    std::optional<bool> value(const Word& sigma) const;

private:
    std::shared_ptr<const CodedTree> tree_;
    std::vector<std::optional<bool>> known_;
};

std::optional<bool> can_determine(const PartialOracle& o, std::shared_ptr<const CodedTree> t,
                                  const Word& sigma, const Nat& fuel);

// Block lookup, tree-membership consult through the R-coded odd positions
// of A, then can_determine. nullopt = unknown.
std::optional<bool> decode_b_bit(const PartialOracle& o, std::shared_ptr<const CodedTree> t,
                                 const Nat& n, const Nat& fuel);

// Same, with the inductive closure shared across calls.
std::optional<bool> decode_b_bit(const PartialOracle& o, const DeterminedBits& bits,
                                 std::shared_ptr<const CodedTree> t, const Nat& n,
                                 const Nat& fuel);

// Full oracle of A minus the spec's removed regions.
PartialOracle puncture(std::shared_ptr<const CodedTree> t, const PunctureSpec& spec,
                       Nat delay = 0);

struct RegionReport {
    std::size_t block = 0;
    std::size_t node = 0;
    std::size_t effective_len = 0;
    bool is_value_region = false;
    // Density of the answered A-tilde positions within the region's block.
    Rat block_local_density;
    bool dips_below_bound = false; // below 1 - 2^{-|sigma|-1}
};

struct ThresholdReport {
    std::size_t m = 0;
    std::optional<Nat> last_crossing;   // last n with dom-density < 1 - 2^{-m}
    bool recovered_by_next_block = true; // >= 1 - 2^{-(m-1)} past P_{j+1} of the last
                                         // region with fraction >= 2^{-m}
};

struct PunctureCertificate {
    std::vector<RegionReport> regions;
    std::vector<ThresholdReport> thresholds;
    bool one_region_per_length = true;

    std::string to_json() const;
};

// Exact density arithmetic over the removed regions: the domain of the
// punctured oracle is the complement of finitely many even-coordinate
// intervals, so prefix densities, last crossings, and recovery points are
// all computable in closed form.
PunctureCertificate certify_puncture(const CodedTree& t, const PunctureSpec& spec,
                                     std::size_t max_m);

// Scanning fallback for arbitrary oracles: last crossings of the domain
// profile up to `upto` for thresholds 1 - 2^{-m}, m <= max_m.
std::vector<ThresholdReport> domain_crossings(const PartialOracle& o, std::size_t upto,
                                              const Nat& fuel, std::size_t max_m);

} // namespace d1
