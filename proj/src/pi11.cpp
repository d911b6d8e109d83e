#include "d1/pi11.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace d1 {

namespace {

// How many positions of a coded region the decoder samples before giving
// up. Full and punctured oracles answer (or refuse) the first probe;
// sparser oracles may need a few more. Capped so that astronomically wide
// regions stay cheap.
constexpr std::uint64_t kRegionProbeCap = 64;

// Probe A-positions 2p for p in the region; first answer wins.
std::optional<bool> probe_region(const PartialOracle& o, const Region& reg, const Nat& fuel) {
    Nat p = reg.first();
    const Nat last = reg.last();
    for (std::uint64_t i = 0; i < kRegionProbeCap && p <= last; ++i, ++p) {
        auto a = o.query(p * 2, fuel);
        if (a) return a;
    }
    return std::nullopt;
}

// Probe whether any sampled position of the region carries a 1.
bool probe_region_for_one(const PartialOracle& o, const Region& reg, const Nat& fuel) {
    Nat p = reg.first();
    const Nat last = reg.last();
    for (std::uint64_t i = 0; i < kRegionProbeCap && p <= last; ++i, ++p) {
        auto a = o.query(p * 2, fuel);
        if (a && *a) return true;
    }
    return false;
}

} // namespace

Bitstream build_b(std::shared_ptr<const CodedTree> t) { return Bitstream::pi11_b(std::move(t)); }
Bitstream build_a(std::shared_ptr<const CodedTree> t) { return Bitstream::pi11_a(std::move(t)); }

DeterminedBits::DeterminedBits(const PartialOracle& o, std::shared_ptr<const CodedTree> t,
                               const Nat& fuel)
    : tree_(std::move(t)), known_(tree_->node_count()) {
    const CodedTree& tr = *tree_;
    // Inductive closure: direct reads first, then deductions whose m+1
    // predecessor bits are all determined. Because determined bits are
    // true on sound oracles, the assumption vector used is the true one,
    // which is exactly what makes a positive deduction sound.
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t idx = 0; idx < tr.node_count(); ++idx) {
            if (known_[idx]) continue;
            // Direct read from the value region.
            if (auto v = probe_region(o, tr.value_region(idx), fuel)) {
                known_[idx] = *v;
                changed = true;
                continue;
            }
            // Deductions.
            const std::size_t len = tr.node(idx).size();
            for (std::size_t m = 0; m < len && !known_[idx]; ++m) {
                bool all_known = true;
                std::uint32_t tau = 0;
                for (std::size_t i = 0; i <= m; ++i) {
                    Word pred(tr.node(idx).begin(),
                              tr.node(idx).end() - static_cast<std::ptrdiff_t>(i) - 1);
                    auto bit = known_[tr.index_of(pred)];
                    if (!bit) {
                        all_known = false;
                        break;
                    }
                    if (*bit) tau |= 1u << i;
                }
                if (!all_known) continue;
                const std::size_t eff = len - m - 1;
                for (int j = 0; j <= 1 && !known_[idx]; ++j) {
                    for (std::size_t k = 0; k < CodedTree::kDedChoices; ++k) {
                        std::size_t blk = tr.alloc_ded(idx, m, tau, j != 0, k);
                        Region reg{blk, pow2(blk - eff)};
                        if (probe_region_for_one(o, reg, fuel)) {
                            known_[idx] = (j != 0);
                            changed = true;
                            break;
                        }
                    }
                }
            }
        }
    }
}

std::optional<bool> DeterminedBits::value(const Word& sigma) const {
    return known_[tree_->index_of(sigma)];
}

std::optional<bool> can_determine(const PartialOracle& o, std::shared_ptr<const CodedTree> t,
                                  const Word& sigma, const Nat& fuel) {
    return DeterminedBits(o, std::move(t), fuel).value(sigma);
}

std::optional<bool> decode_b_bit(const PartialOracle& o, const DeterminedBits& bits,
                                 std::shared_ptr<const CodedTree> t, const Nat& n,
                                 const Nat& fuel) {
    if (n < 1) return false;
    auto node = t->node_of_b_block(log2_floor(n));
    if (!node) return false; // unallocated block codes no bit
    // Membership consult through the R-coded odd positions of A: the
    // node's numbering index s is a member of char(T) iff positions
    // 2*((2k+1)*2^s) + 1 carry a 1.
    const Nat p2s = pow2(*node);
    std::optional<bool> member;
    for (std::uint64_t k = 0; k < kRegionProbeCap; ++k) {
        Nat pos = 2 * ((2 * Nat(k) + 1) * p2s) + 1;
        if (auto a = o.query(pos, fuel)) {
            member = *a;
            break;
        }
    }
    if (!member) return std::nullopt;
    if (!*member) return false; // sigma not in T: b_sigma = 0
    return bits.value(*node);
}

std::optional<bool> decode_b_bit(const PartialOracle& o, std::shared_ptr<const CodedTree> t,
                                 const Nat& n, const Nat& fuel) {
    DeterminedBits bits(o, t, fuel);
    return decode_b_bit(o, bits, std::move(t), n, fuel);
}

PartialOracle puncture(std::shared_ptr<const CodedTree> t, const PunctureSpec& spec,
                       Nat delay) {
    std::vector<RemovedRegion> removed = puncture_regions(*t, spec);
    return PartialOracle::full(Bitstream::pi11_a(t), std::move(delay))
        .punctured(std::move(removed));
}

namespace {

// Removed A-coordinate description of one region: the even positions 2p,
// p in [first, last].
struct Interval {
    Nat first; // in A-tilde coordinates
    Nat last;
    Nat count() const { return last - first + 1; }
};

// Number of removed A-positions < n.
Nat removed_below(const std::vector<Interval>& ivs, const Nat& n) {
    // Removed positions are 2p for p in each interval, so 2p < n means
    // p < ceil(n / 2).
    Nat half = (n + 1) / 2;
    Nat total = 0;
    for (const Interval& iv : ivs) {
        if (half <= iv.first) continue;
        Nat hi = std::min(half, Nat(iv.last + 1));
        total += hi - iv.first;
    }
    return total;
}

} // namespace

PunctureCertificate certify_puncture(const CodedTree& t, const PunctureSpec& spec,
                                     std::size_t max_m) {
    PunctureCertificate cert;
    std::vector<RemovedRegion> removed = puncture_regions(t, spec);

    std::set<std::size_t> seen_lengths;
    std::vector<Interval> ivs;
    for (const RemovedRegion& r : removed) {
        RegionReport rep;
        rep.block = r.region.block;
        rep.node = r.node;
        rep.effective_len = r.effective_len;
        rep.is_value_region = r.is_value_region;
        // The region is the last size = 2^{i - eff} elements of a block of
        // 2^i positions, so the answered share of the block is 1 - 2^{-eff}.
        Nat blk = pow2(r.region.block);
        rep.block_local_density = Rat(blk - r.region.size, blk);
        std::size_t sigma_len = t.node(r.node).size();
        rep.dips_below_bound = rep.block_local_density < Rat(1) - Rat(1, pow2(sigma_len + 1));
        cert.regions.push_back(std::move(rep));
        if (!seen_lengths.insert(r.effective_len).second) cert.one_region_per_length = false;
        ivs.push_back(Interval{r.region.first(), r.region.last()});
    }
    std::sort(ivs.begin(), ivs.end(),
              [](const Interval& a, const Interval& b) { return a.first < b.first; });
    Nat total_removed = 0;
    for (const Interval& iv : ivs) total_removed += iv.count();

    for (std::size_t m = 0; m <= max_m; ++m) {
        ThresholdReport rep;
        rep.m = m;
        // d(n) < 1 - 2^{-m}  <=>  2^m * removed(n) > n. Inside a removed
        // interval the inequality only gets truer towards the interval's
        // end; in a gap the removed count is constant, so the largest
        // qualifying n is min(gap end, 2^m * count - 1). Checking interval
        // ends plus gap caps therefore finds the global last crossing.
        Nat p2m = pow2(m);
        std::optional<Nat> last;
        auto consider = [&](const Nat& n) {
            if (n < 1) return;
            if (p2m * removed_below(ivs, n) > n && (!last || n > *last)) last = n;
        };
        for (std::size_t i = 0; i < ivs.size(); ++i) {
            consider(ivs[i].last * 2 + 1); // just past the interval's last removed position
            // Gap after interval i: removed count frozen at its prefix sum.
            Nat count = 0;
            for (std::size_t j = 0; j <= i; ++j) count += ivs[j].count();
            Nat cap = p2m * count; // condition needs n < 2^m * count
            if (cap >= 1) {
                Nat candidate = cap - 1;
                if (i + 1 < ivs.size()) candidate = std::min(candidate, Nat(ivs[i + 1].first * 2));
                consider(candidate);
            }
        }
        rep.last_crossing = last;

        // Recovery: past the end of P_{J+1}, where J is the largest block
        // holding a region with removed fraction >= 2^{-m}, the density
        // stays at or above 1 - 2^{-(m-1)}. Local minima of the tail
        // density sit at interval ends, so those are the only checks.
        if (m == 0) {
            rep.recovered_by_next_block = true; // threshold 1 - 2^{-(-1)} < 0
        } else {
            std::optional<std::size_t> J;
            for (const RemovedRegion& r : removed)
                if (r.effective_len <= m && (!J || r.region.block > *J)) J = r.region.block;
            if (!J) {
                rep.recovered_by_next_block = true;
            } else {
                Nat n0 = pow2(*J + 3); // first A-position past P_{J+1}'s evens
                bool ok = p2m / 2 * removed_below(ivs, n0) <= n0;
                for (const Interval& iv : ivs) {
                    Nat n = iv.last * 2 + 2;
                    if (n < n0) continue;
                    if (p2m / 2 * removed_below(ivs, n) > n) ok = false;
                }
                rep.recovered_by_next_block = ok;
            }
        }
        cert.thresholds.push_back(std::move(rep));
    }
    return cert;
}

std::string PunctureCertificate::to_json() const {
    nlohmann::json j;
    j["schema"] = "puncture-certificate/1";
    nlohmann::json regs = nlohmann::json::array();
    for (const RegionReport& r : regions) {
        regs.push_back({{"block", r.block},
                        {"node", r.node},
                        {"effective_len", r.effective_len},
                        {"is_value_region", r.is_value_region},
                        {"block_local_density",
                         {{"num", numerator(r.block_local_density).str()},
                          {"den", denominator(r.block_local_density).str()}}},
                        {"dips_below_bound", r.dips_below_bound}});
    }
    j["regions"] = regs;
    nlohmann::json ths = nlohmann::json::array();
    for (const ThresholdReport& r : thresholds) {
        nlohmann::json e;
        e["m"] = r.m;
        if (r.last_crossing) e["last_crossing"] = r.last_crossing->str();
        else e["last_crossing"] = nullptr;
        e["recovered_by_next_block"] = r.recovered_by_next_block;
        ths.push_back(e);
    }
    j["thresholds"] = ths;
    j["one_region_per_length"] = one_region_per_length;
    return j.dump(2) + "\n";
}

std::vector<ThresholdReport> domain_crossings(const PartialOracle& o, std::size_t upto,
                                              const Nat& fuel, std::size_t max_m) {
    std::vector<std::uint8_t> bits(upto, 0);
    for (std::size_t n = 0; n < upto; ++n)
        bits[n] = o.query(Nat(n), fuel).has_value() ? 1 : 0;
    DensityProfile prof = DensityProfile::of_bits(bits, upto);
    std::vector<ThresholdReport> out;
    for (std::size_t m = 0; m <= max_m; ++m) {
        ThresholdReport rep;
        rep.m = m;
        auto cross = prof.last_crossing(one_minus_pow2_inv(m));
        if (cross) rep.last_crossing = Nat(*cross);
        if (m >= 1 && cross && *cross < upto)
            rep.recovered_by_next_block =
                prof.running_min_from(*cross + 1) >= Rat(1) - Rat(1, pow2(m - 1));
        out.push_back(std::move(rep));
    }
    return out;
}

} // namespace d1
