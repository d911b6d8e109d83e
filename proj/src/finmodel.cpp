#include "d1/finmodel.hpp"

#include <algorithm>

namespace d1 {

namespace {

std::vector<FnPrefix> enumerate_prefixes(std::size_t prefix_len, std::size_t value_bound) {
    std::vector<FnPrefix> out;
    FnPrefix cur(prefix_len, 0);
    while (true) {
        out.push_back(cur);
        std::size_t i = prefix_len;
        while (i > 0) {
            --i;
            if (cur[i] + 1u < value_bound) {
                ++cur[i];
                std::fill(cur.begin() + static_cast<std::ptrdiff_t>(i) + 1, cur.end(), 0);
                break;
            }
            if (i == 0) return out;
        }
        if (prefix_len == 0) return out;
    }
}

} // namespace

void FiniteModel::set_dom(const FnPrefix& f, std::vector<std::uint8_t> inputs) {
    std::sort(inputs.begin(), inputs.end());
    inputs.erase(std::unique(inputs.begin(), inputs.end()), inputs.end());
    dom_[f] = std::move(inputs);
}

const std::vector<std::uint8_t>& FiniteModel::dom(const FnPrefix& f) const {
    static const std::vector<std::uint8_t> kEmpty;
    auto it = dom_.find(f);
    return it == dom_.end() ? kEmpty : it->second;
}

std::vector<FnPrefix> FiniteModel::all_prefixes() const {
    return enumerate_prefixes(prefix_len_, value_bound_);
}

bool FiniteModel::dominates(const FnPrefix& h, const FnPrefix& g) {
    if (h.size() != g.size()) return false;
    for (std::size_t i = 0; i < h.size(); ++i)
        if (h[i] < g[i]) return false;
    return true;
}

bool FiniteModel::satisfies_bigger_is_less() const {
    std::vector<FnPrefix> all = all_prefixes();
    for (const FnPrefix& g : all) {
        const auto& dg = dom(g);
        for (const FnPrefix& h : all) {
            if (!dominates(h, g)) continue;
            for (std::uint8_t n : dom(h))
                if (!std::binary_search(dg.begin(), dg.end(), n)) return false;
        }
    }
    return true;
}

bool FiniteModel::dom_avoids(const FnPrefix& f, const SparseSet& s) const {
    for (std::uint8_t n : dom(f))
        if (s.contains(Nat(n))) return false;
    return true;
}

std::optional<std::uint8_t> FiniteModel::min_first_value_avoiding(const SparseSet& s) const {
    std::optional<std::uint8_t> best;
    if (prefix_len_ == 0) return best;
    for (const FnPrefix& f : all_prefixes()) {
        if (!dom_avoids(f, s)) continue;
        if (!best || f[0] < *best) best = f[0];
    }
    return best;
}

CuttingOutcome cutting_check(const FiniteModel& phi, const SparseSet& s, const SparseSet& s0,
                             const SparseSet& s1) {
    CuttingOutcome out;
    auto n = phi.min_first_value_avoiding(s);
    if (!n) {
        out.vacuous = true;
        return out;
    }
    auto n0 = phi.min_first_value_avoiding(s0);
    auto n1 = phi.min_first_value_avoiding(s1);
    out.holds = (n0 && *n0 == *n) || (n1 && *n1 == *n);
    return out;
}

FiniteModel bigger_is_less_wrap(const FiniteModel& phi) {
    FiniteModel psi(phi.prefix_len(), phi.value_bound(), phi.input_bound());
    std::vector<FnPrefix> all = phi.all_prefixes();
    for (const FnPrefix& g : all) {
        std::vector<std::uint8_t> inputs;
        for (const FnPrefix& h : all) {
            if (!FiniteModel::dominates(h, g)) continue;
            for (std::uint8_t n : phi.dom(h)) inputs.push_back(n);
        }
        psi.set_dom(g, std::move(inputs));
    }
    return psi;
}

namespace {

// A bigger-is-less table decomposes per input: {f : n in dom(f)} must be
// closed downward under domination. Enumerating down-sets of the
// domination poset, models are exactly the input-indexed tuples of
// down-sets, which keeps the sweep exhaustive without filtering the full
// 2^(inputs * prefixes) table space.
std::vector<std::uint32_t> down_sets(const std::vector<FnPrefix>& prefixes) {
    const std::size_t p = prefixes.size();
    std::vector<std::uint32_t> above(p, 0); // above[i]: prefixes dominating i
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            if (FiniteModel::dominates(prefixes[j], prefixes[i])) above[i] |= 1u << j;
    std::vector<std::uint32_t> out;
    for (std::uint32_t mask = 0; mask < (1u << p); ++mask) {
        bool ok = true;
        for (std::size_t i = 0; i < p && ok; ++i) {
            if (!(mask & (1u << i))) continue;
            // i in dom for this input: everything below i must be too,
            // i.e. i must be in the set for every j it dominates.
            for (std::size_t j = 0; j < p; ++j)
                if ((above[j] & (1u << i)) && !(mask & (1u << j))) {
                    ok = false;
                    break;
                }
        }
        if (ok) out.push_back(mask);
    }
    return out;
}

} // namespace

SweepReport cutting_sweep(std::size_t max_prefix_len, std::size_t max_value_bound,
                          std::size_t max_set_size, std::size_t input_bound) {
    SweepReport rep;
    for (std::size_t p = 1; p <= max_prefix_len; ++p) {
        for (std::size_t v = 1; v <= max_value_bound; ++v) {
            std::vector<FnPrefix> prefixes = enumerate_prefixes(p, v);
            const std::size_t np = prefixes.size();
            std::vector<std::uint32_t> dsets = down_sets(prefixes);

            // maxidx[f0*np+f1] = index of the pointwise max of two prefixes.
            std::vector<std::size_t> maxidx(np * np);
            for (std::size_t f0 = 0; f0 < np; ++f0)
                for (std::size_t f1 = 0; f1 < np; ++f1) {
                    FnPrefix mx(p);
                    for (std::size_t i = 0; i < p; ++i)
                        mx[i] = std::max(prefixes[f0][i], prefixes[f1][i]);
                    maxidx[f0 * np + f1] = static_cast<std::size_t>(
                        std::lower_bound(prefixes.begin(), prefixes.end(), mx) - prefixes.begin());
                }

            // model[n] = down-set id for input n.
            std::vector<std::size_t> choice(input_bound, 0);
            while (true) {
                ++rep.models;
                // member_mask[f] = inputs halting on prefix f.
                std::vector<std::uint32_t> halt(np, 0);
                for (std::size_t n = 0; n < input_bound; ++n) {
                    std::uint32_t ds = dsets[choice[n]];
                    for (std::size_t f = 0; f < np; ++f)
                        if (ds & (1u << f)) halt[f] |= 1u << n;
                }

                auto min_first_avoiding = [&](std::uint32_t set_mask) -> int {
                    int best = -1;
                    for (std::size_t f = 0; f < np; ++f) {
                        if (halt[f] & set_mask) continue;
                        int v0 = prefixes[f][0];
                        if (best < 0 || v0 < best) best = v0;
                    }
                    return best;
                };
                auto avoiders = [&](std::uint32_t set_mask) {
                    std::vector<std::size_t> out;
                    for (std::size_t f = 0; f < np; ++f)
                        if (!(halt[f] & set_mask)) out.push_back(f);
                    return out;
                };

                // Every S subseteq inputs with |S| <= max_set_size, every
                // split S = S0 cup S1 (elements may land in both sides).
                for (std::uint32_t s = 0; s < (1u << input_bound); ++s) {
                    if (static_cast<std::size_t>(__builtin_popcount(s)) > max_set_size) continue;
                    int n = min_first_avoiding(s);
                    if (n < 0) continue; // no qualifying f: vacuous
                    bool counted = false;
                    std::vector<std::size_t> bits;
                    for (std::size_t b = 0; b < input_bound; ++b)
                        if (s & (1u << b)) bits.push_back(b);
                    const std::size_t k = bits.size();
                    std::vector<std::size_t> assign(k, 0); // 0: S0, 1: S1, 2: both
                    while (true) {
                        std::uint32_t s0 = 0, s1 = 0;
                        for (std::size_t b = 0; b < k; ++b) {
                            if (assign[b] != 1) s0 |= 1u << bits[b];
                            if (assign[b] != 0) s1 |= 1u << bits[b];
                        }
                        if (!counted) {
                            ++rep.with_qualifying_f;
                            counted = true;
                        }
                        int n0 = min_first_avoiding(s0);
                        int n1 = min_first_avoiding(s1);
                        if (n0 != n && n1 != n) ++rep.cutting_failures;
                        // Pointwise-max witness: f0 avoids S0, f1 avoids
                        // S1 implies max(f0,f1) avoids S.
                        for (std::size_t f0 : avoiders(s0))
                            for (std::size_t f1 : avoiders(s1))
                                if (halt[maxidx[f0 * np + f1]] & s) ++rep.max_witness_failures;
                        std::size_t b = 0;
                        for (; b < k; ++b) {
                            if (++assign[b] < 3) break;
                            assign[b] = 0;
                        }
                        if (b == k) break;
                    }
                }

                std::size_t i = 0;
                for (; i < input_bound; ++i) {
                    if (++choice[i] < dsets.size()) break;
                    choice[i] = 0;
                }
                if (i == input_bound) break;
            }
        }
    }
    return rep;
}

} // namespace d1
