#include "d1/rembed.hpp"

namespace d1 {

std::optional<bool> decode_r_bit(const PartialOracle& o, std::size_t m, const Nat& fuel) {
    // Dovetail probes with fuel: level t consults positions (2k+1)*2^m for
    // k = 0..t at fuel t; the total probe count is bounded by the fuel so
    // an unanswered search stays linear in the budget.
    const Nat p2m = pow2(m);
    Nat probes = 0;
    for (Nat t = 0; probes < fuel; ++t) {
        for (Nat k = 0; k <= t && probes < fuel; ++k, ++probes) {
            Nat pos = (2 * k + 1) * p2m;
            auto a = o.query(pos, t);
            if (!a) continue;
            // Sound oracles cannot disagree across the progression; check
            // the other probes at the deciding level anyway.
            for (Nat k2 = 0; k2 <= t; ++k2) {
                auto b = o.query((2 * k2 + 1) * p2m, t);
                if (b && *b != *a)
                    throw domain_error("decode_r_bit: oracle answers disagree on one progression");
            }
            return *a;
        }
    }
    return std::nullopt;
}

std::vector<std::optional<bool>> decode_r_prefix(const PartialOracle& o, std::size_t count,
                                                 const Nat& fuel) {
    std::vector<std::optional<bool>> out;
    out.reserve(count);
    for (std::size_t m = 0; m < count; ++m) out.push_back(decode_r_bit(o, m, fuel));
    return out;
}

} // namespace d1
