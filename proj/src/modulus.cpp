#include "d1/modulus.hpp"

#include <algorithm>

namespace d1 {

namespace {

// Min segment tree with lazy suffix adds over v(n) = M*(n - ones(n)) - n,
// n in [1, size]. The witness condition ones(n)/n >= 1 - 2^{-m} is exactly
// v(n) <= 0, and a position turning into an answered 1 subtracts M from
// every v(n) with n past it.
class WitnessTree {
public:
    WitnessTree(std::size_t size, std::int64_t mult) : size_(size), mult_(mult) {
        min_.assign(4 * size_, 0);
        lazy_.assign(4 * size_, 0);
        build(1, 1, size_);
    }

    void one_answered(std::uint64_t pos) { add(1, 1, size_, pos + 1, size_, -mult_); }

    // Leftmost n in [1, hi] with v(n) <= 0, or 0.
    std::uint64_t first_hit(std::uint64_t hi) const { return find(1, 1, size_, hi); }

private:
    void build(std::size_t node, std::uint64_t lo, std::uint64_t hi) {
        if (lo == hi) {
            min_[node] = (mult_ - 1) * static_cast<std::int64_t>(lo);
            return;
        }
        std::uint64_t mid = lo + (hi - lo) / 2;
        build(2 * node, lo, mid);
        build(2 * node + 1, mid + 1, hi);
        min_[node] = std::min(min_[2 * node], min_[2 * node + 1]);
    }

    void push(std::size_t node) const {
        if (lazy_[node] == 0) return;
        for (std::size_t c : {2 * node, 2 * node + 1}) {
            lazy_[c] += lazy_[node];
            min_[c] += lazy_[node];
        }
        lazy_[node] = 0;
    }

    void add(std::size_t node, std::uint64_t lo, std::uint64_t hi, std::uint64_t from,
             std::uint64_t to, std::int64_t delta) {
        if (to < lo || hi < from) return;
        if (from <= lo && hi <= to) {
            min_[node] += delta;
            lazy_[node] += delta;
            return;
        }
        push(node);
        std::uint64_t mid = lo + (hi - lo) / 2;
        add(2 * node, lo, mid, from, to, delta);
        add(2 * node + 1, mid + 1, hi, from, to, delta);
        min_[node] = std::min(min_[2 * node], min_[2 * node + 1]);
    }

    std::uint64_t find(std::size_t node, std::uint64_t lo, std::uint64_t hi,
                       std::uint64_t cap) const {
        if (lo > cap || min_[node] > 0) return 0;
        if (lo == hi) return lo;
        push(node);
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (std::uint64_t left = find(2 * node, lo, mid, cap)) return left;
        return find(2 * node + 1, mid + 1, hi, cap);
    }

    std::size_t size_;
    std::int64_t mult_;
    mutable std::vector<std::int64_t> min_;
    mutable std::vector<std::int64_t> lazy_;
};

} // namespace

std::optional<Nat> recover_dominating(const PartialOracle& o, std::size_t m, const Nat& fuel) {
    // First (t, n) in lexicographic order with
    // #{answered 1 below n at fuel t} / n >= 1 - 2^{-m}. Answers are
    // monotone in fuel, so only still-unanswered positions get re-queried.
    const std::uint64_t cap =
        static_cast<std::uint64_t>(std::min(fuel, Nat(UINT64_C(1'048'576))));
    // For m past the cap's bit width the condition degenerates to
    // "all answered 1", which any multiplier > cap + 1 encodes.
    const std::int64_t mult =
        m >= 40 ? (std::int64_t(1) << 40) : (std::int64_t(1) << m);
    WitnessTree tree(cap + 1, mult);
    std::vector<std::uint64_t> pending; // positions still unanswered
    for (std::uint64_t t = 0; t <= cap; ++t) {
        // New position t enters the pool at level t.
        pending.push_back(t);
        std::vector<std::uint64_t> still;
        for (std::uint64_t p : pending) {
            auto a = o.query(Nat(p), Nat(t));
            if (a) {
                if (*a) tree.one_answered(p);
            } else {
                still.push_back(p);
            }
        }
        pending.swap(still);
        if (std::uint64_t n = tree.first_hit(t + 1)) return Nat(n);
    }
    return std::nullopt;
}

struct LowerBound::Impl {
    enum class Kind { One, Harmonic, Dyadic, Table };
    Kind kind;
    std::vector<Rat> values;
    Rat tail;
};

LowerBound LowerBound::one() {
    auto i = std::make_shared<Impl>();
    i->kind = Impl::Kind::One;
    return LowerBound(std::move(i));
}

LowerBound LowerBound::harmonic() {
    auto i = std::make_shared<Impl>();
    i->kind = Impl::Kind::Harmonic;
    return LowerBound(std::move(i));
}

LowerBound LowerBound::dyadic() {
    auto i = std::make_shared<Impl>();
    i->kind = Impl::Kind::Dyadic;
    return LowerBound(std::move(i));
}

LowerBound LowerBound::table(std::vector<Rat> values, Rat tail) {
    auto i = std::make_shared<Impl>();
    i->kind = Impl::Kind::Table;
    i->values = std::move(values);
    i->tail = std::move(tail);
    // Non-decreasing with limit <= 1 is the caller's contract; the checkable
    // part is enforced here.
    for (std::size_t n = 1; n < i->values.size(); ++n)
        if (i->values[n] < i->values[n - 1])
            throw domain_error("lower bound table must be non-decreasing");
    if (!i->values.empty() && i->tail < i->values.back())
        throw domain_error("lower bound tail must dominate the table");
    return LowerBound(std::move(i));
}

Rat LowerBound::operator()(std::size_t n) const {
    switch (impl_->kind) {
        case Impl::Kind::One: return Rat(1);
        case Impl::Kind::Harmonic: return Rat(n, n + 1); // 1 - 1/(n+1)
        case Impl::Kind::Dyadic: return one_minus_pow2_inv(n);
        case Impl::Kind::Table:
            return n < impl_->values.size() ? impl_->values[n] : impl_->tail;
    }
    throw domain_error("lower bound: corrupt descriptor");
}

std::optional<Nat> g_from_lower_bound(const LowerBound& h, std::size_t m, std::size_t horizon) {
    Rat threshold = one_minus_pow2_inv(m);
    for (std::size_t n = 0; n <= horizon; ++n)
        if (h(n) > threshold) return Nat(n);
    return std::nullopt;
}

bool tg_member(const GrowthFunction& g, const std::vector<std::uint8_t>& sigma) {
    // sigma in T_g iff for all n <= |sigma| and m with n > g~(m):
    // ones(n)/n > 1 - 2^{-m}, i.e. 2^m * zeros(n) < n.
    StrictGrowth gs(g);
    std::uint64_t ones = 0;
    for (std::size_t n1 = 1; n1 <= sigma.size(); ++n1) {
        if (sigma[n1 - 1]) ++ones;
        const std::uint64_t n = n1;
        const std::uint64_t zeros = n - ones;
        for (std::size_t m = 0; gs(m) < n; ++m) {
            if (zeros == 0) break; // condition holds for every m
            if (m >= 64 || ((unsigned __int128)1 << m) * zeros >= n) return false;
        }
    }
    return true;
}

Consensus consensus_decode(const GrowthFunction& g, const Functional& f, const Nat& n,
                           std::size_t height, std::size_t x0_len, const Nat& fuel) {
    if (height > 24 || x0_len > 24)
        throw domain_error("consensus_decode: bounds too large for exhaustive search");
    // Words of T_g at exactly the height bound.
    std::vector<std::vector<std::uint8_t>> surviving;
    for (std::uint64_t bitsv = 0; bitsv < (std::uint64_t(1) << height); ++bitsv) {
        std::vector<std::uint8_t> sigma(height);
        for (std::size_t i = 0; i < height; ++i) sigma[i] = (bitsv >> i) & 1;
        if (tg_member(g, sigma)) surviving.push_back(std::move(sigma));
    }
    if (surviving.empty()) return Consensus::NoConsensus;

    // X0-prefixes by length, then lexicographically.
    for (std::size_t len = 0; len <= x0_len; ++len) {
        for (std::uint64_t xv = 0; xv < (std::uint64_t(1) << len); ++xv) {
            std::optional<bool> common;
            bool ok = true;
            for (const auto& sigma : surviving) {
                // Y = X0 cap sigma, served as a 1's-only immediate oracle.
                std::map<Nat, Fact> facts;
                for (std::size_t i = 0; i < std::min(len, sigma.size()); ++i)
                    if (((xv >> (len - 1 - i)) & 1) && sigma[i]) facts[Nat(i)] = Fact{true, 0};
                Transcript t = f.run(PartialOracle::from_facts(std::move(facts)), n, fuel);
                if (!t.output || (common && *common != *t.output)) {
                    ok = false;
                    break;
                }
                common = t.output;
            }
            if (ok && common) return *common ? Consensus::One : Consensus::Zero;
        }
    }
    return Consensus::NoConsensus;
}

} // namespace d1
