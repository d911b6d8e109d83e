#include "d1/bitstream.hpp"
#include "d1/modulus.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <mutex>
#include <sstream>

namespace d1 {

namespace {

std::string growth_to_expr(const GrowthFunction& g) {
    struct V {
        std::string operator()(const GrowthFunction::Poly& p) const {
            std::string out = "poly(";
            for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
                if (i) out += ",";
                out += p.coeffs[i].str();
            }
            return out + ")";
        }
        std::string operator()(const GrowthFunction::Exp2&) const { return "exp2"; }
        std::string operator()(const GrowthFunction::Table& t) const {
            std::string out = "table{";
            for (std::size_t i = 0; i < t.values.size(); ++i) {
                if (i) out += ",";
                out += t.values[i].str();
            }
            return out + ";" + t.default_tail.str() + "}";
        }
        std::string operator()(const GrowthFunction::Max& m) const {
            return "max(" + growth_to_expr(*m.lhs) + "," + growth_to_expr(*m.rhs) + ")";
        }
    };
    return std::visit(V{}, g.descriptor());
}

// Greedy admission state for a slow-density stream, extended on demand.
struct SlowDensityCache {
    std::mutex mu;
    std::vector<std::uint8_t> bits;
    std::uint64_t ones = 0;
    std::size_t m = 0; // current least m with f~(m) > n+1

    void extend(const StrictGrowth& f, std::size_t count) {
        std::lock_guard<std::mutex> lock(mu);
        while (bits.size() < count) {
            const std::uint64_t n = bits.size();
            while (f(m) <= n + 1) ++m;
            // Admit n iff (ones+1)/(n+1) stays strictly below 1 - 2^{-m},
            // i.e. 2^m * (n - ones) > n + 1. Strict rejection at equality
            // keeps the defining constraint d(n) < 1 - 2^{-m} for n < f(m).
            bool admit = false;
            if (n > ones) {
                if (m >= 64) {
                    admit = true; // 2^m alone exceeds n + 1 at desk scale
                } else {
                    using u128 = unsigned __int128;
                    admit = (u128(1) << m) * (n - ones) > u128(n) + 1;
                }
            }
            bits.push_back(admit ? 1 : 0);
            if (admit) ++ones;
        }
    }
};

} // namespace

struct Bitstream::Node {
    enum class Kind {
        All, None, Evens, Odds, Finite, Cofinite, Periodic, Complement, Union, Inter, Join,
        REmbed, Obs15, SlowDensity, SparseCompl, Pi11A, Pi11B
    };
    Kind kind;
    std::set<Nat> members;                 // Finite / Cofinite
    std::vector<std::uint8_t> word;        // Periodic
    std::shared_ptr<const Node> left, right;
    std::shared_ptr<StrictGrowth> growth;  // SlowDensity
    std::shared_ptr<SlowDensityCache> cache;
    SparseSet sparse;                      // SparseCompl
    std::shared_ptr<const CodedTree> tree; // Pi11A / Pi11B
};

namespace {

using Node = Bitstream::Node;

bool eval(const Node& n, const Nat& idx);

bool eval(const Node& n, const Nat& idx) {
    using K = Node::Kind;
    switch (n.kind) {
        case K::All: return true;
        case K::None: return false;
        case K::Evens: return idx % 2 == 0;
        case K::Odds: return idx % 2 == 1;
        case K::Finite: return n.members.count(idx) != 0;
        case K::Cofinite: return n.members.count(idx) == 0;
        case K::Periodic:
            return n.word[static_cast<std::size_t>(idx % n.word.size())] != 0;
        case K::Complement: return !eval(*n.left, idx);
        case K::Union: return eval(*n.left, idx) || eval(*n.right, idx);
        case K::Inter: return eval(*n.left, idx) && eval(*n.right, idx);
        case K::Join:
            return idx % 2 == 0 ? eval(*n.left, idx / 2) : eval(*n.right, (idx - 1) / 2);
        case K::REmbed:
            if (idx < 1) return false;
            return eval(*n.left, Nat(pow2_valuation(idx)));
        case K::Obs15:
            if (idx < 1 || !is_power_of_2(idx)) return false;
            return eval(*n.left, Nat(log2_floor(idx)));
        case K::SlowDensity: {
            if (idx > 1u << 26) throw domain_error("slow-density stream: index too large");
            std::size_t i = static_cast<std::size_t>(idx);
            n.cache->extend(*n.growth, i + 1);
            return n.cache->bits[i] != 0;
        }
        case K::SparseCompl: return !n.sparse.contains(idx);
        case K::Pi11A: return n.tree->a_bit(idx);
        case K::Pi11B: return n.tree->b_bit(idx);
    }
    throw domain_error("bitstream: corrupt descriptor");
}

std::string expr_of(const Node& n) {
    using K = Node::Kind;
    auto nats = [](const std::set<Nat>& s) {
        std::string out;
        for (const Nat& m : s) {
            if (!out.empty()) out += ",";
            out += m.str();
        }
        return out;
    };
    switch (n.kind) {
        case K::All: return "all";
        case K::None: return "none";
        case K::Evens: return "evens";
        case K::Odds: return "odds";
        case K::Finite: return "set{" + nats(n.members) + "}";
        case K::Cofinite: return "cofinite{" + nats(n.members) + "}";
        case K::Periodic: {
            std::string out = "periodic(";
            for (std::uint8_t b : n.word) out += b ? '1' : '0';
            return out + ")";
        }
        case K::Complement: return "compl(" + expr_of(*n.left) + ")";
        case K::Union: return "union(" + expr_of(*n.left) + "," + expr_of(*n.right) + ")";
        case K::Inter: return "inter(" + expr_of(*n.left) + "," + expr_of(*n.right) + ")";
        case K::Join: return "join(" + expr_of(*n.left) + "," + expr_of(*n.right) + ")";
        case K::REmbed: return "r(" + expr_of(*n.left) + ")";
        case K::Obs15: return "obs15(" + expr_of(*n.left) + ")";
        case K::SlowDensity: return "slowdense(" + growth_to_expr(n.growth->base()) + ")";
        case K::SparseCompl: {
            std::string out;
            for (const Nat& m : n.sparse.members()) {
                if (!out.empty()) out += ",";
                out += m.str();
            }
            return "sparsecompl(set{" + out + "})";
        }
        // Trees live in JSON files, not in the expression language; the
        // printed form is informational only.
        case K::Pi11A: return "pi11a(#" + std::to_string(n.tree->node_count()) + ")";
        case K::Pi11B: return "pi11b(#" + std::to_string(n.tree->node_count()) + ")";
    }
    throw domain_error("bitstream: corrupt descriptor");
}

std::shared_ptr<Node> mk(Node::Kind k) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    return n;
}

} // namespace

Bitstream Bitstream::all() { return Bitstream(mk(Node::Kind::All)); }
Bitstream Bitstream::none() { return Bitstream(mk(Node::Kind::None)); }
Bitstream Bitstream::evens() { return Bitstream(mk(Node::Kind::Evens)); }
Bitstream Bitstream::odds() { return Bitstream(mk(Node::Kind::Odds)); }

Bitstream Bitstream::finite(std::set<Nat> members) {
    auto n = mk(Node::Kind::Finite);
    n->members = std::move(members);
    return Bitstream(std::move(n));
}

Bitstream Bitstream::cofinite(std::set<Nat> non_members) {
    auto n = mk(Node::Kind::Cofinite);
    n->members = std::move(non_members);
    return Bitstream(std::move(n));
}

Bitstream Bitstream::periodic(std::vector<std::uint8_t> word) {
    if (word.empty()) throw domain_error("periodic: word must be nonempty");
    auto n = mk(Node::Kind::Periodic);
    n->word = std::move(word);
    return Bitstream(std::move(n));
}

Bitstream Bitstream::complement(Bitstream s) {
    auto n = mk(Node::Kind::Complement);
    n->left = s.node_;
    return Bitstream(std::move(n));
}

Bitstream Bitstream::union_of(Bitstream a, Bitstream b) {
    auto n = mk(Node::Kind::Union);
    n->left = a.node_;
    n->right = b.node_;
    return Bitstream(std::move(n));
}

Bitstream Bitstream::intersect(Bitstream a, Bitstream b) {
    auto n = mk(Node::Kind::Inter);
    n->left = a.node_;
    n->right = b.node_;
    return Bitstream(std::move(n));
}

Bitstream Bitstream::join(Bitstream a, Bitstream b) {
    auto n = mk(Node::Kind::Join);
    n->left = a.node_;
    n->right = b.node_;
    return Bitstream(std::move(n));
}

Bitstream Bitstream::r_embed(Bitstream source) {
    auto n = mk(Node::Kind::REmbed);
    n->left = source.node_;
    return Bitstream(std::move(n));
}

Bitstream Bitstream::obs15(Bitstream source) {
    auto n = mk(Node::Kind::Obs15);
    n->left = source.node_;
    return Bitstream(std::move(n));
}

Bitstream Bitstream::slow_density(GrowthFunction f) {
    auto n = mk(Node::Kind::SlowDensity);
    n->growth = std::make_shared<StrictGrowth>(std::move(f));
    n->cache = std::make_shared<SlowDensityCache>();
    return Bitstream(std::move(n));
}

Bitstream Bitstream::sparse_complement(SparseSet s) {
    auto n = mk(Node::Kind::SparseCompl);
    n->sparse = std::move(s);
    return Bitstream(std::move(n));
}

Bitstream Bitstream::pi11_a(std::shared_ptr<const CodedTree> t) {
    if (!t) throw domain_error("pi11a: missing tree");
    auto n = mk(Node::Kind::Pi11A);
    n->tree = std::move(t);
    return Bitstream(std::move(n));
}

Bitstream Bitstream::pi11_b(std::shared_ptr<const CodedTree> t) {
    if (!t) throw domain_error("pi11b: missing tree");
    auto n = mk(Node::Kind::Pi11B);
    n->tree = std::move(t);
    return Bitstream(std::move(n));
}

bool Bitstream::bit(const Nat& n) const {
    if (n < 0) throw domain_error("bit: negative index");
    return eval(*node_, n);
}

std::vector<std::uint8_t> Bitstream::prefix(std::size_t count) const {
    std::vector<std::uint8_t> out;
    out.reserve(count);
    if (node_->kind == Node::Kind::SlowDensity) {
        node_->cache->extend(*node_->growth, count);
        out.assign(node_->cache->bits.begin(),
                   node_->cache->bits.begin() + static_cast<std::ptrdiff_t>(count));
        return out;
    }
    for (std::size_t n = 0; n < count; ++n) out.push_back(bit(Nat(n)) ? 1 : 0);
    return out;
}

std::string Bitstream::to_expr() const { return expr_of(*node_); }

DensityProfile::DensityProfile(std::size_t upto, std::vector<std::uint64_t> ones)
    : upto_(upto), ones_(std::move(ones)) {
    // argmin of d over [n, upto], scanned from the right; ties keep the
    // leftmost index so running_min_from is reproducible.
    min_from_idx_.resize(upto_ + 1);
    min_from_idx_[upto_] = static_cast<std::uint32_t>(upto_);
    for (std::size_t n = upto_; n-- > 1;) {
        std::uint32_t best = min_from_idx_[n + 1];
        // d(n) <= d(best)  <=>  ones[n] * best <= ones[best] * n
        if (ones_[n] * best <= ones_[best] * n)
            min_from_idx_[n] = static_cast<std::uint32_t>(n);
        else
            min_from_idx_[n] = best;
    }
    if (upto_ >= 1) min_from_idx_[0] = min_from_idx_[1];
}

DensityProfile DensityProfile::of(const Bitstream& s, std::size_t upto) {
    return of_bits(s.prefix(upto), upto);
}

DensityProfile DensityProfile::of_bits(const std::vector<std::uint8_t>& bits, std::size_t upto) {
    if (upto < 1) throw domain_error("density profile: empty prefix");
    if (bits.size() < upto) throw domain_error("density profile: prefix shorter than horizon");
    std::vector<std::uint64_t> ones(upto + 1, 0);
    for (std::size_t n = 0; n < upto; ++n) ones[n + 1] = ones[n] + (bits[n] ? 1 : 0);
    return DensityProfile(upto, std::move(ones));
}

Rat DensityProfile::d(std::size_t n) const {
    if (n < 1 || n > upto_) throw domain_error("density profile: index out of range");
    return Rat(ones_[n], n);
}

Rat DensityProfile::running_min_from(std::size_t n) const {
    if (n < 1 || n > upto_) throw domain_error("density profile: index out of range");
    return d(min_from_idx_[n]);
}

std::optional<std::size_t> DensityProfile::last_crossing(const Rat& threshold) const {
    for (std::size_t n = upto_; n >= 1; --n)
        if (d(n) < threshold) return n;
    return std::nullopt;
}

std::string DensityProfile::to_csv() const {
    std::ostringstream out;
    out << "n,num,den\n";
    for (std::size_t n = 1; n <= upto_; ++n) out << n << ',' << ones_[n] << ',' << n << '\n';
    return out.str();
}

std::string DensityProfile::to_json(const std::string& expr, const Nat& fuel) const {
    nlohmann::json j;
    j["schema"] = "density-profile/1";
    j["expr"] = expr;
    j["fuel"] = fuel.str();
    j["upto"] = upto_;
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t n = 1; n <= upto_; ++n)
        rows.push_back({n, ones_[n], n});
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

Rat agreement_density(const Bitstream& a, const Bitstream& b, std::size_t upto) {
    if (upto < 1) throw domain_error("agreement density: empty prefix");
    std::vector<std::uint8_t> pa = a.prefix(upto);
    std::vector<std::uint8_t> pb = b.prefix(upto);
    std::uint64_t agree = 0;
    for (std::size_t n = 0; n < upto; ++n)
        if ((pa[n] != 0) == (pb[n] != 0)) ++agree;
    return Rat(agree, upto);
}


// ---------------------------------------------------------------------------
// modulus_of lives here because it dispatches on the stream descriptor,
// which only this translation unit can see.

namespace {

// 2^m * x >= y, with m capped well below overflow.
bool pow2_mul_ge(std::size_t m, std::uint64_t x, std::uint64_t y) {
    if (m > 62) throw domain_error("modulus_of: m too large for desk scale");
    return ((unsigned __int128)1 << m) * x >= y;
}

ModulusResult exact_result(Nat value) {
    ModulusResult r;
    r.kind = ModulusResult::Kind::Exact;
    r.value = std::move(value);
    return r;
}

ModulusResult refused(std::string reason) {
    ModulusResult r;
    r.kind = ModulusResult::Kind::Refused;
    r.reason = std::move(reason);
    return r;
}

} // namespace

ModulusResult modulus_of(const Bitstream& s, std::size_t m, std::size_t scan_horizon,
                         bool allow_prefix) {
    using K = Node::Kind;
    const Node& node = s.node();
    switch (node.kind) {
        case K::All:
            return exact_result(0);
        case K::None:
            return refused("density is 0");
        case K::Evens:
            if (m == 0) return exact_result(0);
            return refused("density never exceeds 1/2");
        case K::Odds:
            if (m == 0) return exact_result(1); // d(1) = 0, d(n) > 0 after
            return refused("density never exceeds 1/2");
        case K::Finite:
            return refused("density tends to 0");
        case K::Cofinite: {
            // Beyond max(S) the bits are all 1; d(n) <= 1 - 2^{-m} can only
            // hold while n <= 2^m * |S|.
            const std::set<Nat>& excl = node.members;
            if (excl.empty()) return exact_result(0);
            std::uint64_t mx = static_cast<std::uint64_t>(*excl.rbegin());
            std::uint64_t bound = std::max<std::uint64_t>(
                mx + 1, (m > 62 ? throw domain_error("modulus_of: m too large")
                               : (std::uint64_t(1) << m)) * excl.size() + 1);
            for (std::uint64_t n = bound; n >= 1; --n) {
                std::uint64_t in_s = 0;
                for (const Nat& e : excl)
                    if (e < n) ++in_s;
                if (pow2_mul_ge(m, in_s, n)) return exact_result(Nat(n));
            }
            return exact_result(0);
        }
        case K::SlowDensity: {
            // Past n1 = the first density crossing at or beyond
            // max(f~(m+1), 2^{m+2}+1), the greedy construction never lets
            // the density fall back below 1 - 2^{-m}: an admitted step
            // keeps the ratio non-decreasing there, and a skipped step can
            // only shave 2/(n+1), which the 2^{m+2} margin absorbs.
            const StrictGrowth& f = *node.growth;
            Nat fm1 = f(m + 1);
            if (fm1 > 1u << 24) return refused("growth function too fast for desk scale");
            std::uint64_t low = std::max<std::uint64_t>(static_cast<std::uint64_t>(fm1),
                                                        (std::uint64_t(1) << (m + 2)) + 1);
            std::uint64_t n1 = 0;
            for (std::uint64_t n = low;; ++n) {
                if (n > (std::uint64_t(1) << 26))
                    return refused("no crossing found within the desk-scale horizon");
                node.cache->extend(f, static_cast<std::size_t>(n));
                std::uint64_t ones = 0;
                for (std::uint64_t p = 0; p < n; ++p) ones += node.cache->bits[p];
                if (!pow2_mul_ge(m, n - ones, n)) { // d(n) > 1 - 2^{-m}
                    n1 = n;
                    break;
                }
            }
            node.cache->extend(f, static_cast<std::size_t>(n1));
            std::vector<std::uint64_t> ones(n1 + 1, 0);
            for (std::uint64_t p = 0; p < n1; ++p)
                ones[p + 1] = ones[p] + node.cache->bits[p];
            for (std::uint64_t n = n1; n >= 1; --n)
                if (pow2_mul_ge(m, n - ones[n], n)) return exact_result(Nat(n));
            return exact_result(0);
        }
        case K::SparseCompl: {
            const std::set<Nat>& excl = node.sparse.members();
            if (excl.empty()) return exact_result(0);
            std::uint64_t mx = static_cast<std::uint64_t>(*excl.rbegin());
            if (m > 62) throw domain_error("modulus_of: m too large");
            std::uint64_t bound =
                std::max<std::uint64_t>(mx + 1, (std::uint64_t(1) << m) * excl.size() + 1);
            for (std::uint64_t n = bound; n >= 1; --n) {
                std::uint64_t in_s = 0;
                for (const Nat& e : excl)
                    if (e < n) ++in_s;
                if (pow2_mul_ge(m, in_s, n)) return exact_result(Nat(n));
            }
            return exact_result(0);
        }
        default:
            break;
    }
    if (!allow_prefix)
        return refused("no analytic tail certificate for this descriptor");
    DensityProfile prof = DensityProfile::of(s, scan_horizon);
    ModulusResult r;
    r.kind = ModulusResult::Kind::PrefixApprox;
    r.valid_to = scan_horizon;
    Rat threshold = one_minus_pow2_inv(m);
    r.value = 0;
    for (std::size_t n = scan_horizon; n >= 1; --n)
        if (prof.d(n) <= threshold) {
            r.value = n;
            break;
        }
    return r;
}


} // namespace d1
