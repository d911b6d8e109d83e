#pragma once

#include "d1/growth.hpp"
#include "d1/rational.hpp"
#include "d1/sparse.hpp"
#include "d1/tree.hpp"

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace d1 {

// A computable real as a finitely-described 0/1 sequence. The descriptor
// algebra is closed under the constructors below; every stream is a value,
// evaluable at any index and printable back into the expression DSL.
class Bitstream {
public:
    static Bitstream all();
    static Bitstream none();
    static Bitstream evens();
    static Bitstream odds();
    static Bitstream finite(std::set<Nat> members);
    static Bitstream cofinite(std::set<Nat> non_members);
    static Bitstream periodic(std::vector<std::uint8_t> word);
    static Bitstream complement(Bitstream s);
    static Bitstream union_of(Bitstream a, Bitstream b);
    static Bitstream intersect(Bitstream a, Bitstream b);
    // bit(2n) = a(n), bit(2n+1) = b(n).
    static Bitstream join(Bitstream a, Bitstream b);
    // n is a member iff m is in the source, where 2^m is the largest power
    // of 2 dividing n; 0 is never a member.
    static Bitstream r_embed(Bitstream source);
    // The hidden-information fixture: bit at 2^e copies source(e), all
    // other positions are 0.
    static Bitstream obs15(Bitstream source);
    // Greedy density-1 set whose density stays below 1 - 2^{-m} before
    // f(m); f is taken in its strictly increasing canonical form.
    static Bitstream slow_density(GrowthFunction f);
    static Bitstream sparse_complement(SparseSet s);
    static Bitstream pi11_a(std::shared_ptr<const CodedTree> t);
    static Bitstream pi11_b(std::shared_ptr<const CodedTree> t);

    bool bit(const Nat& n) const;
    // Bits 0..count-1 in one pass; the only efficient path for
    // slow-density streams.
    std::vector<std::uint8_t> prefix(std::size_t count) const;

    std::string to_expr() const;

    struct Node;
    const Node& node() const { return *node_; }

private:
    explicit Bitstream(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

// Exact prefix densities d(n) = |A cap n| / n for 1 <= n <= N, with
// running minima and threshold-crossing queries. |A cap n| counts members
// strictly below n.
class DensityProfile {
public:
    static DensityProfile of(const Bitstream& s, std::size_t upto);
    static DensityProfile of_bits(const std::vector<std::uint8_t>& bits, std::size_t upto);

    std::size_t upto() const { return upto_; }
    std::uint64_t count(std::size_t n) const { return ones_[n]; } // |A cap n|
    Rat d(std::size_t n) const;
    // min over k in [n, upto] of d(k); non-decreasing in n.
    Rat running_min_from(std::size_t n) const;
    // Last n in [1, upto] with d(n) < threshold, if any.
    std::optional<std::size_t> last_crossing(const Rat& threshold) const;

    std::string to_csv() const; // header "n,num,den"
    std::string to_json(const std::string& expr, const Nat& fuel) const;

private:
    DensityProfile(std::size_t upto, std::vector<std::uint64_t> ones);
    std::size_t upto_;
    std::vector<std::uint64_t> ones_;         // ones_[n] = |A cap n|, n in [0, upto]
    std::vector<std::uint32_t> min_from_idx_; // argmin of d over [n, upto]
};

// |{n < N : a(n) = b(n)}| / N.
Rat agreement_density(const Bitstream& a, const Bitstream& b, std::size_t upto);

} // namespace d1
