#pragma once

#include "d1/rational.hpp"

#include <memory>
#include <utility>
#include <variant>
#include <vector>

namespace d1 {

// Non-decreasing function N -> N described by a closed family of
// constructors: polynomial with natural coefficients, 2^m, a finite table
// with a constant default tail, and pointwise max. Construction
// canonicalizes with a running maximum so f(m+1) >= f(m) always holds.
class GrowthFunction {
public:
    struct Poly {
        std::vector<Nat> coeffs; // c0 + c1*m + c2*m^2 + ...
    };
    struct Exp2 {};
    struct Table {
        std::vector<Nat> values;
        Nat default_tail;
    };
    struct Max {
        std::shared_ptr<const GrowthFunction> lhs;
        std::shared_ptr<const GrowthFunction> rhs;
    };

    static GrowthFunction poly(std::vector<Nat> coeffs) {
        return GrowthFunction(Poly{std::move(coeffs)});
    }
    static GrowthFunction exp2() { return GrowthFunction(Exp2{}); }
    static GrowthFunction table(std::vector<Nat> values, Nat default_tail) {
        return GrowthFunction(Table{std::move(values), std::move(default_tail)});
    }
    static GrowthFunction max(GrowthFunction a, GrowthFunction b) {
        return GrowthFunction(Max{std::make_shared<GrowthFunction>(std::move(a)),
                                  std::make_shared<GrowthFunction>(std::move(b))});
    }
    static GrowthFunction identity_plus_one() { return poly({Nat(1), Nat(1)}); }

    // Canonicalized value: max over i <= m of the raw descriptor value.
    Nat operator()(std::size_t m) const {
        Nat best = raw(0);
        for (std::size_t i = 1; i <= m; ++i) {
            Nat v = raw(i);
            if (v > best) best = std::move(v);
        }
        return best;
    }

    // g~(m) = max(g(m), g~(m-1)+1), per-prefix evaluation. Strictly
    // increasing, hence unbounded; slow-density and T_g constructions
    // require this form.
    std::vector<Nat> strictly_increasing_prefix(std::size_t count) const {
        std::vector<Nat> out;
        out.reserve(count);
        Nat running(-1);
        Nat raw_running(0);
        for (std::size_t m = 0; m < count; ++m) {
            Nat v = raw(m);
            if (v > raw_running) raw_running = v;
            Nat next = running + 1;
            running = raw_running > next ? raw_running : next;
            out.push_back(running);
        }
        return out;
    }

    const std::variant<Poly, Exp2, Table, Max>& descriptor() const { return desc_; }

private:
    explicit GrowthFunction(std::variant<Poly, Exp2, Table, Max> d) : desc_(std::move(d)) {}

    Nat raw(std::size_t m) const {
        if (auto* p = std::get_if<Poly>(&desc_)) {
            Nat acc = 0;
            Nat pw = 1;
            for (const Nat& c : p->coeffs) {
                acc += c * pw;
                pw *= Nat(m);
            }
            return acc;
        }
        if (std::get_if<Exp2>(&desc_)) return pow2(m);
        if (auto* t = std::get_if<Table>(&desc_)) {
            if (m < t->values.size()) return t->values[m];
            return t->default_tail;
        }
        const auto& mx = std::get<Max>(desc_);
        Nat a = mx.lhs->raw(m);
        Nat b = mx.rhs->raw(m);
        return a > b ? a : b;
    }

    std::variant<Poly, Exp2, Table, Max> desc_;
};

// Strictly increasing view over a growth function, with cached prefix.
// Used wherever a construction needs f replaced by a faster growing one.
class StrictGrowth {
public:
    explicit StrictGrowth(GrowthFunction f) : f_(std::move(f)) {}

    const Nat& operator()(std::size_t m) const {
        while (cache_.size() <= m) extend(cache_.size() * 2 + 8);
        return cache_[m];
    }

    // Largest m with value < bound; npos-like -1 if even m=0 reaches bound.
    // Strict growth bounds the search: value(m) >= value(0) + m.
    std::ptrdiff_t last_below(const Nat& bound) const {
        std::ptrdiff_t m = -1;
        while ((*this)(static_cast<std::size_t>(m + 1)) < bound) ++m;
        return m;
    }

    const GrowthFunction& base() const { return f_; }

private:
    void extend(std::size_t count) const {
        cache_ = f_.strictly_increasing_prefix(count);
    }

    GrowthFunction f_;
    mutable std::vector<Nat> cache_;
};

} // namespace d1
