#include "d1/oracle.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace d1 {

// ---------------------------------------------------------------------------
// PartialOracle

struct PartialOracle::Node {
    enum class Kind { Empty, Facts, Full, Masked, FromFunctional, WithoutZeros, Punctured,
                      WithFacts };
    Kind kind;
    std::map<Nat, Fact> facts;                 // Facts / WithFacts overlay
    std::optional<Bitstream> base;             // Full / Masked
    std::optional<Bitstream> mask;             // Masked
    Nat delay;                                 // Full / Masked
    std::optional<Functional> fn;              // FromFunctional
    std::shared_ptr<const Node> inner;
    std::vector<RemovedRegion> removed;        // Punctured
};

namespace {
using ONode = PartialOracle::Node;

std::shared_ptr<ONode> omk(ONode::Kind k) {
    auto n = std::make_shared<ONode>();
    n->kind = k;
    return n;
}

bool region_removes(const std::vector<RemovedRegion>& removed, const Nat& n) {
    // Removed positions are the even (A-tilde) coordinates 2p of each region.
    if (n % 2 != 0) return false;
    Nat p = n / 2;
    for (const RemovedRegion& r : removed)
        if (r.region.contains(p)) return true;
    return false;
}

} // namespace

PartialOracle PartialOracle::empty() { return PartialOracle(omk(ONode::Kind::Empty)); }

PartialOracle PartialOracle::from_facts(std::map<Nat, Fact> facts) {
    auto n = omk(ONode::Kind::Facts);
    n->facts = std::move(facts);
    return PartialOracle(std::move(n));
}

PartialOracle PartialOracle::full(Bitstream base, Nat delay) {
    auto n = omk(ONode::Kind::Full);
    n->base = std::move(base);
    n->delay = std::move(delay);
    return PartialOracle(std::move(n));
}

PartialOracle PartialOracle::masked(Bitstream base, Bitstream mask, Nat delay) {
    auto n = omk(ONode::Kind::Masked);
    n->base = std::move(base);
    n->mask = std::move(mask);
    n->delay = std::move(delay);
    return PartialOracle(std::move(n));
}

PartialOracle PartialOracle::from_functional(Functional f, PartialOracle inner) {
    auto n = omk(ONode::Kind::FromFunctional);
    n->fn = std::move(f);
    n->inner = inner.node_;
    return PartialOracle(std::move(n));
}

PartialOracle PartialOracle::without_zero_answers() const {
    auto n = omk(ONode::Kind::WithoutZeros);
    n->inner = node_;
    return PartialOracle(std::move(n));
}

PartialOracle PartialOracle::punctured(std::vector<RemovedRegion> regions) const {
    auto n = omk(ONode::Kind::Punctured);
    n->inner = node_;
    n->removed = std::move(regions);
    return PartialOracle(std::move(n));
}

PartialOracle PartialOracle::with_facts(std::map<Nat, Fact> facts) const {
    auto n = omk(ONode::Kind::WithFacts);
    n->inner = node_;
    n->facts = std::move(facts);
    return PartialOracle(std::move(n));
}

std::optional<bool> PartialOracle::query(const Nat& n, const Nat& fuel) const {
    using K = ONode::Kind;
    const ONode& o = *node_;
    switch (o.kind) {
        case K::Empty: return std::nullopt;
        case K::Facts: {
            auto it = o.facts.find(n);
            if (it == o.facts.end() || it->second.delay > fuel) return std::nullopt;
            return it->second.answer;
        }
        case K::Full:
            if (o.delay > fuel) return std::nullopt;
            return o.base->bit(n);
        case K::Masked:
            if (o.delay > fuel || !o.mask->bit(n)) return std::nullopt;
            return o.base->bit(n);
        case K::FromFunctional: {
            // Facts <n, x, l>: the functional halts on n with value x in
            // l fuel against the inner oracle.
            Transcript t = o.fn->run(PartialOracle(o.inner), n, fuel);
            return t.output;
        }
        case K::WithoutZeros: {
            auto a = PartialOracle(o.inner).query(n, fuel);
            if (a && !*a) return std::nullopt;
            return a;
        }
        case K::Punctured:
            if (region_removes(o.removed, n)) return std::nullopt;
            return PartialOracle(o.inner).query(n, fuel);
        case K::WithFacts: {
            auto it = o.facts.find(n);
            if (it != o.facts.end()) {
                if (it->second.delay > fuel) return std::nullopt;
                return it->second.answer;
            }
            return PartialOracle(o.inner).query(n, fuel);
        }
    }
    return std::nullopt;
}

std::vector<std::pair<Nat, Fact>> PartialOracle::visible_facts(const Nat& horizon,
                                                               const Nat& fuel) const {
    std::vector<std::pair<Nat, Fact>> out;
    for (Nat n = 0; n < horizon; ++n) {
        auto a = query(n, fuel);
        if (!a) continue;
        // Minimal delay by binary search; answers are monotone in fuel.
        Nat lo = 0, hi = fuel;
        while (lo < hi) {
            Nat mid = (lo + hi) / 2;
            if (query(n, mid)) hi = mid;
            else lo = mid + 1;
        }
        out.emplace_back(n, Fact{*a, lo});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Functional

struct Functional::Node {
    enum class Kind { Constant, Diverge, IdentityCopy, Parity, AnsweredAt, BothHalves,
                      SubsetReduction, FromOracle, RDecoder, Table, OnlyOnes, MoreIsMore,
                      Compose };
    Kind kind;
    bool value = false;                        // Constant
    Nat pos;                                   // AnsweredAt
    std::optional<Bitstream> stream;           // SubsetReduction
    std::optional<PartialOracle> oracle;       // FromOracle
    DecisionTable table;                       // Table
    std::shared_ptr<const Node> inner, inner2; // wrappers / Compose
    Nat horizon;                               // MoreIsMore
};

namespace {

using FNode = Functional::Node;

std::shared_ptr<FNode> fmk(FNode::Kind k) {
    auto n = std::make_shared<FNode>();
    n->kind = k;
    return n;
}

// The oracle as the evaluator sees it: one probe, returning the answer and
// the minimal delay at which it becomes visible.
struct OracleView {
    virtual ~OracleView() = default;
    virtual std::optional<std::pair<bool, Nat>> ask(const Nat& pos, const Nat& fuel) = 0;
};

struct PartialOracleView final : OracleView {
    const PartialOracle& o;
    explicit PartialOracleView(const PartialOracle& o) : o(o) {}
    std::optional<std::pair<bool, Nat>> ask(const Nat& pos, const Nat& fuel) override {
        auto a = o.query(pos, fuel);
        if (!a) return std::nullopt;
        Nat lo = 0, hi = fuel;
        while (lo < hi) {
            Nat mid = (lo + hi) / 2;
            if (o.query(pos, mid)) hi = mid;
            else lo = mid + 1;
        }
        return std::make_pair(*a, lo);
    }
};

struct FactsView final : OracleView {
    std::map<Nat, Fact> facts;
    std::optional<std::pair<bool, Nat>> ask(const Nat& pos, const Nat& fuel) override {
        auto it = facts.find(pos);
        if (it == facts.end() || it->second.delay > fuel) return std::nullopt;
        return std::make_pair(it->second.answer, it->second.delay);
    }
};

Transcript eval_fn(const FNode& f, OracleView& view, const Nat& input, const Nat& fuel);

struct ComposeView final : OracleView {
    const FNode& inner;
    OracleView& base;
    ComposeView(const FNode& inner, OracleView& base) : inner(inner), base(base) {}
    std::optional<std::pair<bool, Nat>> ask(const Nat& pos, const Nat& fuel) override {
        Transcript t = eval_fn(inner, base, pos, fuel);
        if (!t.output) return std::nullopt;
        return std::make_pair(*t.output, t.fuel_used);
    }
};

// Evaluation context: every action (query issue, table step, output) costs
// one fuel unit; an answered query additionally costs its delay.
struct Ctx {
    OracleView& view;
    Nat remaining;
    Transcript tr;

    bool charge(const Nat& cost) {
        if (cost > remaining) {
            remaining = 0;
            return false;
        }
        remaining -= cost;
        tr.fuel_used += cost;
        return true;
    }

    // Issue a probe: costs 1 plus the answer's delay when answered.
    std::optional<bool> probe(const Nat& pos) {
        if (!charge(1)) return std::nullopt;
        auto a = view.ask(pos, remaining);
        if (!a) {
            tr.queries.push_back(TranscriptEntry{pos, std::nullopt});
            return std::nullopt;
        }
        charge(a->second); // cannot fail: delay <= remaining by construction
        tr.queries.push_back(TranscriptEntry{pos, a->first});
        return a->first;
    }

    void output(bool v) {
        if (charge(1)) tr.output = v;
    }
};

bool row_matches(const TableRow& row, const Nat& input,
                 const std::map<Nat, bool>& observed) {
    if (row.input && *row.input != input) return false;
    for (const auto& [pos, val] : row.needs) {
        auto it = observed.find(pos);
        if (it == observed.end() || it->second != val) return false;
    }
    return true;
}

Transcript eval_fn(const FNode& f, OracleView& view, const Nat& input, const Nat& fuel) {
    using K = FNode::Kind;
    Ctx ctx{view, fuel, Transcript{input, {}, std::nullopt, 0}};
    switch (f.kind) {
        case K::Constant:
            ctx.output(f.value);
            break;
        case K::Diverge:
            break;
        case K::IdentityCopy: {
            auto a = ctx.probe(input);
            if (a) ctx.output(*a);
            break;
        }
        case K::Parity:
            ctx.output(input % 2 == 1);
            break;
        case K::AnsweredAt:
            if (ctx.probe(f.pos)) ctx.output(true);
            break;
        case K::BothHalves: {
            auto a = ctx.probe(input * 2);
            if (!a) break;
            auto b = ctx.probe(input * 2 + 1);
            if (!b) break;
            ctx.output(*a && *b);
            break;
        }
        case K::SubsetReduction: {
            if (!ctx.charge(1)) break;
            if (!f.stream->bit(input)) break; // n not asserted: diverge
            auto a = ctx.probe(input);
            if (a && *a) ctx.output(true);
            break;
        }
        case K::FromOracle: {
            // Searches fuel levels upward over its captured oracle.
            if (!ctx.charge(1)) break;
            PartialOracleView captured(*f.oracle);
            auto a = captured.ask(input, ctx.remaining);
            if (!a) break;
            ctx.charge(a->second);
            ctx.tr.queries.push_back(TranscriptEntry{input, a->first});
            ctx.output(a->first);
            break;
        }
        case K::RDecoder: {
            if (input > (Nat(1) << 20)) throw domain_error("r-decoder: bit index too large");
            std::size_t m = static_cast<std::size_t>(input);
            // Dovetail probes with fuel: level t consults k = 0..t at fuel
            // t, and the total probe count is bounded by the fuel budget.
            Nat budget = ctx.remaining;
            Nat probes = 0;
            bool done = false;
            for (Nat t = 0; !done && probes < budget; ++t) {
                for (Nat k = 0; k <= t && probes < budget; ++k, ++probes) {
                    Nat pos = (2 * k + 1) * pow2(m);
                    auto a = ctx.view.ask(pos, t);
                    if (!a) continue;
                    if (ctx.charge(1)) {
                        ctx.charge(std::min(t, ctx.remaining));
                        ctx.tr.queries.push_back(TranscriptEntry{pos, a->first});
                        ctx.output(a->first);
                    }
                    done = true;
                    break;
                }
            }
            break;
        }
        case K::Table: {
            std::map<Nat, bool> observed;
            while (true) {
                if (!ctx.charge(1)) break; // one step per table scan
                const TableRow* match = nullptr;
                for (const TableRow& row : f.table.rows)
                    if (row_matches(row, input, observed)) {
                        match = &row;
                        break;
                    }
                if (!match || match->action == TableRow::Action::GiveUp) break;
                if (match->action == TableRow::Action::Output0) {
                    ctx.output(false);
                    break;
                }
                if (match->action == TableRow::Action::Output1) {
                    ctx.output(true);
                    break;
                }
                auto a = ctx.probe(match->query_pos);
                if (!a) break; // unanswered query: diverge
                observed[match->query_pos] = *a;
            }
            break;
        }
        case K::OnlyOnes: {
            Transcript t = eval_fn(*f.inner, view, input, fuel);
            if (t.output && !*t.output) t.output = std::nullopt;
            return t;
        }
        case K::MoreIsMore: {
            if (!ctx.charge(1)) break;
            // All facts the ambient oracle shows below the horizon.
            std::vector<std::pair<Nat, Fact>> facts;
            for (Nat n = 0; n < f.horizon; ++n) {
                auto a = view.ask(n, ctx.remaining);
                if (a) facts.emplace_back(n, Fact{a->first, a->second});
            }
            std::sort(facts.begin(), facts.end(), [](const auto& x, const auto& y) {
                if (x.first != y.first) return x.first < y.first;
                if (x.second.answer != y.second.answer) return !x.second.answer;
                return x.second.delay < y.second.delay;
            });
            const std::size_t nf = facts.size();
            if (nf > 20) throw domain_error("more-is-more: too many visible facts");
            // Sub-oracles in canonical order: by size, then lexicographic
            // on the sorted fact indices. Each candidate gets the full
            // fuel budget, so outputs are monotone in the fact set.
            std::vector<std::uint32_t> masks;
            for (std::uint32_t mask = 0; mask < (1u << nf); ++mask) masks.push_back(mask);
            std::stable_sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
                return __builtin_popcount(a) < __builtin_popcount(b);
            });
            for (std::uint32_t mask : masks) {
                FactsView sub;
                for (std::size_t i = 0; i < nf; ++i)
                    if (mask & (1u << i)) sub.facts[facts[i].first] = facts[i].second;
                Transcript t = eval_fn(*f.inner, sub, input, fuel);
                if (t.output) {
                    ctx.tr.queries = t.queries;
                    ctx.tr.fuel_used += t.fuel_used;
                    ctx.tr.output = t.output;
                    break;
                }
            }
            break;
        }
        case K::Compose: {
            ComposeView served(*f.inner2, view);
            Transcript t = eval_fn(*f.inner, served, input, fuel);
            return t;
        }
    }
    return ctx.tr;
}

} // namespace

Functional Functional::constant(bool value) {
    auto n = fmk(FNode::Kind::Constant);
    n->value = value;
    return Functional(std::move(n));
}

Functional Functional::diverge() { return Functional(fmk(FNode::Kind::Diverge)); }
Functional Functional::identity_copy() { return Functional(fmk(FNode::Kind::IdentityCopy)); }
Functional Functional::parity() { return Functional(fmk(FNode::Kind::Parity)); }

Functional Functional::answered_at(Nat pos) {
    auto n = fmk(FNode::Kind::AnsweredAt);
    n->pos = std::move(pos);
    return Functional(std::move(n));
}

Functional Functional::both_halves() { return Functional(fmk(FNode::Kind::BothHalves)); }

Functional Functional::subset_reduction(Bitstream b_sub) {
    auto n = fmk(FNode::Kind::SubsetReduction);
    n->stream = std::move(b_sub);
    return Functional(std::move(n));
}

Functional Functional::from_oracle(PartialOracle o) {
    auto n = fmk(FNode::Kind::FromOracle);
    n->oracle = std::move(o);
    return Functional(std::move(n));
}

Functional Functional::r_decoder() { return Functional(fmk(FNode::Kind::RDecoder)); }

Functional Functional::table(DecisionTable t) {
    auto n = fmk(FNode::Kind::Table);
    n->table = std::move(t);
    return Functional(std::move(n));
}

Functional Functional::only_ones(Functional f) {
    auto n = fmk(FNode::Kind::OnlyOnes);
    n->inner = f.node_;
    return Functional(std::move(n));
}

Functional Functional::more_is_more(Functional f, Nat fact_horizon) {
    auto n = fmk(FNode::Kind::MoreIsMore);
    n->inner = f.node_;
    n->horizon = std::move(fact_horizon);
    return Functional(std::move(n));
}

Functional Functional::compose(Functional outer, Functional inner) {
    auto n = fmk(FNode::Kind::Compose);
    n->inner = outer.node_;
    n->inner2 = inner.node_;
    return Functional(std::move(n));
}

Transcript Functional::run(const PartialOracle& o, const Nat& input, const Nat& fuel) const {
    PartialOracleView view(o);
    return eval_fn(*node_, view, input, fuel);
}

std::string Transcript::to_json() const {
    nlohmann::json j;
    j["schema"] = "transcript/1";
    j["input"] = input.str();
    nlohmann::json qs = nlohmann::json::array();
    for (const TranscriptEntry& q : queries) {
        nlohmann::json e;
        e["pos"] = q.pos.str();
        if (q.answer) e["answer"] = *q.answer ? 1 : 0;
        else e["answer"] = nullptr;
        qs.push_back(e);
    }
    j["queries"] = qs;
    if (output) j["output"] = *output ? 1 : 0;
    else j["output"] = nullptr;
    j["fuel_used"] = fuel_used.str();
    return j.dump(2) + "\n";
}

std::string DecisionTable::to_json() const {
    nlohmann::json j;
    j["schema"] = "decision-table/1";
    nlohmann::json rows_j = nlohmann::json::array();
    for (const TableRow& row : rows) {
        nlohmann::json r;
        if (row.input) r["input"] = row.input->str();
        nlohmann::json needs = nlohmann::json::array();
        for (const auto& [pos, val] : row.needs) needs.push_back({pos.str(), val ? 1 : 0});
        r["needs"] = needs;
        switch (row.action) {
            case TableRow::Action::Output0: r["action"] = "output0"; break;
            case TableRow::Action::Output1: r["action"] = "output1"; break;
            case TableRow::Action::Query:
                r["action"] = "query";
                r["pos"] = row.query_pos.str();
                break;
            case TableRow::Action::GiveUp: r["action"] = "giveup"; break;
        }
        rows_j.push_back(r);
    }
    j["rows"] = rows_j;
    return j.dump(2) + "\n";
}

DecisionTable DecisionTable::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw domain_error(std::string("decision table JSON: ") + e.what());
    }
    DecisionTable t;
    for (const auto& rj : j.at("rows")) {
        TableRow row;
        if (rj.contains("input")) row.input = Nat(rj["input"].get<std::string>());
        if (rj.contains("needs"))
            for (const auto& need : rj["needs"])
                row.needs.emplace_back(Nat(need.at(0).get<std::string>()),
                                       need.at(1).get<int>() != 0);
        std::string action = rj.at("action").get<std::string>();
        if (action == "output0") row.action = TableRow::Action::Output0;
        else if (action == "output1") row.action = TableRow::Action::Output1;
        else if (action == "giveup") row.action = TableRow::Action::GiveUp;
        else if (action == "query") {
            row.action = TableRow::Action::Query;
            row.query_pos = Nat(rj.at("pos").get<std::string>());
        } else {
            throw domain_error("decision table JSON: unknown action " + action);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

DensityProfile domain_profile(const Functional& f, const PartialOracle& o, std::size_t upto,
                              const Nat& fuel) {
    std::vector<std::uint8_t> bits(upto, 0);
    for (std::size_t n = 0; n < upto; ++n)
        bits[n] = f.run(o, Nat(n), fuel).output.has_value() ? 1 : 0;
    return DensityProfile::of_bits(bits, upto);
}

} // namespace d1
