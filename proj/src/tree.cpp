#include "d1/tree.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

namespace d1 {

bool word_less_length_lex(const Word& a, const Word& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

CodedTree::CodedTree(std::vector<std::pair<Word, bool>> nodes,
                     std::vector<DedOverride> ded_overrides,
                     std::map<Word, std::size_t, WordLengthLex> alloc_b_overrides,
                     std::map<Word, std::size_t, WordLengthLex> alloc_val_overrides) {
    for (auto& [w, b] : nodes) {
        if (index_.count(w)) throw domain_error("CodedTree: duplicate node");
        index_[w] = 0;
        bits_.push_back(b); // placeholder order, fixed below
    }
    nodes_.reserve(nodes.size());
    bits_.clear();
    for (auto& [w, b] : index_) nodes_.push_back(w); // map iterates length-then-lex
    for (std::size_t i = 0; i < nodes_.size(); ++i) index_[nodes_[i]] = i;
    bits_.resize(nodes_.size());
    for (auto& [w, b] : nodes) bits_[index_[w]] = b;

    // Prefix-closure: every nonempty node's parent must be present.
    for (const Word& w : nodes_) {
        if (w.empty()) continue;
        Word parent(w.begin(), w.end() - 1);
        if (!index_.count(parent)) throw domain_error("CodedTree: node set not prefix-closed");
    }

    allocate(alloc_b_overrides, alloc_val_overrides);
    apply_ded_overrides(ded_overrides);
}

std::size_t CodedTree::index_of(const Word& sigma) const {
    auto it = index_.find(sigma);
    if (it == index_.end()) throw domain_error("CodedTree: node not in tree");
    return it->second;
}

std::optional<std::size_t> CodedTree::parent_of(std::size_t idx) const {
    const Word& w = nodes_[idx];
    if (w.empty()) return std::nullopt;
    Word parent(w.begin(), w.end() - 1);
    return index_of(parent);
}

std::uint32_t CodedTree::true_tau(std::size_t idx, std::size_t m) const {
    const Word& w = nodes_[idx];
    if (m >= w.size()) throw domain_error("true_tau: m must be < |sigma|");
    std::uint32_t tau = 0;
    for (std::size_t i = 0; i <= m; ++i) {
        Word pred(w.begin(), w.end() - static_cast<std::ptrdiff_t>(i) - 1);
        if (bits_[index_of(pred)]) tau |= 1u << i;
    }
    return tau;
}

void CodedTree::allocate(const std::map<Word, std::size_t, WordLengthLex>& alloc_b_overrides,
                         const std::map<Word, std::size_t, WordLengthLex>& alloc_val_overrides) {
    std::set<std::size_t> used;
    auto claim = [&](std::size_t block) {
        if (!used.insert(block).second) throw domain_error("CodedTree: block allocation overlap");
        max_block_ = std::max(max_block_, block);
    };
    for (const auto& [w, blk] : alloc_b_overrides) claim(blk);
    for (const auto& [w, blk] : alloc_val_overrides) {
        if (blk % 2 != 0 || blk < w.size())
            throw domain_error("CodedTree: value block must be even and >= |sigma|");
        claim(blk);
    }

    // Value blocks: per node in numbering order, the smallest unused even
    // block >= |sigma|.
    alloc_val_.resize(nodes_.size());
    for (std::size_t idx = 0; idx < nodes_.size(); ++idx) {
        if (auto it = alloc_val_overrides.find(nodes_[idx]); it != alloc_val_overrides.end()) {
            alloc_val_[idx] = it->second;
        } else {
            std::size_t blk = nodes_[idx].size() + (nodes_[idx].size() % 2);
            while (used.count(blk)) blk += 2;
            claim(blk);
            alloc_val_[idx] = blk;
        }
        val_block_to_node_[alloc_val_[idx]] = idx;
    }

    // Deduction blocks: fixed enumeration (node, m asc, tau asc, j, k),
    // each getting the smallest unused odd block >= |sigma| - m - 1.
    ded_blocks_.resize(nodes_.size());
    for (std::size_t idx = 0; idx < nodes_.size(); ++idx) {
        const std::size_t len = nodes_[idx].size();
        ded_blocks_[idx].resize(len);
        for (std::size_t m = 0; m < len; ++m) {
            ded_blocks_[idx][m].resize(std::size_t(1) << (m + 1));
            for (std::uint32_t tau = 0; tau < (1u << (m + 1)); ++tau) {
                for (std::size_t jk = 0; jk < 2 * kDedChoices; ++jk) {
                    std::size_t min_blk = len - m - 1;
                    std::size_t blk = min_blk + 1 - (min_blk % 2);
                    while (used.count(blk)) blk += 2;
                    claim(blk);
                    ded_blocks_[idx][m][tau][jk] = blk;
                    ded_block_to_proc_[blk] =
                        DedRef{idx, m, tau, jk >= kDedChoices, jk % kDedChoices};
                }
                // Default behavior: the true-assumption procedure answers
                // j = b_sigma with k = 0; everything else stays silent.
                DedBehavior beh;
                if (tau == true_tau(idx, m)) beh = DedBehavior{true, bits_[idx], 0};
                ded_behavior_[DedProcId{idx, m, tau}] = beh;
            }
        }
    }

    // B blocks: candidate 3*s + 5, shifted up past any used block.
    alloc_b_.resize(nodes_.size());
    for (std::size_t idx = 0; idx < nodes_.size(); ++idx) {
        if (auto it = alloc_b_overrides.find(nodes_[idx]); it != alloc_b_overrides.end()) {
            alloc_b_[idx] = it->second;
        } else {
            std::size_t blk = 3 * idx + 5;
            while (used.count(blk)) ++blk;
            claim(blk);
            alloc_b_[idx] = blk;
        }
        b_block_to_node_[alloc_b_[idx]] = idx;
    }
}

void CodedTree::apply_ded_overrides(const std::vector<DedOverride>& overrides) {
    for (const DedOverride& o : overrides) {
        std::size_t idx = index_of(o.sigma);
        if (o.m >= nodes_[idx].size()) throw domain_error("ded override: m out of range");
        if (o.tau >= (1u << (o.m + 1))) throw domain_error("ded override: tau out of range");
        if (o.behavior.answers && o.behavior.k >= kDedChoices)
            throw domain_error("ded override: k out of range");
        if (o.tau == true_tau(idx, o.m) &&
            (!o.behavior.answers || o.behavior.j != bits_[idx]))
            throw domain_error("ded override: true-assumption procedure must answer b_sigma");
        ded_behavior_[DedProcId{idx, o.m, o.tau}] = o.behavior;
    }
}

std::size_t CodedTree::alloc_ded(std::size_t idx, std::size_t m, std::uint32_t tau, bool j,
                                 std::size_t k) const {
    return ded_blocks_[idx][m][tau][(j ? kDedChoices : 0) + k];
}

DedBehavior CodedTree::ded_behavior(std::size_t idx, std::size_t m, std::uint32_t tau) const {
    return ded_behavior_.at(DedProcId{idx, m, tau});
}

Region CodedTree::b_region(std::size_t idx) const {
    return Region{alloc_b_[idx], pow2(alloc_b_[idx])};
}

Region CodedTree::value_region(std::size_t idx) const {
    std::size_t i = alloc_val_[idx];
    return Region{i, pow2(i - nodes_[idx].size())};
}

Region CodedTree::ded_answer_region(std::size_t idx, std::size_t m, std::uint32_t tau) const {
    DedBehavior beh = ded_behavior(idx, m, tau);
    if (!beh.answers) throw domain_error("ded_answer_region: procedure is silent");
    std::size_t i = alloc_ded(idx, m, tau, beh.j, beh.k);
    std::size_t eff = nodes_[idx].size() - m - 1;
    return Region{i, pow2(i - eff)};
}

std::optional<std::size_t> CodedTree::node_of_b_block(std::size_t block) const {
    auto it = b_block_to_node_.find(block);
    if (it == b_block_to_node_.end()) return std::nullopt;
    return it->second;
}

bool CodedTree::b_bit(const Nat& n) const {
    if (n < 1) return false;
    auto node = node_of_b_block(log2_floor(n));
    return node && bits_[*node];
}

bool CodedTree::a_tilde_bit(const Nat& n) const {
    if (n < 1) return false;
    std::size_t i = log2_floor(n);
    if (auto it = val_block_to_node_.find(i); it != val_block_to_node_.end())
        return bits_[it->second] && value_region(it->second).contains(n);
    if (auto it = ded_block_to_proc_.find(i); it != ded_block_to_proc_.end()) {
        const DedRef& r = it->second;
        DedBehavior beh = ded_behavior(r.node, r.m, r.tau);
        if (!beh.answers || beh.j != r.j || beh.k != r.k) return false;
        return ded_answer_region(r.node, r.m, r.tau).contains(n);
    }
    return false;
}

bool CodedTree::char_bit(const Nat& m) const { return m < node_count(); }

bool CodedTree::a_bit(const Nat& n) const {
    if (n % 2 == 0) return a_tilde_bit(n / 2);
    Nat p = (n - 1) / 2;
    if (p < 1) return false; // 0 is not in any R-image
    return char_bit(pow2_valuation(p));
}

std::string CodedTree::to_json() const {
    nlohmann::json j;
    j["schema"] = "coded-tree/1";
    j["nodes"] = nlohmann::json::array();
    for (std::size_t idx = 0; idx < nodes_.size(); ++idx) {
        j["nodes"].push_back({{"sigma", nodes_[idx]}, {"bit", bits_[idx] ? 1 : 0}});
    }
    // Full allocation maps, so reloading reproduces the exact coding even
    // if the canonical allocator ever changes.
    nlohmann::json alloc = nlohmann::json::object();
    nlohmann::json ab = nlohmann::json::array(), av = nlohmann::json::array();
    for (std::size_t idx = 0; idx < nodes_.size(); ++idx) {
        ab.push_back(alloc_b_[idx]);
        av.push_back(alloc_val_[idx]);
    }
    alloc["b"] = ab;
    alloc["val"] = av;
    j["alloc"] = alloc;
    nlohmann::json ded = nlohmann::json::array();
    for (const auto& [id, beh] : ded_behavior_) {
        DedBehavior def;
        if (id.tau == true_tau(id.node, id.m)) def = DedBehavior{true, bits_[id.node], 0};
        if (beh.answers == def.answers && beh.j == def.j && beh.k == def.k) continue;
        ded.push_back({{"sigma", nodes_[id.node]},
                       {"m", id.m},
                       {"tau", id.tau},
                       {"answers", beh.answers},
                       {"j", beh.j ? 1 : 0},
                       {"k", beh.k}});
    }
    j["ded_choices"] = ded;
    return j.dump(2) + "\n";
}

CodedTree CodedTree::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw domain_error(std::string("tree JSON: ") + e.what());
    }
    if (!j.contains("nodes") || !j["nodes"].is_array())
        throw domain_error("tree JSON: missing \"nodes\" array");
    std::vector<std::pair<Word, bool>> nodes;
    for (const auto& nj : j["nodes"]) {
        Word w = nj.at("sigma").get<Word>();
        nodes.emplace_back(std::move(w), nj.at("bit").get<int>() != 0);
    }
    std::map<Word, std::size_t, WordLengthLex> ab, av;
    if (j.contains("alloc")) {
        const auto& alloc = j["alloc"];
        auto load = [&](const char* key, std::map<Word, std::size_t, WordLengthLex>& into) {
            if (!alloc.contains(key)) return;
            const auto& arr = alloc[key];
            // Arrays are aligned with the length-then-lex node order.
            std::vector<Word> sorted;
            for (const auto& [w, b] : nodes) sorted.push_back(w);
            std::sort(sorted.begin(), sorted.end(), word_less_length_lex);
            if (arr.size() != sorted.size())
                throw domain_error("tree JSON: alloc array length mismatch");
            for (std::size_t i = 0; i < sorted.size(); ++i)
                into[sorted[i]] = arr[i].get<std::size_t>();
        };
        load("b", ab);
        load("val", av);
    }
    std::vector<DedOverride> ded;
    if (j.contains("ded_choices")) {
        for (const auto& dj : j["ded_choices"]) {
            DedOverride o;
            o.sigma = dj.at("sigma").get<Word>();
            o.m = dj.at("m").get<std::size_t>();
            o.tau = dj.at("tau").get<std::uint32_t>();
            o.behavior.answers = dj.at("answers").get<bool>();
            if (o.behavior.answers) {
                o.behavior.j = dj.at("j").get<int>() != 0;
                o.behavior.k = dj.at("k").get<std::size_t>();
            }
            ded.push_back(std::move(o));
        }
    }
    return CodedTree(std::move(nodes), std::move(ded), std::move(ab), std::move(av));
}

std::string PunctureSpec::to_json() const {
    nlohmann::json j;
    j["schema"] = "puncture-spec/1";
    j["chain"] = chain;
    return j.dump(2) + "\n";
}

PunctureSpec PunctureSpec::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw domain_error(std::string("puncture JSON: ") + e.what());
    }
    PunctureSpec spec;
    spec.chain = j.at("chain").get<std::vector<Word>>();
    return spec;
}

std::vector<RemovedRegion> puncture_regions(const CodedTree& t, const PunctureSpec& spec) {
    // Validate: an increasing chain of tree nodes.
    for (std::size_t i = 0; i < spec.chain.size(); ++i) {
        if (!t.contains(spec.chain[i])) throw domain_error("puncture: chain node not in tree");
        if (i > 0) {
            const Word& prev = spec.chain[i - 1];
            const Word& cur = spec.chain[i];
            if (prev.size() >= cur.size() ||
                !std::equal(prev.begin(), prev.end(), cur.begin()))
                throw domain_error("puncture: chain must be strictly increasing along one branch");
        }
    }
    std::vector<RemovedRegion> out;
    for (std::size_t i = 0; i < spec.chain.size(); ++i) {
        std::size_t idx = t.index_of(spec.chain[i]);
        std::size_t len = spec.chain[i].size();
        Region val = t.value_region(idx);
        out.push_back(RemovedRegion{val, idx, len, true});
        // Deduction answers: all for the first chain node; later nodes keep
        // the procedures that reach down to the previous chain node's bit.
        std::size_t keep_from_m =
            i == 0 ? len : len - spec.chain[i - 1].size() - 1;
        for (std::size_t m = 0; m < len && m < keep_from_m; ++m) {
            for (std::uint32_t tau = 0; tau < (1u << (m + 1)); ++tau) {
                DedBehavior beh = t.ded_behavior(idx, m, tau);
                if (!beh.answers) continue;
                out.push_back(RemovedRegion{t.ded_answer_region(idx, m, tau), idx,
                                            len - m - 1, false});
            }
        }
    }
    return out;
}

} // namespace d1
