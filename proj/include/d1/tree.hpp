#pragma once

#include "d1/rational.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace d1 {

// A node of omega^{<omega}: a finite word of naturals. The root is the
// empty word.
using Word = std::vector<std::uint32_t>;

bool word_less_length_lex(const Word& a, const Word& b);

struct WordLengthLex {
    bool operator()(const Word& a, const Word& b) const { return word_less_length_lex(a, b); }
};

// Identity of one deduction procedure: deduce b_sigma from the assumed
// bits tau = <b_{sigma_0}, ..., b_{sigma_m}> of its m+1 immediate
// predecessors (sigma_0 is the parent). tau is stored LSB-first: bit i of
// tau is the assumed value of b_{sigma_i}.
struct DedProcId {
    std::size_t node = 0; // numbering index of sigma
    std::size_t m = 0;
    std::uint32_t tau = 0; // m+1 assumed bits

    auto operator<=>(const DedProcId&) const = default;
};

// What a deduction procedure does: stay silent, or place its 1-region in
// the block chosen for (j, k). True-assumption procedures must answer
// j = b_sigma; false-assumption ones may answer either j or stay silent.
struct DedBehavior {
    bool answers = false;
    bool j = false;
    std::size_t k = 0;
};

struct DedOverride {
    Word sigma;
    std::size_t m = 0;
    std::uint32_t tau = 0;
    DedBehavior behavior;
};

// Where one coded region lives: the last `size` elements of P_block,
// where P_i = [2^i, 2^{i+1}).
struct Region {
    std::size_t block = 0;
    Nat size;

    Nat first() const { return pow2(block + 1) - size; }
    Nat last() const { return pow2(block + 1) - 1; }
    bool contains(const Nat& n) const { return n >= first() && n <= last(); }
};

// Finite labeled tree with the full P_i block-coding apparatus: B codes
// b_sigma across a whole block per node; A-tilde codes b_sigma into the
// last 1/2^{|sigma|} of an even block per node plus one answer region per
// answering deduction procedure; A = A-tilde joined with R(char(T)).
class CodedTree {
public:
    static constexpr std::size_t kDedChoices = 3; // k ranges over 0..2

    CodedTree(std::vector<std::pair<Word, bool>> nodes,
              std::vector<DedOverride> ded_overrides = {},
              std::map<Word, std::size_t, WordLengthLex> alloc_b_overrides = {},
              std::map<Word, std::size_t, WordLengthLex> alloc_val_overrides = {});

    std::size_t node_count() const { return nodes_.size(); }
    const Word& node(std::size_t idx) const { return nodes_[idx]; }
    bool bit_of(std::size_t idx) const { return bits_[idx]; }
    bool contains(const Word& sigma) const { return index_.count(sigma) != 0; }
    std::size_t index_of(const Word& sigma) const;
    std::optional<std::size_t> parent_of(std::size_t idx) const;

    // Assumed-bit vector an honest decoder would use for (sigma, m).
    std::uint32_t true_tau(std::size_t idx, std::size_t m) const;

    std::size_t alloc_b(std::size_t idx) const { return alloc_b_[idx]; }
    std::size_t alloc_val(std::size_t idx) const { return alloc_val_[idx]; }
    std::size_t alloc_ded(std::size_t idx, std::size_t m, std::uint32_t tau, bool j,
                          std::size_t k) const;
    DedBehavior ded_behavior(std::size_t idx, std::size_t m, std::uint32_t tau) const;

    Region b_region(std::size_t idx) const;
    // Value region: last 2^{i - |sigma|} elements of P_{alloc_val(sigma)}.
    Region value_region(std::size_t idx) const;
    // Answer region of an answering procedure: last 2^{i - (|sigma|-m-1)}
    // elements of its block.
    Region ded_answer_region(std::size_t idx, std::size_t m, std::uint32_t tau) const;

    // Node coded in block i of B, if any.
    std::optional<std::size_t> node_of_b_block(std::size_t block) const;

    bool b_bit(const Nat& n) const;
    bool a_tilde_bit(const Nat& n) const;
    // char(T) under the length-then-lex numbering of the node set.
    bool char_bit(const Nat& m) const;
    // A = A-tilde (+) R(char(T)): even positions carry A-tilde, odd carry
    // the Turing-embedded tree membership.
    bool a_bit(const Nat& n) const;

    std::size_t max_block() const { return max_block_; }

    std::string to_json() const;
    static CodedTree from_json(const std::string& text);

private:
    void allocate(const std::map<Word, std::size_t, WordLengthLex>& alloc_b_overrides,
                  const std::map<Word, std::size_t, WordLengthLex>& alloc_val_overrides);
    void apply_ded_overrides(const std::vector<DedOverride>& overrides);

    std::vector<Word> nodes_; // length-then-lex order; index = numbering s
    std::vector<bool> bits_;
    std::map<Word, std::size_t, WordLengthLex> index_;

    std::vector<std::size_t> alloc_b_;
    std::vector<std::size_t> alloc_val_;
    // ded_blocks_[idx][m][tau] -> blocks for (j,k), laid out j*kDedChoices+k.
    std::vector<std::vector<std::vector<std::array<std::size_t, 2 * kDedChoices>>>> ded_blocks_;
    std::map<DedProcId, DedBehavior> ded_behavior_;

    // Reverse maps for bit evaluation.
    std::map<std::size_t, std::size_t> b_block_to_node_;
    std::map<std::size_t, std::size_t> val_block_to_node_;
    struct DedRef {
        std::size_t node, m;
        std::uint32_t tau;
        bool j;
        std::size_t k;
    };
    std::map<std::size_t, DedRef> ded_block_to_proc_;
    std::size_t max_block_ = 0;
};

// Desk-scale stand-in for an infinite path: an increasing chain of nodes
// on one branch, plus the regions the puncture removes.
struct PunctureSpec {
    std::vector<Word> chain;

    std::string to_json() const;
    static PunctureSpec from_json(const std::string& text);
};

struct RemovedRegion {
    Region region;          // in A-tilde coordinates
    std::size_t node;       // the chain node it codes
    std::size_t effective_len; // |sigma| for value regions, |sigma|-m-1 for answers
    bool is_value_region;
};

// The regions a puncture along `spec.chain` removes from a full oracle of
// A: every chain node's value region, and the answer regions of its
// deduction procedures except those that depend on the previous chain
// node's bit.
std::vector<RemovedRegion> puncture_regions(const CodedTree& t, const PunctureSpec& spec);

} // namespace d1
