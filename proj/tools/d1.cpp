// Command-line front end: parse stream/growth expressions and tree files,
// run the builders, decoders, and certifiers, and emit CSV/JSON artifacts.
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include "d1/bitstream.hpp"
#include "d1/dsl.hpp"
#include "d1/finmodel.hpp"
#include "d1/modulus.hpp"
#include "d1/oracle.hpp"
#include "d1/pi11.hpp"
#include "d1/rembed.hpp"
#include "d1/sparse.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace d1;

// "-" means stdout; anything else is a file path.
void emit(const std::string& target, const std::string& payload) {
    if (target == "-") {
        std::cout << payload;
        return;
    }
    std::ofstream out(target, std::ios::binary);
    if (!out) throw domain_error("cannot open output file: " + target);
    out << payload;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw domain_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::set<Nat> parse_nat_list(const std::string& text) {
    std::set<Nat> out;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, ',')) {
        std::size_t a = item.find_first_not_of(" \t");
        std::size_t b = item.find_last_not_of(" \t");
        if (a == std::string::npos) continue;
        out.insert(Nat(item.substr(a, b - a + 1)));
    }
    return out;
}

std::vector<std::uint8_t> parse_word(const std::string& text) {
    std::vector<std::uint8_t> out;
    for (char c : text) {
        if (c == '0' || c == '1') out.push_back(c == '1');
        else if (!std::isspace(static_cast<unsigned char>(c)))
            throw domain_error(std::string("word must be over {0,1}, got '") + c + "'");
    }
    return out;
}

std::string bits_to_string(const std::vector<std::uint8_t>& bits) {
    std::string s;
    s.reserve(bits.size());
    for (std::uint8_t b : bits) s.push_back(b ? '1' : '0');
    return s;
}

struct Globals {
    Nat fuel{100000};
    std::size_t upto = 10000;
};

void emit_profile(const DensityProfile& p, const std::string& expr, const Globals& g,
                  const std::string& csv, const std::string& json) {
    if (!csv.empty()) emit(csv, p.to_csv());
    if (!json.empty() || csv.empty()) emit(json.empty() ? "-" : json, p.to_json(expr, g.fuel));
}

PartialOracle oracle_from_flags(const Bitstream& base, const std::string& kind,
                                const std::string& mask_expr) {
    if (kind == "full") {
        if (!mask_expr.empty())
            return PartialOracle::masked(base, parse_stream(mask_expr));
        return PartialOracle::full(base);
    }
    if (kind == "empty") return PartialOracle::empty();
    throw domain_error("unknown oracle kind: " + kind + " (expected full or empty)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"density-1 stream laboratory"};
    app.require_subcommand(1);
    // Let --fuel/--upto appear after the subcommand name too.
    app.fallthrough();

    Globals g;
    std::string fuel_text = "100000";
    app.add_option("--fuel", fuel_text, "global fuel budget (default 100000)");
    app.add_option("--upto", g.upto, "global index horizon (default 10000)");

    // --- density ---------------------------------------------------------
    std::string d_expr, d_csv, d_json;
    auto* density = app.add_subcommand("density", "density profile of a stream expression");
    density->add_option("--expr", d_expr, "stream expression")->required();
    density->add_option("--csv", d_csv, "CSV output path, - for stdout");
    density->add_option("--json", d_json, "JSON output path, - for stdout");

    // --- encode-r --------------------------------------------------------
    std::string er_expr;
    auto* encode_r = app.add_subcommand("encode-r", "prefix of the degree embedding r(expr)");
    encode_r->add_option("--expr", er_expr, "source stream expression")->required();

    // --- decode-r --------------------------------------------------------
    std::string dr_expr, dr_mask;
    std::size_t dr_bits = 16;
    auto* decode_r =
        app.add_subcommand("decode-r", "decode source bits from an oracle of an embedded stream");
    decode_r->add_option("--expr", dr_expr, "embedded stream expression")->required();
    decode_r->add_option("--bits", dr_bits, "number of source bits to decode");
    decode_r->add_option("--mask", dr_mask, "mask stream for a masked oracle");

    // --- slowdense -------------------------------------------------------
    std::string sd_growth, sd_csv, sd_json;
    auto* slowdense = app.add_subcommand("slowdense", "profile of the slow-density stream of f");
    slowdense->add_option("--growth", sd_growth, "growth expression, e.g. exp2")->required();
    slowdense->add_option("--csv", sd_csv, "CSV output path, - for stdout");
    slowdense->add_option("--json", sd_json, "JSON output path, - for stdout");

    // --- recover ---------------------------------------------------------
    std::string rc_expr;
    std::size_t rc_m = 0;
    auto* recover = app.add_subcommand("recover", "first index witnessing density 1 - 2^{-m}");
    recover->add_option("--expr", rc_expr, "stream expression served by a full oracle")
        ->required();
    recover->add_option("--m", rc_m, "threshold exponent")->required();

    // --- tg --------------------------------------------------------------
    std::string tg_growth, tg_word;
    auto* tg = app.add_subcommand("tg", "membership of a 01-word in the tree T_g");
    tg->add_option("--growth", tg_growth, "growth expression")->required();
    tg->add_option("--word", tg_word, "01-word")->required();

    // --- sparse ----------------------------------------------------------
    auto* sparse = app.add_subcommand("sparse", "sparse-by-design set calculus");
    sparse->require_subcommand(1);
    std::string sp_set;
    auto* sp_check = sparse->add_subcommand("check", "verify the 2^{l+1} per-block bound");
    sp_check->add_option("--set", sp_set, "comma-separated members")->required();
    std::string sh_set;
    std::size_t sh_stage = 0;
    auto* sp_half = sparse->add_subcommand("half", "stage-k block halving");
    sp_half->add_option("--set", sh_set, "comma-separated members")->required();
    sp_half->add_option("--stage", sh_stage, "halving stage k");
    std::vector<std::string> sc_parts;
    auto* sp_certify = sparse->add_subcommand("certify", "assembly bound certificate");
    sp_certify->add_option("--part", sc_parts, "stage:members, e.g. 1:5,30,31 (repeatable)")
        ->required();

    // --- cutting-sweep ---------------------------------------------------
    std::size_t cs_prefix = 2, cs_values = 2, cs_setsize = 2, cs_inputs = 2;
    auto* cutting = app.add_subcommand("cutting-sweep", "exhaustive finite-model cutting check");
    cutting->add_option("--prefix-len", cs_prefix, "max function-prefix length");
    cutting->add_option("--value-bound", cs_values, "max value bound");
    cutting->add_option("--set-size", cs_setsize, "max |S|");
    cutting->add_option("--input-bound", cs_inputs, "input universe size");

    // --- pi11 ------------------------------------------------------------
    auto* pi11 = app.add_subcommand("pi11", "tree-to-real-pair codec");
    pi11->require_subcommand(1);
    std::string pb_tree, pb_stream = "b";
    auto* pi_build = pi11->add_subcommand("build", "prefix of the coded stream A or B");
    pi_build->add_option("--tree", pb_tree, "coded-tree JSON file")->required();
    pi_build->add_option("--stream", pb_stream, "a or b (default b)");
    std::string pd_tree, pd_oracle = "full", pd_mask, pd_spec;
    auto* pi_decode = pi11->add_subcommand("decode", "decode B bits through an oracle of A");
    pi_decode->add_option("--tree", pd_tree, "coded-tree JSON file")->required();
    pi_decode->add_option("--oracle", pd_oracle, "full or empty (default full)");
    pi_decode->add_option("--mask", pd_mask, "mask stream for a masked full oracle");
    std::string pp_tree, pp_spec;
    auto* pi_puncture = pi11->add_subcommand("puncture", "decode under a punctured oracle");
    pi_puncture->add_option("--tree", pp_tree, "coded-tree JSON file")->required();
    pi_puncture->add_option("--spec", pp_spec, "puncture-spec JSON file")->required();
    std::string pc_tree, pc_spec;
    std::size_t pc_maxm = 8;
    auto* pi_certify = pi11->add_subcommand("certify", "exact puncture certificate");
    pi_certify->add_option("--tree", pc_tree, "coded-tree JSON file")->required();
    pi_certify->add_option("--spec", pc_spec, "puncture-spec JSON file")->required();
    pi_certify->add_option("--max-m", pc_maxm, "largest threshold exponent (default 8)");

    // --- consensus -------------------------------------------------------
    std::string cn_growth, cn_table, cn_input = "0";
    std::size_t cn_height = 6, cn_x0 = 6;
    auto* consensus = app.add_subcommand("consensus", "bounded consensus decoding over T_g");
    consensus->add_option("--growth", cn_growth, "growth expression")->required();
    consensus->add_option("--table", cn_table, "decision-table JSON file")->required();
    consensus->add_option("--input", cn_input, "functional input n");
    consensus->add_option("--height", cn_height, "word height bound");
    consensus->add_option("--x0", cn_x0, "X0-prefix length bound");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2; // normalize every usage error to 2
    }

    try {
        g.fuel = Nat(fuel_text);

        if (*density) {
            DensityProfile p = DensityProfile::of(parse_stream(d_expr), g.upto);
            emit_profile(p, d_expr, g, d_csv, d_json);
        } else if (*encode_r) {
            Bitstream coded = Bitstream::r_embed(parse_stream(er_expr));
            std::cout << bits_to_string(coded.prefix(g.upto)) << "\n";
        } else if (*decode_r) {
            PartialOracle o = oracle_from_flags(parse_stream(dr_expr), "full", dr_mask);
            std::string out;
            for (const auto& b : decode_r_prefix(o, dr_bits, g.fuel))
                out.push_back(!b ? '?' : (*b ? '1' : '0'));
            std::cout << out << "\n";
        } else if (*slowdense) {
            Bitstream s = Bitstream::slow_density(parse_growth(sd_growth));
            DensityProfile p = DensityProfile::of(s, g.upto);
            emit_profile(p, "slowdense(" + sd_growth + ")", g, sd_csv, sd_json);
        } else if (*recover) {
            auto n = recover_dominating(PartialOracle::full(parse_stream(rc_expr)), rc_m, g.fuel);
            std::cout << (n ? n->str() : std::string("none")) << "\n";
        } else if (*tg) {
            bool in = tg_member(parse_growth(tg_growth), parse_word(tg_word));
            std::cout << (in ? "1" : "0") << "\n";
        } else if (*sparse) {
            if (*sp_check) {
                std::cout << (sparse_check(SparseSet(parse_nat_list(sp_set))) ? "sparse"
                                                                              : "not-sparse")
                          << "\n";
            } else if (*sp_half) {
                BlockHalves h = block_half(SparseSet(parse_nat_list(sh_set)), sh_stage);
                nlohmann::json j;
                j["stage"] = sh_stage;
                for (auto [key, part] : {std::pair<const char*, const SparseSet*>{"first",
                                                                                  &h.first},
                                         {"second", &h.second}}) {
                    nlohmann::json arr = nlohmann::json::array();
                    for (const Nat& x : part->members()) arr.push_back(x.str());
                    j[key] = arr;
                }
                std::cout << j.dump(2) << "\n";
            } else {
                std::vector<StagedPart> parts;
                for (const std::string& spec : sc_parts) {
                    std::size_t colon = spec.find(':');
                    if (colon == std::string::npos)
                        throw domain_error("--part wants stage:members, got " + spec);
                    StagedPart part;
                    part.stage = std::stoul(spec.substr(0, colon));
                    part.set = SparseSet(parse_nat_list(spec.substr(colon + 1)));
                    parts.push_back(std::move(part));
                }
                AssembleReport r = assemble_bound_check(parts);
                nlohmann::json j;
                j["ok"] = r.ok;
                if (r.offending_block) j["offending_block"] = *r.offending_block;
                if (r.offending_part) j["offending_part"] = *r.offending_part;
                if (!r.reason.empty()) j["reason"] = r.reason;
                std::cout << j.dump(2) << "\n";
                return r.ok ? 0 : 1;
            }
        } else if (*cutting) {
            SweepReport r = cutting_sweep(cs_prefix, cs_values, cs_setsize, cs_inputs);
            nlohmann::json j;
            j["models"] = r.models;
            j["with_qualifying_f"] = r.with_qualifying_f;
            j["cutting_failures"] = r.cutting_failures;
            j["max_witness_failures"] = r.max_witness_failures;
            std::cout << j.dump(2) << "\n";
            return (r.cutting_failures == 0 && r.max_witness_failures == 0) ? 0 : 1;
        } else if (*pi11) {
            if (*pi_build) {
                auto t = std::make_shared<const CodedTree>(CodedTree::from_json(slurp(pb_tree)));
                if (pb_stream != "a" && pb_stream != "b")
                    throw domain_error("--stream must be a or b");
                Bitstream s = pb_stream == "a" ? build_a(t) : build_b(t);
                std::cout << bits_to_string(s.prefix(g.upto)) << "\n";
            } else if (*pi_decode || *pi_puncture) {
                bool punctured = static_cast<bool>(*pi_puncture);
                const std::string& tree_path = punctured ? pp_tree : pd_tree;
                auto t =
                    std::make_shared<const CodedTree>(CodedTree::from_json(slurp(tree_path)));
                PartialOracle o = punctured
                                      ? puncture(t, PunctureSpec::from_json(slurp(pp_spec)))
                                      : oracle_from_flags(build_a(t), pd_oracle, pd_mask);
                DeterminedBits bits(o, t, g.fuel);
                std::string out;
                for (std::size_t n = 0; n < g.upto; ++n) {
                    auto b = decode_b_bit(o, bits, t, Nat(n), g.fuel);
                    out.push_back(!b ? '?' : (*b ? '1' : '0'));
                }
                nlohmann::json j;
                j["schema"] = "decoded-bits/1";
                j["fuel"] = g.fuel.str();
                j["upto"] = g.upto;
                j["bits"] = out;
                std::cout << j.dump(2) << "\n";
            } else {
                CodedTree t = CodedTree::from_json(slurp(pc_tree));
                PunctureSpec spec = PunctureSpec::from_json(slurp(pc_spec));
                std::cout << certify_puncture(t, spec, pc_maxm).to_json();
            }
        } else if (*consensus) {
            GrowthFunction gf = parse_growth(cn_growth);
            Functional f = Functional::table(DecisionTable::from_json(slurp(cn_table)));
            Consensus c = consensus_decode(gf, f, Nat(cn_input), cn_height, cn_x0, g.fuel);
            std::cout << (c == Consensus::One ? "1" : c == Consensus::Zero ? "0" : "none")
                      << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
