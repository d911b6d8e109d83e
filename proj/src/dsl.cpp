#include "d1/dsl.hpp"

#include "d1/tree.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace d1 {

namespace {

struct Lexer {
    const std::string& text;
    std::size_t pos = 0;
    std::size_t line = 1;
    std::size_t col = 1;

    explicit Lexer(const std::string& t) : text(t) {}

    [[noreturn]] void fail(const std::string& what) const { throw parse_error(line, col, what); }

    void advance() {
        if (text[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            advance();
    }

    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of input");
        return text[pos];
    }

    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        advance();
    }

    bool consume(char c) {
        if (!at_end() && peek() == c) {
            advance();
            return true;
        }
        return false;
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            advance();
        if (start == pos) fail("expected identifier");
        return text.substr(start, pos - start);
    }

    Nat nat() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
            advance();
        if (start == pos) fail("expected number");
        return Nat(text.substr(start, pos - start));
    }

    // Bare token up to the closing paren: used for file-path arguments.
    std::string raw_until_rparen() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && text[pos] != ')') advance();
        std::string out = text.substr(start, pos - start);
        while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back())))
            out.pop_back();
        if (out.empty()) fail("expected file path");
        return out;
    }
};

std::set<Nat> parse_nat_set(Lexer& lx) {
    std::set<Nat> out;
    lx.expect('{');
    if (lx.peek() != '}') {
        out.insert(lx.nat());
        while (lx.consume(',')) out.insert(lx.nat());
    }
    lx.expect('}');
    return out;
}

GrowthFunction parse_growth_expr(Lexer& lx) {
    std::string id = lx.ident();
    if (id == "exp2") return GrowthFunction::exp2();
    if (id == "poly") {
        lx.expect('(');
        std::vector<Nat> coeffs;
        if (lx.peek() != ')') {
            coeffs.push_back(lx.nat());
            while (lx.consume(',')) coeffs.push_back(lx.nat());
        }
        lx.expect(')');
        return GrowthFunction::poly(std::move(coeffs));
    }
    if (id == "table") {
        lx.expect('{');
        std::vector<Nat> values;
        if (lx.peek() != ';') {
            values.push_back(lx.nat());
            while (lx.consume(',')) values.push_back(lx.nat());
        }
        lx.expect(';');
        Nat tail = lx.nat();
        lx.expect('}');
        return GrowthFunction::table(std::move(values), std::move(tail));
    }
    if (id == "max") {
        lx.expect('(');
        GrowthFunction a = parse_growth_expr(lx);
        lx.expect(',');
        GrowthFunction b = parse_growth_expr(lx);
        lx.expect(')');
        return GrowthFunction::max(std::move(a), std::move(b));
    }
    lx.fail("unknown growth function '" + id + "'");
}

Bitstream parse_stream_expr(Lexer& lx) {
    std::string id = lx.ident();
    if (id == "all") return Bitstream::all();
    if (id == "none") return Bitstream::none();
    if (id == "evens") return Bitstream::evens();
    if (id == "odds") return Bitstream::odds();
    if (id == "set") return Bitstream::finite(parse_nat_set(lx));
    if (id == "cofinite") return Bitstream::cofinite(parse_nat_set(lx));
    if (id == "periodic") {
        lx.expect('(');
        std::vector<std::uint8_t> word;
        while (true) {
            char c = lx.peek();
            if (c == '0' || c == '1') {
                word.push_back(c == '1' ? 1 : 0);
                lx.advance();
            } else if (c == ',') {
                lx.advance();
            } else {
                break;
            }
        }
        lx.expect(')');
        return Bitstream::periodic(std::move(word));
    }
    auto unary = [&](auto make) {
        lx.expect('(');
        Bitstream a = parse_stream_expr(lx);
        lx.expect(')');
        return make(std::move(a));
    };
    auto binary = [&](auto make) {
        lx.expect('(');
        Bitstream a = parse_stream_expr(lx);
        lx.expect(',');
        Bitstream b = parse_stream_expr(lx);
        lx.expect(')');
        return make(std::move(a), std::move(b));
    };
    if (id == "compl") return unary(&Bitstream::complement);
    if (id == "union") return binary(&Bitstream::union_of);
    if (id == "inter") return binary(&Bitstream::intersect);
    if (id == "join") return binary(&Bitstream::join);
    if (id == "r") return unary(&Bitstream::r_embed);
    if (id == "obs15") return unary(&Bitstream::obs15);
    if (id == "slowdense") {
        lx.expect('(');
        GrowthFunction f = parse_growth_expr(lx);
        lx.expect(')');
        return Bitstream::slow_density(std::move(f));
    }
    if (id == "sparsecompl") {
        lx.expect('(');
        std::string inner = lx.ident();
        if (inner != "set") lx.fail("sparsecompl takes a set{...} argument");
        SparseSet s{parse_nat_set(lx)};
        lx.expect(')');
        return Bitstream::sparse_complement(std::move(s));
    }
    if (id == "pi11a" || id == "pi11b") {
        lx.expect('(');
        std::string path = lx.raw_until_rparen();
        lx.expect(')');
        std::ifstream in(path);
        if (!in) lx.fail("cannot open tree file '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        auto tree = std::make_shared<const CodedTree>(CodedTree::from_json(buf.str()));
        return id == "pi11a" ? Bitstream::pi11_a(std::move(tree))
                             : Bitstream::pi11_b(std::move(tree));
    }
    lx.fail("unknown identifier '" + id + "'");
}

} // namespace

Bitstream parse_stream(const std::string& text) {
    Lexer lx(text);
    Bitstream s = parse_stream_expr(lx);
    if (!lx.at_end()) lx.fail("trailing input after expression");
    return s;
}

GrowthFunction parse_growth(const std::string& text) {
    Lexer lx(text);
    GrowthFunction g = parse_growth_expr(lx);
    if (!lx.at_end()) lx.fail("trailing input after growth function");
    return g;
}

} // namespace d1
