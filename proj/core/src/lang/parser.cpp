#include "cqp/lang/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <unordered_set>

namespace cqp::lang {

namespace {

enum class Tok {
    Ident,
    Int,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Semi,
    Colon,
    Question,
    Bang,
    Bar,
    Plus,
    Minus,
    StarEq,
    Caret,
    Equals,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    long long value = 0;
    SourcePos pos;
};

const std::set<std::string, std::less<>> kKeywords = {"dim", "main", "qdit", "new", "measure", "Int",
                                                      "Val", "Qdit", "Qbit", "Op",  "NS"};

std::string describe(const Token &t) {
    switch (t.kind) {
    case Tok::End:
        return "end of input";
    case Tok::Ident:
        return "'" + t.text + "'";
    case Tok::Int:
        return "integer " + t.text;
    default:
        return "'" + t.text + "'";
    }
}

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') {
                advance(1);
            }
            continue;
        }
        const SourcePos pos{line, col};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
                ++j;
            }
            out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), 0, pos});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
                ++j;
            }
            Token t{Tok::Int, std::string(src.substr(i, j - i)), 0, pos};
            const auto res = std::from_chars(src.data() + i, src.data() + j, t.value);
            if (res.ec != std::errc{}) {
                throw ParseError(pos, "integer literal out of range");
            }
            out.push_back(std::move(t));
            advance(j - i);
            continue;
        }
        if (c == '*' && i + 1 < src.size() && src[i + 1] == '=') {
            out.push_back({Tok::StarEq, "*=", 0, pos});
            advance(2);
            continue;
        }
        Tok kind;
        switch (c) {
        case '(': kind = Tok::LParen; break;
        case ')': kind = Tok::RParen; break;
        case '[': kind = Tok::LBracket; break;
        case ']': kind = Tok::RBracket; break;
        case '{': kind = Tok::LBrace; break;
        case '}': kind = Tok::RBrace; break;
        case ',': kind = Tok::Comma; break;
        case '.': kind = Tok::Dot; break;
        case ';': kind = Tok::Semi; break;
        case ':': kind = Tok::Colon; break;
        case '?': kind = Tok::Question; break;
        case '!': kind = Tok::Bang; break;
        case '|': kind = Tok::Bar; break;
        case '+': kind = Tok::Plus; break;
        case '-': kind = Tok::Minus; break;
        case '^': kind = Tok::Caret; break;
        case '=': kind = Tok::Equals; break;
        default:
            throw ParseError(pos, std::string("unexpected character '") + c + "'");
        }
        out.push_back({kind, std::string(1, c), 0, pos});
        advance(1);
    }
    out.push_back({Tok::End, "", 0, {line, col}});
    return out;
}

class Parser {
  public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Program program(std::optional<int> dim_override) {
        Program prog;
        std::optional<int> header;
        if (is_ident("dim")) {
            const auto at = next().pos;
            const auto &n = expect(Tok::Int, "dimension after 'dim'");
            if (n.value < 2) {
                throw ParseError(at, "dimension must be at least 2");
            }
            header = static_cast<int>(n.value);
            expect(Tok::Semi, "';' after dimension");
        }
        prog.dim = dim_override.value_or(header.value_or(2));
        if (prog.dim < 2) {
            throw ParseError({1, 1}, "dimension must be at least 2");
        }
        std::unordered_set<std::string> names;
        while (peek().kind != Tok::End) {
            if (is_ident("main")) {
                const auto at = next().pos;
                if (prog.main) {
                    throw ParseError(at, "duplicate 'main' entry");
                }
                expect(Tok::Equals, "'=' after 'main'");
                prog.main = process();
            } else {
                Definition def = definition();
                if (!names.insert(def.name).second) {
                    throw ParseError(def.pos, "duplicate definition '" + def.name + "'");
                }
                prog.definitions.push_back(std::move(def));
            }
            accept(Tok::Semi);
        }
        if (!prog.main) {
            throw ParseError(peek().pos, "program has no 'main = ...' entry");
        }
        return prog;
    }

    ProcPtr lone_process() {
        auto p = process();
        if (peek().kind != Tok::End) {
            throw ParseError(peek().pos, "unexpected " + describe(peek()) + " after process");
        }
        return p;
    }

  private:
    std::vector<Token> toks_;
    std::size_t at_ = 0;
    // Names bound by enclosing parameters and input binders; only these may
    // stand for a gate in `targets *= G`.
    std::vector<std::string> scope_;

    bool in_scope(const std::string &name) const {
        return std::find(scope_.rbegin(), scope_.rend(), name) != scope_.rend();
    }

    const Token &peek(std::size_t ahead = 0) const { return toks_[std::min(at_ + ahead, toks_.size() - 1)]; }
    const Token &next() { return toks_[at_ < toks_.size() - 1 ? at_++ : at_]; }

    bool accept(Tok k) {
        if (peek().kind == k) {
            next();
            return true;
        }
        return false;
    }

    const Token &expect(Tok k, const std::string &what) {
        if (peek().kind != k) {
            throw ParseError(peek().pos, "expected " + what + ", found " + describe(peek()));
        }
        return next();
    }

    bool is_ident(std::string_view text, std::size_t ahead = 0) const {
        return peek(ahead).kind == Tok::Ident && peek(ahead).text == text;
    }

    std::string identifier(const std::string &what) {
        const auto &t = expect(Tok::Ident, what);
        if (kKeywords.contains(t.text) || gate_from_name(t.text)) {
            throw ParseError(t.pos, "'" + t.text + "' is reserved and cannot be used as " + what);
        }
        return t.text;
    }

    Definition definition() {
        Definition def;
        def.pos = peek().pos;
        def.name = identifier("a definition name");
        expect(Tok::LParen, "'(' after definition name");
        std::unordered_set<std::string> seen;
        if (peek().kind != Tok::RParen) {
            do {
                const auto at = peek().pos;
                Param p;
                p.name = identifier("a parameter name");
                expect(Tok::Colon, "':' after parameter name");
                p.type = type();
                if (!seen.insert(p.name).second) {
                    throw ParseError(at, "duplicate parameter '" + p.name + "'");
                }
                def.params.push_back(std::move(p));
            } while (accept(Tok::Comma));
        }
        expect(Tok::RParen, "')' closing the parameter list");
        expect(Tok::Equals, "'=' after definition header");
        for (const auto &p : def.params) {
            scope_.push_back(p.name);
        }
        def.body = process();
        scope_.resize(scope_.size() - def.params.size());
        return def;
    }

    TypeExpr type() {
        const auto &t = peek();
        if (t.kind == Tok::Caret) {
            next();
            expect(Tok::LBracket, "'[' after '^' in a channel type");
            std::vector<TypeExpr> payload;
            do {
                payload.push_back(type());
            } while (accept(Tok::Comma));
            expect(Tok::RBracket, "']' closing a channel type");
            return TypeExpr::chan(std::move(payload));
        }
        if (t.kind != Tok::Ident) {
            throw ParseError(t.pos, "expected a type, found " + describe(t));
        }
        if (t.text == "Int" || t.text == "Val") {
            next();
            return TypeExpr::integer();
        }
        if (t.text == "Qdit" || t.text == "Qbit") {
            next();
            return TypeExpr::qdit();
        }
        if (t.text == "Op") {
            next();
            expect(Tok::LParen, "'(' after 'Op'");
            const auto &n = expect(Tok::Int, "operator arity");
            if (n.value < 1) {
                throw ParseError(n.pos, "operator arity must be at least 1");
            }
            const int arity = static_cast<int>(n.value);
            expect(Tok::RParen, "')' after operator arity");
            return TypeExpr::op(arity);
        }
        if (t.text == "NS") {
            throw ParseError(t.pos, "type NS is reserved and not supported");
        }
        throw ParseError(t.pos, "unknown type " + describe(t));
    }

    // par := sum ('|' sum)*
    ProcPtr process() {
        auto left = sum();
        while (peek().kind == Tok::Bar) {
            const auto pos = next().pos;
            auto right = sum();
            left = make_proc(proc::Par{left, right}, pos);
        }
        return left;
    }

    // sum := prefixed ('+' prefixed)*
    ProcPtr sum() {
        auto left = prefixed();
        while (peek().kind == Tok::Plus) {
            const auto pos = next().pos;
            auto right = prefixed();
            left = make_proc(proc::Sum{left, right}, pos);
        }
        return left;
    }

    ProcPtr continuation() {
        expect(Tok::Dot, "'.' before the continuation");
        return prefixed();
    }

    ProcPtr prefixed() {
        const Token t = peek();
        switch (t.kind) {
        case Tok::Int:
            if (t.value != 0) {
                throw ParseError(t.pos, "expected a process, found " + describe(t));
            }
            next();
            return make_proc(proc::Nil{}, t.pos);
        case Tok::LParen:
            if (is_ident("qdit", 1)) {
                next();
                next();
                std::vector<std::string> names;
                std::unordered_set<std::string> seen;
                do {
                    const auto at = peek().pos;
                    auto n = identifier("a qudit name");
                    if (!seen.insert(n).second) {
                        throw ParseError(at, "qudit '" + n + "' declared twice");
                    }
                    names.push_back(std::move(n));
                } while (accept(Tok::Comma));
                expect(Tok::RParen, "')' after qudit declaration");
                return make_proc(proc::QditDecl{std::move(names), prefixed()}, t.pos);
            }
            if (is_ident("new", 1)) {
                next();
                next();
                auto name = identifier("a channel name");
                expect(Tok::Colon, "':' and a channel type after the restricted name");
                auto ty = type();
                if (ty.kind != TypeExpr::Kind::Chan) {
                    throw ParseError(t.pos, "restricted name '" + name + "' must have a channel type");
                }
                expect(Tok::RParen, "')' after channel restriction");
                return make_proc(proc::NewChan{std::move(name), std::move(ty), prefixed()}, t.pos);
            }
            {
                next();
                auto p = process();
                expect(Tok::RParen, "')' closing a parenthesized process");
                return p;
            }
        case Tok::LBrace: {
            next();
            auto e = action_expr();
            expect(Tok::RBrace, "'}' closing an action");
            return make_proc(proc::Action{std::move(e), continuation()}, t.pos);
        }
        case Tok::LBracket: {
            next();
            auto e = action_expr();
            expect(Tok::RBracket, "']' closing an evaluation");
            return make_proc(proc::Eval{std::move(e), continuation()}, t.pos);
        }
        case Tok::Ident: {
            if (peek(1).kind == Tok::Question) {
                auto chan = var(identifier("a channel name"), t.pos);
                next();
                expect(Tok::LBracket, "'[' after '?'");
                std::vector<Binder> binders;
                std::unordered_set<std::string> seen;
                do {
                    const auto at = peek().pos;
                    Binder b;
                    b.name = identifier("an input variable");
                    expect(Tok::Colon, "':' after input variable");
                    b.type = type();
                    if (!seen.insert(b.name).second) {
                        throw ParseError(at, "input variable '" + b.name + "' bound twice");
                    }
                    binders.push_back(std::move(b));
                } while (accept(Tok::Comma));
                expect(Tok::RBracket, "']' closing the input binders");
                for (const auto &b : binders) {
                    scope_.push_back(b.name);
                }
                auto body = continuation();
                scope_.resize(scope_.size() - binders.size());
                return make_proc(proc::Input{std::move(chan), std::move(binders), std::move(body)}, t.pos);
            }
            if (peek(1).kind == Tok::Bang) {
                auto chan = var(identifier("a channel name"), t.pos);
                next();
                expect(Tok::LBracket, "'[' after '!'");
                std::vector<ExprPtr> payload;
                if (peek().kind != Tok::RBracket) {
                    do {
                        payload.push_back(expression());
                    } while (accept(Tok::Comma));
                }
                expect(Tok::RBracket, "']' closing the output payload");
                return make_proc(proc::Output{std::move(chan), std::move(payload), continuation()}, t.pos);
            }
            if (peek(1).kind == Tok::LParen) {
                auto name = identifier("a definition name");
                next();
                std::vector<ExprPtr> args;
                if (peek().kind != Tok::RParen) {
                    do {
                        args.push_back(expression());
                    } while (accept(Tok::Comma));
                }
                expect(Tok::RParen, "')' closing the argument list");
                return make_proc(proc::Call{std::move(name), std::move(args)}, t.pos);
            }
            throw ParseError(t.pos, "expected '?', '!' or '(' after " + describe(t));
        }
        default:
            throw ParseError(t.pos, "expected a process, found " + describe(t));
        }
    }

    // Either a single expression or `targets *= gate`.
    ExprPtr action_expr() {
        const auto pos = peek().pos;
        std::vector<ExprPtr> items;
        do {
            items.push_back(expression());
        } while (accept(Tok::Comma));
        if (peek().kind == Tok::StarEq) {
            next();
            auto gate = gate_atom();
            ExprPtr power = int_lit(1, pos);
            if (accept(Tok::Caret)) {
                power = gate_power();
            }
            return make_expr(expr::ApplyGate{std::move(items), std::move(gate), std::move(power)}, pos);
        }
        if (items.size() != 1) {
            throw ParseError(pos, "expected '*=' after a list of gate targets");
        }
        return items.front();
    }

    ExprPtr gate_atom() {
        const auto &t = peek();
        if (t.kind == Tok::Ident) {
            if (auto g = gate_from_name(t.text)) {
                next();
                return gate_lit(*g, t.pos);
            }
            if (!kKeywords.contains(t.text) && !in_scope(t.text)) {
                throw ParseError(t.pos, "unknown gate name '" + t.text + "'");
            }
            return var(identifier("a gate"), t.pos);
        }
        throw ParseError(t.pos, "expected a gate (H, X, Z, RC, LC or a variable), found " + describe(t));
    }

    ExprPtr gate_power() {
        const auto &t = peek();
        if (t.kind == Tok::Minus) {
            next();
            const auto &u = peek();
            if (u.kind == Tok::Int) {
                next();
                return int_lit(-u.value, t.pos);
            }
            if (u.kind == Tok::Ident) {
                return make_expr(expr::Neg{var(identifier("an exponent"), u.pos)}, t.pos);
            }
            expect(Tok::LParen, "an exponent after '-'");
            auto e = expression();
            expect(Tok::RParen, "')' closing the exponent");
            return make_expr(expr::Neg{std::move(e)}, t.pos);
        }
        if (t.kind == Tok::Int) {
            next();
            return int_lit(t.value, t.pos);
        }
        if (t.kind == Tok::Ident) {
            return var(identifier("an exponent"), t.pos);
        }
        expect(Tok::LParen, "an exponent after '^'");
        auto e = expression();
        expect(Tok::RParen, "')' closing the exponent");
        return e;
    }

    // expr := term ('+' term)*
    ExprPtr expression() {
        auto left = term();
        while (peek().kind == Tok::Plus) {
            const auto pos = next().pos;
            auto right = term();
            left = make_expr(expr::Plus{left, right}, pos);
        }
        return left;
    }

    ExprPtr term() {
        if (is_ident("measure")) {
            const auto pos = next().pos;
            std::vector<ExprPtr> targets;
            if (accept(Tok::LParen)) {
                do {
                    targets.push_back(expression());
                } while (accept(Tok::Comma));
                expect(Tok::RParen, "')' closing the measured qudits");
            } else {
                targets.push_back(unary());
            }
            return make_expr(expr::Measure{std::move(targets)}, pos);
        }
        return unary();
    }

    ExprPtr unary() {
        const auto &t = peek();
        if (t.kind == Tok::Minus) {
            next();
            if (peek().kind == Tok::Int) {
                return int_lit(-next().value, t.pos);
            }
            return make_expr(expr::Neg{unary()}, t.pos);
        }
        return primary();
    }

    ExprPtr primary() {
        const Token t = peek();
        switch (t.kind) {
        case Tok::Int:
            next();
            return int_lit(t.value, t.pos);
        case Tok::Ident:
            if (auto g = gate_from_name(t.text)) {
                next();
                return gate_lit(*g, t.pos);
            }
            return var(identifier("a variable"), t.pos);
        case Tok::LParen: {
            next();
            auto e = expression();
            expect(Tok::RParen, "')' closing a parenthesized expression");
            return e;
        }
        default:
            throw ParseError(t.pos, "expected an expression, found " + describe(t));
        }
    }
};

}  // namespace

Program parse_program(std::string_view text, std::optional<int> dim_override) {
    Parser p(lex(text));
    return p.program(dim_override);
}

ProcPtr parse_process(std::string_view text) {
    Parser p(lex(text));
    return p.lone_process();
}

}  // namespace cqp::lang
