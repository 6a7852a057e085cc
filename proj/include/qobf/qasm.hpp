#pragma once

#include <algorithm>
#include <cctype>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qobf/circuit.hpp"

namespace qobf {

struct QasmError : std::runtime_error {
    enum class Code { syntax, unsupported, range };
    Code code;
    int line;
    int col;
    QasmError(Code c, int ln, int cl, const std::string& what)
        : std::runtime_error("line " + std::to_string(ln) + ", col " +
                             std::to_string(cl) + ": " + what),
          code(c), line(ln), col(cl) {}
};

namespace detail {

struct Token {
    enum class Type { ident, number, symbol, str, eof };
    Type type = Type::eof;
    std::string text;
    double value = 0.0;
    int line = 1;
    int col = 1;
};

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_ws_and_comments();
        Token tok;
        tok.line = line_;
        tok.col = col_;
        if (pos_ >= src_.size()) return tok;
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string s;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                    src_[pos_] == '_'))
                s.push_back(take());
            tok.type = Token::Type::ident;
            tok.text = std::move(s);
            return tok;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::string s;
            while (pos_ < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
                    src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E' ||
                    ((src_[pos_] == '+' || src_[pos_] == '-') && !s.empty() &&
                     (s.back() == 'e' || s.back() == 'E'))))
                s.push_back(take());
            tok.type = Token::Type::number;
            tok.text = s;
            try {
                tok.value = std::stod(s);
            } catch (const std::exception&) {
                throw QasmError(QasmError::Code::syntax, tok.line, tok.col,
                                "malformed number '" + s + "'");
            }
            return tok;
        }
        if (c == '"') {
            take();
            std::string s;
            while (pos_ < src_.size() && src_[pos_] != '"') s.push_back(take());
            if (pos_ >= src_.size())
                throw QasmError(QasmError::Code::syntax, tok.line, tok.col,
                                "unterminated string");
            take();
            tok.type = Token::Type::str;
            tok.text = std::move(s);
            return tok;
        }
        if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
            take();
            take();
            tok.type = Token::Type::symbol;
            tok.text = "->";
            return tok;
        }
        static constexpr std::string_view kSymbols = ";,[](){}+-*/=<>!";
        if (kSymbols.find(c) != std::string_view::npos) {
            tok.type = Token::Type::symbol;
            tok.text = std::string(1, take());
            return tok;
        }
        throw QasmError(QasmError::Code::syntax, line_, col_,
                        std::string("unexpected character '") + c + "'");
    }

  private:
    char take() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_ws_and_comments() {
        for (;;) {
            while (pos_ < src_.size() &&
                   std::isspace(static_cast<unsigned char>(src_[pos_])))
                take();
            if (pos_ + 1 < src_.size() && src_[pos_] == '/' &&
                src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') take();
                continue;
            }
            return;
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
  public:
    explicit Parser(std::string_view src) : lex_(src) { advance(); }

    Circuit parse() {
        expect_ident("OPENQASM");
        Token ver = cur_;
        expect_type(Token::Type::number, "version number");
        if (ver.text != "2.0")
            throw QasmError(QasmError::Code::unsupported, ver.line, ver.col,
                            "only OPENQASM 2.0 is supported");
        expect_symbol(";");
        while (cur_.type != Token::Type::eof) statement();
        circuit_.validate();
        return circuit_;
    }

  private:
    void advance() { cur_ = lex_.next(); }

    bool at_ident(std::string_view s) const {
        return cur_.type == Token::Type::ident && cur_.text == s;
    }

    void expect_ident(std::string_view s) {
        if (!at_ident(s))
            throw QasmError(QasmError::Code::syntax, cur_.line, cur_.col,
                            "expected '" + std::string(s) + "'");
        advance();
    }

    void expect_type(Token::Type t, const std::string& what) {
        if (cur_.type != t)
            throw QasmError(QasmError::Code::syntax, cur_.line, cur_.col,
                            "expected " + what);
        advance();
    }

    void expect_symbol(std::string_view s) {
        if (cur_.type != Token::Type::symbol || cur_.text != s)
            throw QasmError(QasmError::Code::syntax, cur_.line, cur_.col,
                            "expected '" + std::string(s) + "'");
        advance();
    }

    bool accept_symbol(std::string_view s) {
        if (cur_.type == Token::Type::symbol && cur_.text == s) {
            advance();
            return true;
        }
        return false;
    }

    int expect_uint() {
        Token t = cur_;
        expect_type(Token::Type::number, "integer");
        for (char c : t.text)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw QasmError(QasmError::Code::syntax, t.line, t.col,
                                "expected integer, got '" + t.text + "'");
        return static_cast<int>(t.value);
    }

    void statement() {
        Token head = cur_;
        if (head.type != Token::Type::ident)
            throw QasmError(QasmError::Code::syntax, head.line, head.col,
                            "expected statement");
        if (head.text == "include") {
            advance();
            Token file = cur_;
            expect_type(Token::Type::str, "include path");
            if (file.text != "qelib1.inc")
                throw QasmError(QasmError::Code::unsupported, file.line,
                                file.col,
                                "unsupported include '" + file.text + "'");
            expect_symbol(";");
            return;
        }
        if (head.text == "qreg" || head.text == "creg") {
            advance();
            Token name = cur_;
            expect_type(Token::Type::ident, "register name");
            expect_symbol("[");
            int size = expect_uint();
            expect_symbol("]");
            expect_symbol(";");
            auto& regs = head.text == "qreg" ? circuit_.qregs : circuit_.cregs;
            int& total = head.text == "qreg" ? circuit_.qubit_count
                                             : circuit_.cbit_count;
            if (regs.count(name.text))
                throw QasmError(QasmError::Code::syntax, name.line, name.col,
                                "register '" + name.text + "' redeclared");
            regs[name.text] = {total, size};
            total += size;
            return;
        }
        if (head.text == "if" || head.text == "gate" || head.text == "opaque" ||
            head.text == "reset") {
            throw QasmError(QasmError::Code::unsupported, head.line, head.col,
                            "'" + head.text + "' statements are not supported");
        }
        if (head.text == "measure") {
            advance();
            auto src = reg_ref(true);
            expect_symbol("->");
            auto dst = reg_ref(false);
            expect_symbol(";");
            if (src.size() != dst.size())
                throw QasmError(QasmError::Code::range, head.line, head.col,
                                "measure operand widths differ");
            for (std::size_t i = 0; i < src.size(); ++i) {
                GateApp g;
                g.kind = GateKind::measure;
                g.qubits = {src[i]};
                g.cbit = dst[i];
                circuit_.gates.push_back(std::move(g));
            }
            return;
        }
        if (head.text == "barrier") {
            advance();
            // Operand list accepted and deliberately widened: every barrier
            // acts on the full qubit set so region splits stay unambiguous.
            if (!accept_symbol(";")) {
                reg_ref(true);
                while (accept_symbol(",")) reg_ref(true);
                expect_symbol(";");
            }
            GateApp g;
            g.kind = GateKind::barrier;
            g.qubits.resize(circuit_.qubit_count);
            for (int q = 0; q < circuit_.qubit_count; ++q) g.qubits[q] = q;
            circuit_.gates.push_back(std::move(g));
            return;
        }
        gate_application(head);
    }

    void gate_application(const Token& head) {
        auto kind = kind_from_name(head.text);
        if (!kind)
            throw QasmError(QasmError::Code::unsupported, head.line, head.col,
                            "unsupported gate '" + head.text + "'");
        advance();
        std::vector<double> params;
        if (accept_symbol("(")) {
            params.push_back(expr());
            while (accept_symbol(",")) params.push_back(expr());
            expect_symbol(")");
        }
        const auto& in = info(*kind);
        if (static_cast<int>(params.size()) != in.param_arity)
            throw QasmError(QasmError::Code::syntax, head.line, head.col,
                            "gate '" + head.text + "' expects " +
                                std::to_string(in.param_arity) +
                                " parameter(s)");
        std::vector<std::vector<int>> operands;
        operands.push_back(reg_ref(true));
        while (accept_symbol(",")) operands.push_back(reg_ref(true));
        expect_symbol(";");
        if (static_cast<int>(operands.size()) != in.qubit_arity)
            throw QasmError(QasmError::Code::syntax, head.line, head.col,
                            "gate '" + head.text + "' expects " +
                                std::to_string(in.qubit_arity) + " operand(s)");
        std::size_t width = 1;
        for (const auto& op : operands)
            if (op.size() > 1) {
                if (width != 1 && op.size() != width)
                    throw QasmError(QasmError::Code::range, head.line, head.col,
                                    "mismatched broadcast widths");
                width = op.size();
            }
        for (std::size_t i = 0; i < width; ++i) {
            GateApp g;
            g.kind = *kind;
            g.params = params;
            for (const auto& op : operands)
                g.qubits.push_back(op.size() == 1 ? op[0] : op[i]);
            circuit_.gates.push_back(std::move(g));
        }
    }

    // Register reference, resolved to flat indices. A bare name broadcasts
    // over the whole register.
    std::vector<int> reg_ref(bool quantum) {
        Token name = cur_;
        expect_type(Token::Type::ident, "register reference");
        const auto& regs = quantum ? circuit_.qregs : circuit_.cregs;
        auto it = regs.find(name.text);
        if (it == regs.end())
            throw QasmError(QasmError::Code::range, name.line, name.col,
                            "unknown register '" + name.text + "'");
        if (accept_symbol("[")) {
            Token idx = cur_;
            int i = expect_uint();
            expect_symbol("]");
            if (i >= it->second.size)
                throw QasmError(QasmError::Code::range, idx.line, idx.col,
                                "index " + std::to_string(i) +
                                    " out of range for register '" +
                                    name.text + "'");
            return {it->second.offset + i};
        }
        std::vector<int> all(it->second.size);
        for (int i = 0; i < it->second.size; ++i)
            all[i] = it->second.offset + i;
        return all;
    }

    // expr := term (('+'|'-') term)*
    double expr() {
        double v = term();
        for (;;) {
            if (accept_symbol("+"))
                v += term();
            else if (accept_symbol("-"))
                v -= term();
            else
                return v;
        }
    }

    double term() {
        double v = factor();
        for (;;) {
            if (accept_symbol("*")) {
                v *= factor();
            } else if (accept_symbol("/")) {
                double d = factor();
                if (d == 0.0)
                    throw QasmError(QasmError::Code::syntax, cur_.line,
                                    cur_.col, "division by zero in angle");
                v /= d;
            } else {
                return v;
            }
        }
    }

    double factor() {
        if (accept_symbol("-")) return -factor();
        if (accept_symbol("+")) return factor();
        if (accept_symbol("(")) {
            double v = expr();
            expect_symbol(")");
            return v;
        }
        if (cur_.type == Token::Type::number) {
            double v = cur_.value;
            advance();
            return v;
        }
        if (at_ident("pi")) {
            advance();
            return std::numbers::pi;
        }
        throw QasmError(QasmError::Code::syntax, cur_.line, cur_.col,
                        "expected angle expression");
    }

    Lexer lex_;
    Token cur_;
    Circuit circuit_;
};

}  // namespace detail

inline Circuit parse_qasm(std::string_view text) {
    return detail::Parser(text).parse();
}

inline std::string emit_qasm(const Circuit& c) {
    c.validate();
    std::ostringstream out;
    out << "OPENQASM 2.0;\n";
    out << "include \"qelib1.inc\";\n";
    // Registers in declaration order (offsets ascend with declaration).
    std::vector<std::pair<std::string, RegisterSpan>> qs(c.qregs.begin(),
                                                         c.qregs.end());
    std::vector<std::pair<std::string, RegisterSpan>> cs(c.cregs.begin(),
                                                         c.cregs.end());
    auto by_offset = [](const auto& a, const auto& b) {
        return a.second.offset < b.second.offset;
    };
    std::sort(qs.begin(), qs.end(), by_offset);
    std::sort(cs.begin(), cs.end(), by_offset);
    for (const auto& [name, span] : qs)
        out << "qreg " << name << "[" << span.size << "];\n";
    for (const auto& [name, span] : cs)
        out << "creg " << name << "[" << span.size << "];\n";

    auto qubit_ref = [&](int q) -> std::string {
        for (const auto& [name, span] : qs)
            if (q >= span.offset && q < span.offset + span.size)
                return name + "[" + std::to_string(q - span.offset) + "]";
        throw std::logic_error("qubit outside every register");
    };
    auto cbit_ref = [&](int b) -> std::string {
        for (const auto& [name, span] : cs)
            if (b >= span.offset && b < span.offset + span.size)
                return name + "[" + std::to_string(b - span.offset) + "]";
        throw std::logic_error("cbit outside every register");
    };

    for (const auto& g : c.gates) {
        if (g.kind == GateKind::barrier) {
            out << "barrier";
            for (std::size_t i = 0; i < g.qubits.size(); ++i)
                out << (i ? "," : " ") << qubit_ref(g.qubits[i]);
            out << ";\n";
            continue;
        }
        if (g.kind == GateKind::measure) {
            out << "measure " << qubit_ref(g.qubits[0]) << " -> "
                << cbit_ref(g.cbit) << ";\n";
            continue;
        }
        // p is emitted under its qelib1 spelling; the parser folds u1 back.
        out << (g.kind == GateKind::p ? "u1" : kind_name(g.kind));
        if (!g.params.empty()) {
            out << "(";
            for (std::size_t i = 0; i < g.params.size(); ++i)
                out << (i ? "," : "") << format_angle(g.params[i]);
            out << ")";
        }
        for (std::size_t i = 0; i < g.qubits.size(); ++i)
            out << (i ? "," : " ") << qubit_ref(g.qubits[i]);
        out << ";\n";
    }
    return out.str();
}

}  // namespace qobf
