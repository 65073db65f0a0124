// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <cctype>
#include <set>

#include <replaylab/mcl/ast.hpp>

namespace replaylab::mcl {

SyntaxError::SyntaxError(int line, int column, const std::string& what)
    : std::runtime_error("syntax error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_{line},
      column_{column} {}

std::string type_name(Type t) {
    switch (t) {
        case Type::kUint:
            return "uint";
        case Type::kBool:
            return "bool";
        case Type::kAddress:
            return "address";
        case Type::kHash:
            return "hash";
        case Type::kAddressUintMap:
            return "map(address => uint)";
        case Type::kUintArray:
            return "uint[]";
    }
    return "?";
}

std::optional<Type> type_from_name(const std::string& name) {
    if (name == "uint") return Type::kUint;
    if (name == "bool") return Type::kBool;
    if (name == "address") return Type::kAddress;
    if (name == "hash") return Type::kHash;
    if (name == "map(address => uint)" || name == "map(address=>uint)") return Type::kAddressUintMap;
    if (name == "uint[]") return Type::kUintArray;
    return std::nullopt;
}

bool is_value_type(Type t) { return t != Type::kAddressUintMap && t != Type::kUintArray; }

std::string binop_symbol(BinOp op) {
    switch (op) {
        case BinOp::kAdd:
            return "+";
        case BinOp::kSub:
            return "-";
        case BinOp::kMul:
            return "*";
        case BinOp::kDiv:
            return "/";
        case BinOp::kMod:
            return "%";
        case BinOp::kShl:
            return "<<";
        case BinOp::kShr:
            return ">>";
        case BinOp::kBitAnd:
            return "&";
        case BinOp::kBitOr:
            return "|";
        case BinOp::kEq:
            return "==";
        case BinOp::kNe:
            return "!=";
        case BinOp::kLt:
            return "<";
        case BinOp::kLe:
            return "<=";
        case BinOp::kGt:
            return ">";
        case BinOp::kGe:
            return ">=";
        case BinOp::kAnd:
            return "&&";
        case BinOp::kOr:
            return "||";
    }
    return "?";
}

const MethodDef* ContractDef::find_method(const std::string& method) const {
    for (const auto& m : methods) {
        if (m.name == method) return &m;
    }
    return nullptr;
}

const EventDef* ContractDef::find_event(const std::string& event) const {
    for (const auto& e : events) {
        if (e.name == event) return &e;
    }
    return nullptr;
}

const StateVar* ContractDef::find_state_var(const std::string& var) const {
    for (const auto& v : state_vars) {
        if (v.name == var) return &v;
    }
    return nullptr;
}

const ContractDef* SourceUnit::find_contract(const std::string& contract) const {
    for (const auto& c : contracts) {
        if (c.name == contract) return &c;
    }
    return nullptr;
}

namespace {

    enum class Tok { kIdent, kInt, kString, kPunct, kEnd };

    struct Token {
        Tok kind{Tok::kEnd};
        std::string text;
        SourcePos pos;
    };

    const std::set<std::string> kBuiltins = {"address", "uint", "hash", "blockhash", "balance"};
    const std::set<std::string> kReserved = {"contract", "fn",     "pure",   "payable", "event",  "constructor",
                                             "returns",  "require", "assert", "emit",    "transfer", "if",
                                             "else",     "for",     "in",     "bound",   "return", "new",
                                             "true",     "false",   "now",    "block",   "msg",    "this",
                                             "map",      "uint",    "bool",   "address", "hash",   "blockhash",
                                             "balance"};

    class Lexer {
      public:
        explicit Lexer(const std::string& text) : text_{text} {}

        std::vector<Token> run() {
            std::vector<Token> out;
            for (;;) {
                skip_space();
                Token t;
                t.pos = {line_, col_};
                if (at_end()) {
                    t.kind = Tok::kEnd;
                    out.push_back(t);
                    return out;
                }
                const char c = peek();
                if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                    t.kind = Tok::kIdent;
                    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
                        t.text.push_back(advance());
                    }
                } else if (std::isdigit(static_cast<unsigned char>(c))) {
                    t.kind = Tok::kInt;
                    if (c == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
                        t.text.push_back(advance());
                        t.text.push_back(advance());
                        if (at_end() || !std::isxdigit(static_cast<unsigned char>(peek()))) {
                            throw SyntaxError(t.pos.line, t.pos.column, "malformed hex literal");
                        }
                        while (!at_end() && std::isxdigit(static_cast<unsigned char>(peek()))) t.text.push_back(advance());
                    } else {
                        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) t.text.push_back(advance());
                    }
                    if (!at_end() && (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')) {
                        throw SyntaxError(line_, col_, "malformed number literal");
                    }
                } else if (c == '"') {
                    t.kind = Tok::kString;
                    advance();
                    while (!at_end() && peek() != '"') {
                        if (peek() == '\n') throw SyntaxError(t.pos.line, t.pos.column, "unterminated string");
                        if (peek() == '\\') {
                            advance();
                            if (at_end()) break;
                        }
                        t.text.push_back(advance());
                    }
                    if (at_end()) throw SyntaxError(t.pos.line, t.pos.column, "unterminated string");
                    advance();
                } else {
                    t.kind = Tok::kPunct;
                    static const char* kTwo[] = {"==", "!=", "<=", ">=", "<<", ">>", "&&", "||", "+=", "-=", "=>", ".."};
                    bool matched = false;
                    for (const char* p : kTwo) {
                        if (c == p[0] && peek(1) == p[1]) {
                            t.text = p;
                            advance();
                            advance();
                            matched = true;
                            break;
                        }
                    }
                    if (!matched) {
                        static const std::string kOne = "{}()[];,.=+-*/%&|!<>";
                        if (kOne.find(c) == std::string::npos) {
                            throw SyntaxError(t.pos.line, t.pos.column, std::string("unexpected character '") + c + "'");
                        }
                        t.text = std::string(1, advance());
                    }
                }
                out.push_back(std::move(t));
            }
        }

      private:
        bool at_end() const { return i_ >= text_.size(); }
        char peek(std::size_t ahead = 0) const { return i_ + ahead < text_.size() ? text_[i_ + ahead] : '\0'; }
        char advance() {
            const char c = text_[i_++];
            if (c == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            return c;
        }
        void skip_space() {
            for (;;) {
                while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) advance();
                if (peek() == '/' && peek(1) == '/') {
                    while (!at_end() && peek() != '\n') advance();
                } else if (peek() == '/' && peek(1) == '*') {
                    const int l = line_, c = col_;
                    advance();
                    advance();
                    while (!at_end() && !(peek() == '*' && peek(1) == '/')) advance();
                    if (at_end()) throw SyntaxError(l, c, "unterminated comment");
                    advance();
                    advance();
                } else {
                    return;
                }
            }
        }

        const std::string& text_;
        std::size_t i_{0};
        int line_{1};
        int col_{1};
    };

    class Parser {
      public:
        explicit Parser(std::vector<Token> toks) : toks_{std::move(toks)} {}

        SourceUnit unit() {
            SourceUnit u;
            std::set<std::string> names;
            if (at_end()) fail("expected at least one contract");
            while (!at_end()) {
                auto c = contract();
                if (!names.insert(c.name).second) {
                    throw DeclarationError("duplicate declaration of contract '" + c.name + "' at " + where(c.pos));
                }
                u.contracts.push_back(std::move(c));
            }
            return u;
        }

      private:
        static std::string where(const SourcePos& p) { return std::to_string(p.line) + ":" + std::to_string(p.column); }

        const Token& cur() const { return toks_[i_]; }
        const Token& ahead(std::size_t n) const { return toks_[std::min(i_ + n, toks_.size() - 1)]; }
        bool at_end() const { return cur().kind == Tok::kEnd; }
        [[noreturn]] void fail(const std::string& msg) const {
            throw SyntaxError(cur().pos.line, cur().pos.column, msg + (at_end() ? " at end of input" : " near '" + cur().text + "'"));
        }
        bool is_punct(const char* p) const { return cur().kind == Tok::kPunct && cur().text == p; }
        bool is_word(const char* w) const { return cur().kind == Tok::kIdent && cur().text == w; }
        bool accept_punct(const char* p) {
            if (!is_punct(p)) return false;
            ++i_;
            return true;
        }
        bool accept_word(const char* w) {
            if (!is_word(w)) return false;
            ++i_;
            return true;
        }
        void expect_punct(const char* p) {
            if (!accept_punct(p)) fail(std::string("expected '") + p + "'");
        }
        void expect_word(const char* w) {
            if (!accept_word(w)) fail(std::string("expected '") + w + "'");
        }
        std::string ident() {
            if (cur().kind != Tok::kIdent || kReserved.contains(cur().text)) fail("expected identifier");
            return toks_[i_++].text;
        }

        bool at_type() const {
            if (cur().kind != Tok::kIdent) return false;
            const auto& t = cur().text;
            return t == "uint" || t == "bool" || t == "address" || t == "hash" || t == "map";
        }

        Type type() {
            if (accept_word("map")) {
                expect_punct("(");
                expect_word("address");
                expect_punct("=>");
                expect_word("uint");
                expect_punct(")");
                return Type::kAddressUintMap;
            }
            if (accept_word("uint")) {
                if (is_punct("[") && ahead(1).kind == Tok::kPunct && ahead(1).text == "]") {
                    i_ += 2;
                    return Type::kUintArray;
                }
                return Type::kUint;
            }
            if (accept_word("bool")) return Type::kBool;
            if (accept_word("address")) return Type::kAddress;
            if (accept_word("hash")) return Type::kHash;
            fail("expected type");
        }

        std::vector<Param> params() {
            std::vector<Param> out;
            expect_punct("(");
            if (!is_punct(")")) {
                do {
                    Param p;
                    p.pos = cur().pos;
                    p.type = type();
                    p.name = ident();
                    out.push_back(std::move(p));
                } while (accept_punct(","));
            }
            expect_punct(")");
            return out;
        }

        ContractDef contract() {
            ContractDef c;
            c.pos = cur().pos;
            expect_word("contract");
            c.name = ident();
            expect_punct("{");
            std::set<std::string> members;
            auto declare = [&](const std::string& name, const SourcePos& pos) {
                if (!members.insert(name).second) {
                    throw DeclarationError("duplicate declaration of '" + name + "' in contract '" + c.name + "' at " + where(pos));
                }
            };
            while (!accept_punct("}")) {
                if (at_end()) fail("unterminated contract");
                const SourcePos pos = cur().pos;
                if (accept_word("event")) {
                    EventDef e;
                    e.pos = pos;
                    e.name = ident();
                    e.params = params();
                    expect_punct(";");
                    declare(e.name, pos);
                    c.events.push_back(std::move(e));
                    continue;
                }
                if (is_word("pure") || is_word("payable") || is_word("fn") || is_word("constructor")) {
                    MethodDef m;
                    m.pos = pos;
                    m.pure = accept_word("pure");
                    m.payable = accept_word("payable");
                    if (accept_word("constructor")) {
                        if (m.pure) fail("constructor cannot be pure");
                        m.name = "constructor";
                        m.params = params();
                        m.body = block();
                        if (c.constructor) throw DeclarationError("duplicate constructor in contract '" + c.name + "' at " + where(pos));
                        c.constructor = std::move(m);
                        continue;
                    }
                    expect_word("fn");
                    m.name = ident();
                    m.params = params();
                    if (accept_word("returns")) {
                        expect_punct("(");
                        do {
                            m.returns.push_back(type());
                        } while (accept_punct(","));
                        expect_punct(")");
                    }
                    if (accept_punct(";")) {
                        m.is_abstract = true;
                    } else {
                        m.body = block();
                    }
                    declare(m.name, pos);
                    c.methods.push_back(std::move(m));
                    continue;
                }
                if (at_type()) {
                    StateVar v;
                    v.pos = pos;
                    v.type = type();
                    v.name = ident();
                    expect_punct(";");
                    declare(v.name, pos);
                    c.state_vars.push_back(std::move(v));
                    continue;
                }
                fail("expected declaration");
            }
            return c;
        }

        std::vector<Stmt> block() {
            expect_punct("{");
            std::vector<Stmt> out;
            while (!accept_punct("}")) {
                if (at_end()) fail("unterminated block");
                out.push_back(stmt());
            }
            return out;
        }

        Stmt stmt() {
            Stmt s;
            s.pos = cur().pos;
            if (accept_word("require")) {
                s.kind = StmtKind::kRequire;
                expect_punct("(");
                s.exprs.push_back(expr());
                if (accept_punct(",")) {
                    if (cur().kind != Tok::kString) fail("expected string message");
                    s.message = toks_[i_++].text;
                }
                expect_punct(")");
                expect_punct(";");
                return s;
            }
            if (accept_word("assert")) {
                s.kind = StmtKind::kAssert;
                expect_punct("(");
                s.exprs.push_back(expr());
                expect_punct(")");
                expect_punct(";");
                return s;
            }
            if (accept_word("emit")) {
                s.kind = StmtKind::kEmit;
                s.name = ident();
                s.exprs = call_args();
                expect_punct(";");
                return s;
            }
            if (accept_word("transfer")) {
                s.kind = StmtKind::kTransfer;
                s.exprs = call_args();
                if (s.exprs.size() != 2) fail("transfer takes (to, amount)");
                expect_punct(";");
                return s;
            }
            if (accept_word("if")) {
                s.kind = StmtKind::kIf;
                expect_punct("(");
                s.exprs.push_back(expr());
                expect_punct(")");
                s.body = block();
                if (accept_word("else")) {
                    s.has_else = true;
                    if (is_word("if")) {
                        s.else_body.push_back(stmt());
                    } else {
                        s.else_body = block();
                    }
                }
                return s;
            }
            if (accept_word("for")) {
                s.kind = StmtKind::kFor;
                s.name = ident();
                expect_word("in");
                s.exprs.push_back(expr());
                expect_punct("..");
                s.exprs.push_back(expr());
                expect_word("bound");
                if (cur().kind != Tok::kInt) fail("expected static loop bound");
                const Word b = word_from_string(toks_[i_++].text);
                if (b > Word{1'000'000}) fail("loop bound too large");
                s.bound = static_cast<std::uint64_t>(b);
                s.body = block();
                return s;
            }
            if (accept_word("return")) {
                s.kind = StmtKind::kReturn;
                if (accept_punct("(")) {
                    // parenthesised tuple; a single parenthesised value is the same as a bare value
                    do {
                        s.exprs.push_back(expr());
                    } while (accept_punct(","));
                    expect_punct(")");
                    if (s.exprs.size() == 1 && !is_punct(";")) {
                        // "(a) + b" style expression: continue parsing as a full expression
                        Expr lhs = std::move(s.exprs.front());
                        s.exprs.clear();
                        s.exprs.push_back(binary_rest(std::move(lhs), 0));
                    }
                } else if (!is_punct(";")) {
                    s.exprs.push_back(expr());
                }
                expect_punct(";");
                return s;
            }
            if (at_type() && !(ahead(1).kind == Tok::kPunct && ahead(1).text == "(")) {
                s.kind = StmtKind::kLocal;
                s.type = type();
                if (!is_value_type(s.type)) fail("local variables must have a value type");
                s.name = ident();
                expect_punct("=");
                s.exprs.push_back(expr());
                expect_punct(";");
                return s;
            }
            if (cur().kind == Tok::kIdent && ahead(1).kind == Tok::kPunct && ahead(1).text == "." &&
                ahead(2).kind == Tok::kIdent && ahead(2).text == "push") {
                s.kind = StmtKind::kPush;
                s.name = ident();
                i_ += 2;
                auto args = call_args();
                if (args.size() != 1) fail("push takes one argument");
                s.exprs = std::move(args);
                expect_punct(";");
                return s;
            }
            Expr e = expr();
            if (is_punct("=") || is_punct("+=") || is_punct("-=")) {
                if (e.kind != ExprKind::kIdent && e.kind != ExprKind::kIndex) fail("invalid assignment target");
                s.kind = StmtKind::kAssign;
                s.assign_op = is_punct("=") ? AssignOp::kSet : is_punct("+=") ? AssignOp::kAdd : AssignOp::kSub;
                ++i_;
                s.exprs.push_back(std::move(e));
                s.exprs.push_back(expr());
                expect_punct(";");
                return s;
            }
            if (e.kind != ExprKind::kExternalCall && e.kind != ExprKind::kCreate) fail("expression statement must be a call");
            s.kind = StmtKind::kExpr;
            s.exprs.push_back(std::move(e));
            expect_punct(";");
            return s;
        }

        std::vector<Expr> call_args() {
            std::vector<Expr> out;
            expect_punct("(");
            if (!is_punct(")")) {
                do {
                    out.push_back(expr());
                } while (accept_punct(","));
            }
            expect_punct(")");
            return out;
        }

        static int precedence(const std::string& op) {
            if (op == "||") return 1;
            if (op == "&&") return 2;
            if (op == "==" || op == "!=") return 3;
            if (op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
            if (op == "|") return 5;
            if (op == "&") return 6;
            if (op == "<<" || op == ">>") return 7;
            if (op == "+" || op == "-") return 8;
            if (op == "*" || op == "/" || op == "%") return 9;
            return -1;
        }

        static BinOp binop(const std::string& op) {
            static const std::pair<const char*, BinOp> kOps[] = {
                {"+", BinOp::kAdd},   {"-", BinOp::kSub},    {"*", BinOp::kMul},  {"/", BinOp::kDiv},   {"%", BinOp::kMod},
                {"<<", BinOp::kShl},  {">>", BinOp::kShr},   {"&", BinOp::kBitAnd}, {"|", BinOp::kBitOr}, {"==", BinOp::kEq},
                {"!=", BinOp::kNe},   {"<", BinOp::kLt},     {"<=", BinOp::kLe},  {">", BinOp::kGt},    {">=", BinOp::kGe},
                {"&&", BinOp::kAnd},  {"||", BinOp::kOr}};
            for (const auto& [s, o] : kOps) {
                if (op == s) return o;
            }
            return BinOp::kAdd;
        }

        Expr expr() { return binary_rest(unary(), 0); }

        Expr binary_rest(Expr lhs, int min_prec) {
            for (;;) {
                if (cur().kind != Tok::kPunct) return lhs;
                const int prec = precedence(cur().text);
                if (prec < 0 || prec < min_prec) return lhs;
                Expr node;
                node.kind = ExprKind::kBinary;
                node.pos = cur().pos;
                node.op = binop(cur().text);
                ++i_;
                Expr rhs = unary();
                while (cur().kind == Tok::kPunct && precedence(cur().text) > prec) {
                    rhs = binary_rest(std::move(rhs), prec + 1);
                }
                node.args.push_back(std::move(lhs));
                node.args.push_back(std::move(rhs));
                lhs = std::move(node);
            }
        }

        Expr unary() {
            if (is_punct("!")) {
                Expr e;
                e.kind = ExprKind::kNot;
                e.pos = cur().pos;
                ++i_;
                e.args.push_back(unary());
                return e;
            }
            return postfix(primary());
        }

        Expr postfix(Expr e) {
            for (;;) {
                if (is_punct(".") && e.kind == ExprKind::kContractCast) {
                    ++i_;
                    Expr call;
                    call.kind = ExprKind::kExternalCall;
                    call.pos = e.pos;
                    call.text = e.text;
                    call.method = ident();
                    auto args = call_args();
                    call.args.push_back(std::move(e.args.front()));
                    for (auto& a : args) call.args.push_back(std::move(a));
                    e = std::move(call);
                    continue;
                }
                return e;
            }
        }

        Expr primary() {
            Expr e;
            e.pos = cur().pos;
            const Token& t = cur();
            if (t.kind == Tok::kInt) {
                ++i_;
                e.text = t.text;
                try {
                    e.value = word_from_string(t.text);
                } catch (const HexError& ex) {
                    throw SyntaxError(t.pos.line, t.pos.column, ex.what());
                }
                const bool hex = t.text.size() > 2 && (t.text[1] == 'x' || t.text[1] == 'X');
                e.kind = hex && t.text.size() == 42 ? ExprKind::kAddrLit : ExprKind::kIntLit;
                return e;
            }
            if (t.kind == Tok::kPunct && t.text == "(") {
                ++i_;
                Expr inner = expr();
                expect_punct(")");
                return inner;
            }
            if (t.kind != Tok::kIdent) fail("expected expression");
            if (accept_word("true") || accept_word("false")) {
                e.kind = ExprKind::kBoolLit;
                e.flag = toks_[i_ - 1].text == "true";
                e.text = toks_[i_ - 1].text;
                return e;
            }
            if (accept_word("now")) {
                e.kind = ExprKind::kEnv;
                e.env = EnvVar::kNow;
                return e;
            }
            if (accept_word("this")) {
                e.kind = ExprKind::kEnv;
                e.env = EnvVar::kThis;
                return e;
            }
            if (accept_word("block")) {
                expect_punct(".");
                expect_word("number");
                e.kind = ExprKind::kEnv;
                e.env = EnvVar::kBlockNumber;
                return e;
            }
            if (accept_word("msg")) {
                expect_punct(".");
                e.kind = ExprKind::kEnv;
                if (accept_word("sender")) {
                    e.env = EnvVar::kMsgSender;
                } else if (accept_word("value")) {
                    e.env = EnvVar::kMsgValue;
                } else {
                    fail("expected msg.sender or msg.value");
                }
                return e;
            }
            if (accept_word("new")) {
                e.kind = ExprKind::kCreate;
                e.text = ident();
                e.args = call_args();
                return e;
            }
            if (kBuiltins.contains(t.text)) {
                ++i_;
                e.kind = ExprKind::kBuiltin;
                e.text = t.text;
                e.args = call_args();
                if (e.args.size() != 1) fail("builtin '" + e.text + "' takes one argument");
                return e;
            }
            const std::string name = ident();
            e.text = name;
            if (is_punct("(")) {
                e.kind = ExprKind::kContractCast;
                e.args = call_args();
                if (e.args.size() != 1) fail("contract cast takes one address");
                return e;
            }
            if (accept_punct("[")) {
                e.kind = ExprKind::kIndex;
                e.args.push_back(expr());
                expect_punct("]");
                return e;
            }
            if (is_punct(".") && ahead(1).kind == Tok::kIdent && ahead(1).text == "length") {
                i_ += 2;
                e.kind = ExprKind::kLength;
                return e;
            }
            e.kind = ExprKind::kIdent;
            return e;
        }

        std::vector<Token> toks_;
        std::size_t i_{0};
    };

}  // namespace

SourceUnit parse(const std::string& text) {
    Parser p{Lexer{text}.run()};
    SourceUnit u = p.unit();
    u.raw_text = text;
    return u;
}

}  // namespace replaylab::mcl
