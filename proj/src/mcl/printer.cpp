// Copyright 2026 The ReplayLab Authors
// SPDX-License-Identifier: Apache-2.0

#include <sstream>

#include <replaylab/mcl/ast.hpp>

namespace replaylab::mcl {

namespace {

    std::string escape(const std::string& s) {
        std::string out;
        for (char c : s) {
            if (c == '"' || c == '\\') out.push_back('\\');
            out.push_back(c);
        }
        return out;
    }

    std::string expr_text(const Expr& e);

    std::string arg_list(const std::vector<Expr>& args, std::size_t from = 0) {
        std::string out = "(";
        for (std::size_t i = from; i < args.size(); ++i) {
            if (i > from) out += ", ";
            out += expr_text(args[i]);
        }
        return out + ")";
    }

    std::string expr_text(const Expr& e) {
        switch (e.kind) {
            case ExprKind::kIntLit:
            case ExprKind::kAddrLit:
            case ExprKind::kBoolLit:
                return e.text;
            case ExprKind::kIdent:
                return e.text;
            case ExprKind::kIndex:
                return e.text + "[" + expr_text(e.args.at(0)) + "]";
            case ExprKind::kLength:
                return e.text + ".length";
            case ExprKind::kEnv:
                switch (e.env) {
                    case EnvVar::kNow:
                        return "now";
                    case EnvVar::kBlockNumber:
                        return "block.number";
                    case EnvVar::kMsgSender:
                        return "msg.sender";
                    case EnvVar::kMsgValue:
                        return "msg.value";
                    case EnvVar::kThis:
                        return "this";
                }
                return "?";
            case ExprKind::kBuiltin:
            case ExprKind::kContractCast:
                return e.text + arg_list(e.args);
            case ExprKind::kExternalCall:
                return e.text + "(" + expr_text(e.args.at(0)) + ")." + e.method + arg_list(e.args, 1);
            case ExprKind::kCreate:
                return "new " + e.text + arg_list(e.args);
            case ExprKind::kNot:
                return "!" + expr_text(e.args.at(0));
            case ExprKind::kBinary:
                return "(" + expr_text(e.args.at(0)) + " " + binop_symbol(e.op) + " " + expr_text(e.args.at(1)) + ")";
        }
        return "?";
    }

    void print_params(std::ostringstream& out, const std::vector<Param>& params) {
        out << "(";
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (i) out << ", ";
            out << type_name(params[i].type) << " " << params[i].name;
        }
        out << ")";
    }

    void print_block(std::ostringstream& out, const std::vector<Stmt>& body, int depth);

    void print_stmt(std::ostringstream& out, const Stmt& s, int depth) {
        const std::string pad(static_cast<std::size_t>(depth) * 4, ' ');
        out << pad;
        switch (s.kind) {
            case StmtKind::kLocal:
                out << type_name(s.type) << " " << s.name << " = " << expr_text(s.exprs.at(0)) << ";\n";
                return;
            case StmtKind::kAssign: {
                const char* op = s.assign_op == AssignOp::kSet ? " = " : s.assign_op == AssignOp::kAdd ? " += " : " -= ";
                out << expr_text(s.exprs.at(0)) << op << expr_text(s.exprs.at(1)) << ";\n";
                return;
            }
            case StmtKind::kPush:
                out << s.name << ".push(" << expr_text(s.exprs.at(0)) << ");\n";
                return;
            case StmtKind::kRequire:
                out << "require(" << expr_text(s.exprs.at(0));
                if (s.message) out << ", \"" << escape(*s.message) << "\"";
                out << ");\n";
                return;
            case StmtKind::kAssert:
                out << "assert(" << expr_text(s.exprs.at(0)) << ");\n";
                return;
            case StmtKind::kEmit:
                out << "emit " << s.name << arg_list(s.exprs) << ";\n";
                return;
            case StmtKind::kTransfer:
                out << "transfer" << arg_list(s.exprs) << ";\n";
                return;
            case StmtKind::kExpr:
                out << expr_text(s.exprs.at(0)) << ";\n";
                return;
            case StmtKind::kIf:
                out << "if (" << expr_text(s.exprs.at(0)) << ") ";
                print_block(out, s.body, depth);
                if (s.has_else) {
                    out << pad << "else ";
                    print_block(out, s.else_body, depth);
                }
                return;
            case StmtKind::kFor:
                out << "for " << s.name << " in " << expr_text(s.exprs.at(0)) << " .. " << expr_text(s.exprs.at(1))
                    << " bound " << s.bound << " ";
                print_block(out, s.body, depth);
                return;
            case StmtKind::kReturn:
                out << "return";
                if (s.exprs.size() == 1) {
                    out << " " << expr_text(s.exprs[0]);
                } else if (s.exprs.size() > 1) {
                    out << " " << arg_list(s.exprs);
                }
                out << ";\n";
                return;
        }
    }

    void print_block(std::ostringstream& out, const std::vector<Stmt>& body, int depth) {
        out << "{\n";
        for (const auto& s : body) print_stmt(out, s, depth + 1);
        out << std::string(static_cast<std::size_t>(depth) * 4, ' ') << "}\n";
    }

    void print_method(std::ostringstream& out, const MethodDef& m, bool ctor) {
        out << "    ";
        if (m.pure) out << "pure ";
        if (m.payable) out << "payable ";
        if (ctor) {
            out << "constructor";
        } else {
            out << "fn " << m.name;
        }
        print_params(out, m.params);
        if (!m.returns.empty()) {
            out << " returns (";
            for (std::size_t i = 0; i < m.returns.size(); ++i) {
                if (i) out << ", ";
                out << type_name(m.returns[i]);
            }
            out << ")";
        }
        if (m.is_abstract) {
            out << ";\n";
            return;
        }
        out << " ";
        print_block(out, m.body, 1);
    }

}  // namespace

std::string print(const SourceUnit& unit) {
    std::ostringstream out;
    for (std::size_t ci = 0; ci < unit.contracts.size(); ++ci) {
        const auto& c = unit.contracts[ci];
        if (ci) out << "\n";
        out << "contract " << c.name << " {\n";
        for (const auto& v : c.state_vars) out << "    " << type_name(v.type) << " " << v.name << ";\n";
        for (const auto& e : c.events) {
            out << "    event " << e.name;
            print_params(out, e.params);
            out << ";\n";
        }
        if (c.constructor) print_method(out, *c.constructor, true);
        for (const auto& m : c.methods) print_method(out, m, false);
        out << "}\n";
    }
    return out.str();
}

}  // namespace replaylab::mcl
