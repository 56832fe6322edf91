#include "resolute/parser.hpp"
#include "resolute/util.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace resolute {

namespace {

struct Token {
    enum class Kind { Ident, Var, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    int col = 0;
};

// Identifiers admit a trailing '*' so fine-resolution counterparts read
// the way they are written on paper (loc*, place*, ...).
std::vector<Token> lex_line(std::string_view line, int lineno,
                            const std::string& file, std::vector<Diagnostic>& diags) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (c == ' ' || c == '\t' || c == '\r') { ++i; continue; }
        if (c == '#') break;  // comment
        int col = (int)i + 1;
        if (std::islower((unsigned char)c) || c == '_') {
            std::size_t j = i;
            while (j < line.size() && (std::isalnum((unsigned char)line[j]) || line[j] == '_')) ++j;
            if (j < line.size() && line[j] == '*') ++j;
            out.push_back({Token::Kind::Ident, std::string(line.substr(i, j - i)), col});
            i = j;
            continue;
        }
        if (std::isupper((unsigned char)c)) {
            std::size_t j = i;
            while (j < line.size() && (std::isalnum((unsigned char)line[j]) || line[j] == '_')) ++j;
            out.push_back({Token::Kind::Var, std::string(line.substr(i, j - i)), col});
            i = j;
            continue;
        }
        if (std::isdigit((unsigned char)c)) {
            std::size_t j = i;
            while (j < line.size() && std::isdigit((unsigned char)line[j])) ++j;
            out.push_back({Token::Kind::Ident, std::string(line.substr(i, j - i)), col});
            i = j;
            continue;
        }
        if (c == '!' && i + 1 < line.size() && line[i + 1] == '=') {
            out.push_back({Token::Kind::Punct, "!=", col});
            i += 2;
            continue;
        }
        if (c == '=' && i + 1 < line.size() && line[i + 1] == '=') {
            out.push_back({Token::Kind::Punct, "==", col});
            i += 2;
            continue;
        }
        if (std::string("(){},=+:-").find(c) != std::string::npos) {
            out.push_back({Token::Kind::Punct, std::string(1, c), col});
            ++i;
            continue;
        }
        diags.push_back({file, lineno, col, std::string("unexpected character '") + c + "'"});
        ++i;
    }
    return out;
}

struct Parser {
    const std::string& file;
    SystemDescription d;
    std::vector<Diagnostic> diags;

    enum class Section {
        None, Sorts, Statics, FluBasic, FluDefined, ActAgent, ActExo, ActKnow,
        Axioms, Defaults, Facts, Initial, Refinement
    };
    Section section = Section::None;

    // multi-line counterpart block state
    bool in_counterpart = false;
    RefinementSpec::Counterpart pending_counterpart;

    void err(int line, int col, std::string msg) {
        diags.push_back({file, line, col, std::move(msg)});
    }

    // --- token cursor helpers -------------------------------------------
    const std::vector<Token>* toks = nullptr;
    std::size_t pos = 0;
    int lineno = 0;

    const Token& peek() const {
        static Token end{Token::Kind::End, "", 0};
        return pos < toks->size() ? (*toks)[pos] : end;
    }
    Token take() {
        Token t = peek();
        if (pos < toks->size()) ++pos;
        return t;
    }
    bool accept_punct(const std::string& p) {
        if (peek().kind == Token::Kind::Punct && peek().text == p) { ++pos; return true; }
        return false;
    }
    bool expect_punct(const std::string& p) {
        if (accept_punct(p)) return true;
        err(lineno, peek().col ? peek().col : 1, "expected '" + p + "'");
        return false;
    }
    bool accept_kw(const std::string& kw) {
        if (peek().kind == Token::Kind::Ident && peek().text == kw) { ++pos; return true; }
        return false;
    }
    bool at_end() const { return pos >= toks->size(); }

    // --- section headers --------------------------------------------------
    bool try_section_header(const std::vector<Token>& t) {
        auto is = [&](std::size_t i, const std::string& s) {
            return i < t.size() && t[i].kind == Token::Kind::Ident && t[i].text == s;
        };
        auto colon_at = [&](std::size_t i) {
            return i < t.size() && t[i].kind == Token::Kind::Punct && t[i].text == ":";
        };
        if (is(0, "sorts") && colon_at(1)) { section = Section::Sorts; return true; }
        if (is(0, "statics") && colon_at(1)) { section = Section::Statics; return true; }
        if (is(0, "fluents") && is(1, "basic") && colon_at(2)) { section = Section::FluBasic; return true; }
        if (is(0, "fluents") && is(1, "defined") && colon_at(2)) { section = Section::FluDefined; return true; }
        if (is(0, "actions") && is(1, "agent") && colon_at(2)) { section = Section::ActAgent; return true; }
        if (is(0, "actions") && is(1, "exogenous") && colon_at(2)) { section = Section::ActExo; return true; }
        if (is(0, "actions") && is(1, "knowledge") && colon_at(2)) { section = Section::ActKnow; return true; }
        if (is(0, "axioms") && colon_at(1)) { section = Section::Axioms; return true; }
        if (is(0, "defaults") && colon_at(1)) { section = Section::Defaults; return true; }
        if (is(0, "facts") && colon_at(1)) { section = Section::Facts; return true; }
        if (is(0, "initial") && colon_at(1)) { section = Section::Initial; return true; }
        if (is(0, "refinement") && colon_at(1)) {
            section = Section::Refinement;
            if (!d.refinement) d.refinement = RefinementSpec{};
            return true;
        }
        return false;
    }

    // --- sorts -------------------------------------------------------------
    void parse_sort_line() {
        Token name = take();
        if (name.kind != Token::Kind::Ident) {
            err(lineno, name.col, "expected sort name");
            return;
        }
        if (d.sig.sort_id(name.text) >= 0) {
            err(lineno, name.col, "duplicate declaration of sort '" + name.text + "'");
            return;
        }
        if (!expect_punct("=")) return;
        if (accept_punct("{")) {
            std::vector<std::string> members;
            if (!accept_punct("}")) {
                while (true) {
                    Token m = take();
                    if (m.kind != Token::Kind::Ident) {
                        err(lineno, m.col, "expected constant in sort body");
                        return;
                    }
                    members.push_back(m.text);
                    if (accept_punct("}")) break;
                    if (!expect_punct(",")) return;
                }
            }
            if (members.empty()) {
                err(lineno, name.col, "empty sort '" + name.text + "'");
                return;
            }
            d.sig.add_base_sort(name.text, members);
        } else {
            std::vector<int> children;
            while (true) {
                Token c = take();
                if (c.kind != Token::Kind::Ident) {
                    err(lineno, c.col, "expected sort name in union");
                    return;
                }
                int cid = d.sig.sort_id(c.text);
                if (cid < 0) {
                    err(lineno, c.col, "undeclared sort '" + c.text + "'");
                    return;
                }
                children.push_back(cid);
                if (!accept_punct("+")) break;
            }
            d.sig.add_union_sort(name.text, children);
        }
        if (!at_end()) err(lineno, peek().col, "trailing tokens after sort declaration");
    }

    // --- attribute declarations --------------------------------------------
    void parse_attr_line(AttrKind kind) {
        Token name = take();
        if (name.kind != Token::Kind::Ident) {
            err(lineno, name.col, "expected name");
            return;
        }
        if (d.sig.attr_id(name.text) >= 0 || d.sig.sort_id(name.text) >= 0) {
            err(lineno, name.col, "duplicate declaration of '" + name.text + "'");
            return;
        }
        std::vector<int> arg_sorts;
        if (accept_punct("(")) {
            while (true) {
                Token s = take();
                if (s.kind != Token::Kind::Ident) {
                    err(lineno, s.col, "expected sort name");
                    return;
                }
                int sid = d.sig.sort_id(s.text);
                if (sid < 0) {
                    err(lineno, s.col, "undeclared sort '" + s.text + "'");
                    return;
                }
                arg_sorts.push_back(sid);
                if (accept_punct(")")) break;
                if (!expect_punct(",")) return;
            }
        }
        d.sig.add_attr(name.text, kind, arg_sorts);
        if (!at_end()) err(lineno, peek().col, "trailing tokens after declaration");
    }

    // --- terms / atoms / bodies ---------------------------------------------
    struct VarCtx {
        std::vector<std::string> names;
        int index_of(const std::string& n) {
            for (std::size_t i = 0; i < names.size(); ++i)
                if (names[i] == n) return (int)i;
            names.push_back(n);
            return (int)names.size() - 1;
        }
    };

    std::optional<Term> parse_term(VarCtx& vars, bool ground_only) {
        Token t = take();
        if (t.kind == Token::Kind::Var) {
            if (ground_only) {
                err(lineno, t.col, "variables are not allowed here");
                return std::nullopt;
            }
            return Term{true, vars.index_of(t.text)};
        }
        if (t.kind == Token::Kind::Ident) {
            int cid = d.sig.constant_id(t.text);
            if (cid < 0) {
                err(lineno, t.col, "undeclared constant '" + t.text + "'");
                return std::nullopt;
            }
            return Term{false, cid};
        }
        err(lineno, t.col, "expected term");
        return std::nullopt;
    }

    std::optional<AtomRef> parse_atom(VarCtx& vars, bool ground_only) {
        Token name = take();
        if (name.kind != Token::Kind::Ident) {
            err(lineno, name.col, "expected attribute or action name");
            return std::nullopt;
        }
        int attr = d.sig.attr_id(name.text);
        if (attr < 0) {
            err(lineno, name.col, "undeclared symbol '" + name.text + "'");
            return std::nullopt;
        }
        AtomRef a;
        a.attr = attr;
        if (accept_punct("(")) {
            while (true) {
                auto t = parse_term(vars, ground_only);
                if (!t) return std::nullopt;
                a.args.push_back(*t);
                if (accept_punct(")")) break;
                if (!expect_punct(",")) return std::nullopt;
            }
        }
        if (a.args.size() != d.sig.attr(attr).arg_sorts.size()) {
            err(lineno, name.col,
                "arity mismatch for '" + name.text + "': expected " +
                    std::to_string(d.sig.attr(attr).arg_sorts.size()) + " arguments, got " +
                    std::to_string(a.args.size()));
            return std::nullopt;
        }
        return a;
    }

    std::optional<std::vector<BodyElem>> parse_body(VarCtx& vars) {
        std::vector<BodyElem> body;
        while (true) {
            BodyElem elem;
            bool neg = accept_punct("-");
            // lookahead to distinguish sort guards and (in)equalities
            if (!neg && peek().kind == Token::Kind::Ident &&
                d.sig.sort_id(peek().text) >= 0) {
                Token g = take();
                elem.kind = BodyElem::Kind::SortGuard;
                elem.guard_sort = d.sig.sort_id(g.text);
                if (!expect_punct("(")) return std::nullopt;
                auto t = parse_term(vars, false);
                if (!t) return std::nullopt;
                elem.guard_term = *t;
                if (!expect_punct(")")) return std::nullopt;
            } else if (!neg &&
                       (peek().kind == Token::Kind::Var ||
                        (peek().kind == Token::Kind::Ident &&
                         d.sig.attr_id(peek().text) < 0 &&
                         d.sig.constant_id(peek().text) >= 0))) {
                auto lhs = parse_term(vars, false);
                if (!lhs) return std::nullopt;
                if (accept_punct("!=")) elem.kind = BodyElem::Kind::Neq;
                else if (accept_punct("==")) elem.kind = BodyElem::Kind::Eq;
                else {
                    err(lineno, peek().col, "expected '!=' or '=='");
                    return std::nullopt;
                }
                auto rhs = parse_term(vars, false);
                if (!rhs) return std::nullopt;
                elem.lhs = *lhs;
                elem.rhs = *rhs;
            } else {
                auto a = parse_atom(vars, false);
                if (!a) return std::nullopt;
                elem.kind = BodyElem::Kind::Lit;
                elem.lit = Literal{*a, !neg};
            }
            body.push_back(std::move(elem));
            if (!accept_punct(",")) break;
        }
        return body;
    }

    // --- axioms --------------------------------------------------------------
    void parse_axiom_line() {
        Axiom ax;
        ax.line = lineno;
        VarCtx vars;
        if (accept_kw("never")) {
            ax.kind = Axiom::Kind::Never;
            auto body = parse_body(vars);
            if (!body) return;
            ax.body = std::move(*body);
            if (!at_end()) {
                err(lineno, peek().col, "trailing tokens after axiom");
                return;
            }
            ax.var_names = std::move(vars.names);
            d.axioms.push_back(std::move(ax));
            return;
        }
        if (accept_kw("impossible")) {
            ax.kind = Axiom::Kind::Executability;
            auto a = parse_atom(vars, false);
            if (!a) return;
            ax.trigger = *a;
            int extra = 0;
            while (accept_punct(",")) {
                // sets of concurrent actions are not executed by this engine
                auto more = parse_atom(vars, false);
                if (!more) return;
                ++extra;
            }
            if (extra > 0) {
                err(lineno, 1, "multi-action executability conditions are not supported");
                return;
            }
            if (accept_kw("if")) {
                auto body = parse_body(vars);
                if (!body) return;
                ax.body = std::move(*body);
            }
        } else {
            bool neg = accept_punct("-");
            auto first = parse_atom(vars, false);
            if (!first) return;
            if (accept_kw("causes")) {
                if (neg) {
                    err(lineno, 1, "action term cannot be negated");
                    return;
                }
                ax.kind = Axiom::Kind::Causal;
                ax.trigger = *first;
                bool hneg = accept_punct("-");
                auto head = parse_atom(vars, false);
                if (!head) return;
                ax.head = Literal{*head, !hneg};
                if (accept_kw("if")) {
                    auto body = parse_body(vars);
                    if (!body) return;
                    ax.body = std::move(*body);
                }
            } else if (accept_kw("if")) {
                ax.kind = Axiom::Kind::Constraint;
                ax.head = Literal{*first, !neg};
                auto body = parse_body(vars);
                if (!body) return;
                ax.body = std::move(*body);
            } else {
                err(lineno, peek().col ? peek().col : 1, "expected 'causes' or 'if'");
                return;
            }
        }
        if (!at_end()) {
            err(lineno, peek().col, "trailing tokens after axiom");
            return;
        }
        ax.var_names = std::move(vars.names);
        d.axioms.push_back(std::move(ax));
    }

    void parse_default_line() {
        Default df;
        df.line = lineno;
        Token pr = take();
        if (pr.kind != Token::Kind::Ident || pr.text.empty() ||
            !std::isdigit((unsigned char)pr.text[0])) {
            err(lineno, pr.col, "expected integer priority");
            return;
        }
        df.priority = std::stoi(pr.text);
        if (!expect_punct(":")) return;
        VarCtx vars;
        bool neg = accept_punct("-");
        auto head = parse_atom(vars, false);
        if (!head) return;
        df.head = Literal{*head, !neg};
        if (accept_kw("if")) {
            auto body = parse_body(vars);
            if (!body) return;
            df.body = std::move(*body);
        }
        if (!at_end()) {
            err(lineno, peek().col, "trailing tokens after default");
            return;
        }
        df.var_names = std::move(vars.names);
        d.defaults.push_back(std::move(df));
    }

    void parse_fact_line(std::vector<GroundFact>& dst) {
        GroundFact f;
        f.line = lineno;
        f.positive = !accept_punct("-");
        VarCtx vars;
        auto a = parse_atom(vars, true);
        if (!a) return;
        f.attr = a->attr;
        for (const auto& t : a->args) f.args.push_back(t.id);
        if (!at_end()) {
            err(lineno, peek().col, "trailing tokens after fact");
            return;
        }
        dst.push_back(std::move(f));
    }

    // --- refinement block ------------------------------------------------------
    void parse_refinement_line() {
        if (in_counterpart) {
            if (accept_punct("}")) {
                d.refinement->counterparts.push_back(std::move(pending_counterpart));
                pending_counterpart = {};
                in_counterpart = false;
                return;
            }
            Token coarse = take();
            if (coarse.kind != Token::Kind::Ident) {
                err(lineno, coarse.col, "expected coarse constant");
                return;
            }
            if (d.sig.constant_id(coarse.text) < 0) {
                err(lineno, coarse.col, "undeclared constant '" + coarse.text + "'");
                return;
            }
            if (!expect_punct("=") || !expect_punct("{")) return;
            std::vector<std::string> fines;
            if (!accept_punct("}")) {
                while (true) {
                    Token f = take();
                    if (f.kind != Token::Kind::Ident) {
                        err(lineno, f.col, "expected component constant");
                        return;
                    }
                    fines.push_back(f.text);
                    if (accept_punct("}")) break;
                    if (!expect_punct(",")) return;
                }
            }
            if (fines.empty()) {
                err(lineno, coarse.col, "magnified constant '" + coarse.text + "' has no components");
                return;
            }
            pending_counterpart.components.emplace_back(coarse.text, std::move(fines));
            return;
        }
        if (accept_kw("counterpart")) {
            Token cs = take();
            if (cs.kind != Token::Kind::Ident || d.sig.sort_id(cs.text) < 0) {
                err(lineno, cs.col, "undeclared sort in counterpart");
                return;
            }
            if (!expect_punct("=")) return;
            Token fs = take();
            if (fs.kind != Token::Kind::Ident) {
                err(lineno, fs.col, "expected counterpart sort name");
                return;
            }
            pending_counterpart.coarse_sort = cs.text;
            pending_counterpart.fine_sort = fs.text;
            if (!expect_punct("{")) return;
            in_counterpart = true;
            return;
        }
        if (accept_kw("fact")) {
            RefinementSpec::FineFact f;
            f.line = lineno;
            f.positive = !accept_punct("-");
            Token name = take();
            if (name.kind != Token::Kind::Ident) {
                err(lineno, name.col, "expected attribute name");
                return;
            }
            f.attr = name.text;
            if (accept_punct("(")) {
                while (true) {
                    Token a = take();
                    if (a.kind != Token::Kind::Ident) {
                        err(lineno, a.col, "expected constant");
                        return;
                    }
                    f.args.push_back(a.text);
                    if (accept_punct(")")) break;
                    if (!expect_punct(",")) return;
                }
            }
            d.refinement->facts.push_back(std::move(f));
            return;
        }
        err(lineno, peek().col ? peek().col : 1, "expected 'counterpart' or 'fact'");
    }

    void parse_line(const std::vector<Token>& t, int line) {
        toks = &t;
        pos = 0;
        lineno = line;
        if (t.empty()) return;
        if (!in_counterpart && try_section_header(t)) {
            if (!at_end() && pos < t.size() - 0) {
                // header consumed by try_section_header; nothing else expected
            }
            return;
        }
        switch (section) {
            case Section::None:
                err(line, t[0].col, "content before any section header");
                break;
            case Section::Sorts: parse_sort_line(); break;
            case Section::Statics: parse_attr_line(AttrKind::Static); break;
            case Section::FluBasic: parse_attr_line(AttrKind::BasicFluent); break;
            case Section::FluDefined: parse_attr_line(AttrKind::DefinedFluent); break;
            case Section::ActAgent: parse_attr_line(AttrKind::AgentAction); break;
            case Section::ActExo: parse_attr_line(AttrKind::ExoAction); break;
            case Section::ActKnow: parse_attr_line(AttrKind::KnowledgeAction); break;
            case Section::Axioms: parse_axiom_line(); break;
            case Section::Defaults: parse_default_line(); break;
            case Section::Facts: parse_fact_line(d.facts); break;
            case Section::Initial: parse_fact_line(d.initial_obs); break;
            case Section::Refinement: parse_refinement_line(); break;
        }
    }
};

} // namespace

ParseResult parse_domain(std::string_view text, const std::string& filename) {
    Parser p{filename};
    int lineno = 0;
    for (std::string_view rest = text; !rest.empty() || lineno == 0;) {
        ++lineno;
        std::size_t nl = rest.find('\n');
        std::string_view line = nl == std::string_view::npos ? rest : rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        auto toks = lex_line(line, lineno, filename, p.diags);
        p.parse_line(toks, lineno);
        if (nl == std::string_view::npos) break;
    }
    if (p.in_counterpart)
        p.err(lineno, 1, "unterminated counterpart block");

    if (p.diags.empty()) {
        resolve_variables(p.d, p.diags);
        p.d.validate(p.diags);
    }
    if (!p.diags.empty()) return DomainError{std::move(p.diags)};
    return std::move(p.d);
}

SystemDescription parse_domain_or_throw(std::string_view text, const std::string& filename) {
    auto r = parse_domain(text, filename);
    if (auto* err = std::get_if<DomainError>(&r))
        throw std::runtime_error(err->str());
    return std::move(std::get<SystemDescription>(r));
}

SystemDescription load_domain_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open domain file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_domain_or_throw(ss.str(), path);
}

} // namespace resolute
