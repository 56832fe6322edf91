#include "resolute/ast.hpp"
#include "resolute/util.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace resolute {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

std::string Diagnostic::str() const {
    std::ostringstream os;
    os << file << ":" << line << ":" << col << ": " << message;
    return os.str();
}

std::string DomainError::str() const {
    std::string s;
    for (const auto& d : diagnostics) {
        s += d.str();
        s += '\n';
    }
    return s;
}

int Signature::intern_constant(const std::string& name) {
    auto it = constant_ids_.find(name);
    if (it != constant_ids_.end()) return it->second;
    int id = (int)constants_.size();
    constants_.push_back(name);
    constant_ids_[name] = id;
    return id;
}

int Signature::constant_id(const std::string& name) const {
    auto it = constant_ids_.find(name);
    return it == constant_ids_.end() ? -1 : it->second;
}

int Signature::add_base_sort(const std::string& name, const std::vector<std::string>& members) {
    int id = (int)sort_names_.size();
    sort_names_.push_back(name);
    sort_ids_[name] = id;
    sort_base_.push_back(true);
    std::vector<int> ids;
    ids.reserve(members.size());
    for (const auto& m : members) ids.push_back(intern_constant(m));
    sort_members_.push_back(std::move(ids));
    sort_children_.emplace_back();
    invalidate_cache();
    return id;
}

int Signature::add_union_sort(const std::string& name, const std::vector<int>& children) {
    int id = (int)sort_names_.size();
    sort_names_.push_back(name);
    sort_ids_[name] = id;
    sort_base_.push_back(false);
    sort_members_.emplace_back();
    sort_children_.push_back(children);
    invalidate_cache();
    return id;
}

int Signature::sort_id(const std::string& name) const {
    auto it = sort_ids_.find(name);
    return it == sort_ids_.end() ? -1 : it->second;
}

const std::vector<int>& Signature::members(int sort) const {
    if (members_cache_.empty()) {
        members_cache_.resize(sort_names_.size());
        // children may appear in any order; iterate until all resolved
        std::vector<bool> done(sort_names_.size(), false);
        bool progress = true;
        while (progress) {
            progress = false;
            for (std::size_t s = 0; s < sort_names_.size(); ++s) {
                if (done[s]) continue;
                if (sort_base_[s]) {
                    members_cache_[s] = sort_members_[s];
                    std::sort(members_cache_[s].begin(), members_cache_[s].end());
                    done[s] = true;
                    progress = true;
                    continue;
                }
                bool ready = true;
                for (int c : sort_children_[s])
                    if (!done[c]) { ready = false; break; }
                if (!ready) continue;
                std::set<int> acc;
                for (int c : sort_children_[s])
                    acc.insert(members_cache_[c].begin(), members_cache_[c].end());
                members_cache_[s].assign(acc.begin(), acc.end());
                done[s] = true;
                progress = true;
            }
        }
        for (std::size_t s = 0; s < sort_names_.size(); ++s)
            if (!done[s]) members_cache_[s].clear();  // cyclic; validate() reports it
    }
    return members_cache_[sort];
}

bool Signature::is_member(int sort, int constant) const {
    const auto& m = members(sort);
    return std::binary_search(m.begin(), m.end(), constant);
}

int Signature::add_attr(const std::string& name, AttrKind kind, const std::vector<int>& arg_sorts) {
    int id = (int)attrs_.size();
    attrs_.push_back({name, kind, arg_sorts});
    attr_ids_[name] = id;
    return id;
}

int Signature::attr_id(const std::string& name) const {
    auto it = attr_ids_.find(name);
    return it == attr_ids_.end() ? -1 : it->second;
}

bool Signature::validate(std::vector<Diagnostic>& out) const {
    std::size_t before = out.size();
    // hierarchy must be acyclic
    std::vector<int> state(sort_names_.size(), 0);
    std::function<bool(int)> dfs = [&](int s) {
        if (state[s] == 1) return false;
        if (state[s] == 2) return true;
        state[s] = 1;
        for (int c : sort_children_[s])
            if (!dfs(c)) return false;
        state[s] = 2;
        return true;
    };
    for (std::size_t s = 0; s < sort_names_.size(); ++s) {
        if (!dfs((int)s)) {
            out.push_back({"", 0, 0, "cycle in sort hierarchy involving '" + sort_names_[s] + "'"});
            break;
        }
    }
    for (std::size_t s = 0; s < sort_names_.size(); ++s)
        if (members((int)s).empty())
            out.push_back({"", 0, 0, "empty sort '" + sort_names_[s] + "'"});
    for (const auto& a : attrs_)
        for (int arg : a.arg_sorts)
            if (arg < 0 || arg >= (int)sort_names_.size())
                out.push_back({"", 0, 0, "attribute '" + a.name + "' references an undeclared sort"});
    return out.size() == before;
}

bool Signature::operator==(const Signature& o) const {
    return constants_ == o.constants_ && sort_names_ == o.sort_names_ &&
           sort_base_ == o.sort_base_ && sort_members_ == o.sort_members_ &&
           sort_children_ == o.sort_children_ &&
           attrs_.size() == o.attrs_.size() &&
           [&] {
               for (std::size_t i = 0; i < attrs_.size(); ++i)
                   if (attrs_[i].name != o.attrs_[i].name ||
                       attrs_[i].kind != o.attrs_[i].kind ||
                       attrs_[i].arg_sorts != o.attrs_[i].arg_sorts)
                       return false;
               return true;
           }();
}

bool SystemDescription::operator==(const SystemDescription& o) const {
    return sig == o.sig && axioms == o.axioms && defaults == o.defaults &&
           facts == o.facts && initial_obs == o.initial_obs && refinement == o.refinement;
}

namespace {

// Intersect variable domains over all argument positions in which the
// variable occurs; a guard narrows it to the guard sort's members.
struct VarResolver {
    const Signature& sig;
    std::vector<Diagnostic>& out;
    int line;
    std::vector<std::string>& names;
    std::vector<std::vector<int>> domains;
    std::vector<bool> seen;
    bool ok = true;

    VarResolver(const Signature& s, std::vector<Diagnostic>& o, int ln,
                std::vector<std::string>& nm)
        : sig(s), out(o), line(ln), names(nm), domains(nm.size()), seen(nm.size(), false) {}

    void meet(int var, const std::vector<int>& members) {
        if (!seen[var]) {
            seen[var] = true;
            domains[var] = members;
            return;
        }
        std::vector<int> inter;
        std::set_intersection(domains[var].begin(), domains[var].end(),
                              members.begin(), members.end(),
                              std::back_inserter(inter));
        domains[var] = std::move(inter);
    }

    void visit_atom(const AtomRef& a) {
        if (a.attr < 0) return;
        const auto& attr = sig.attr(a.attr);
        for (std::size_t i = 0; i < a.args.size() && i < attr.arg_sorts.size(); ++i)
            if (a.args[i].is_var)
                meet(a.args[i].id, sig.members(attr.arg_sorts[i]));
    }

    void visit_body(const std::vector<BodyElem>& body) {
        for (const auto& b : body) {
            switch (b.kind) {
                case BodyElem::Kind::Lit: visit_atom(b.lit.atom); break;
                case BodyElem::Kind::SortGuard:
                    if (b.guard_term.is_var)
                        meet(b.guard_term.id, sig.members(b.guard_sort));
                    break;
                default: break;
            }
        }
    }

    bool finish() {
        for (std::size_t v = 0; v < domains.size(); ++v) {
            if (domains[v].empty()) {
                out.push_back({"", line, 1,
                               "variable '" + names[v] + "' has no consistent sort"});
                ok = false;
            }
        }
        return ok;
    }
};

} // namespace

bool resolve_variables(SystemDescription& d, std::vector<Diagnostic>& out) {
    bool ok = true;
    for (auto& ax : d.axioms) {
        VarResolver r(d.sig, out, ax.line, ax.var_names);
        if (ax.trigger) r.visit_atom(*ax.trigger);
        if (ax.head) r.visit_atom(ax.head->atom);
        r.visit_body(ax.body);
        if (!r.finish()) ok = false;
        ax.var_domains = std::move(r.domains);
    }
    for (auto& df : d.defaults) {
        VarResolver r(d.sig, out, df.line, df.var_names);
        r.visit_atom(df.head.atom);
        r.visit_body(df.body);
        if (!r.finish()) ok = false;
        df.var_domains = std::move(r.domains);
    }
    return ok;
}

bool SystemDescription::validate(std::vector<Diagnostic>& out) const {
    std::size_t before = out.size();
    sig.validate(out);

    auto head_kind = [&](const Literal& l) { return sig.attr(l.atom.attr).kind; };

    for (const auto& ax : axioms) {
        switch (ax.kind) {
            case Axiom::Kind::Causal: {
                if (!ax.head || !ax.trigger) {
                    out.push_back({"", ax.line, 1, "malformed causal law"});
                    break;
                }
                AttrKind hk = head_kind(*ax.head);
                if (hk != AttrKind::BasicFluent)
                    out.push_back({"", ax.line, 1,
                                   "causal law head must be a basic fluent literal"});
                if (!is_action(sig.attr(ax.trigger->attr).kind))
                    out.push_back({"", ax.line, 1, "causal law trigger must be an action"});
                break;
            }
            case Axiom::Kind::Constraint: {
                if (!ax.head) {
                    out.push_back({"", ax.line, 1, "state constraint requires a head"});
                    break;
                }
                AttrKind hk = head_kind(*ax.head);
                if (is_action(hk))
                    out.push_back({"", ax.line, 1, "state constraint head cannot be an action"});
                if (hk == AttrKind::DefinedFluent && !ax.head->positive)
                    out.push_back({"", ax.line, 1,
                                   "defined fluents may only appear positively in constraint heads"});
                break;
            }
            case Axiom::Kind::Executability: {
                if (!ax.trigger) {
                    out.push_back({"", ax.line, 1, "executability condition requires an action"});
                    break;
                }
                if (!is_action(sig.attr(ax.trigger->attr).kind))
                    out.push_back({"", ax.line, 1, "executability trigger must be an action"});
                break;
            }
            case Axiom::Kind::Never: {
                if (ax.body.empty())
                    out.push_back({"", ax.line, 1, "never statement requires a body"});
                break;
            }
        }
        for (const auto& b : ax.body)
            if (b.kind == BodyElem::Kind::Lit && is_action(head_kind(b.lit)))
                out.push_back({"", ax.line, 1, "action symbols cannot appear in bodies"});
    }
    for (const auto& df : defaults) {
        if (head_kind(df.head) != AttrKind::BasicFluent)
            out.push_back({"", df.line, 1, "default head must be a basic fluent literal"});
    }
    for (const auto& f : facts) {
        if (sig.attr(f.attr).kind != AttrKind::Static)
            out.push_back({"", f.line, 1, "facts section admits only statics"});
    }
    for (const auto& f : initial_obs) {
        if (!is_fluent(sig.attr(f.attr).kind))
            out.push_back({"", f.line, 1, "initial section admits only fluents"});
    }
    return out.size() == before;
}

std::string atom_to_string(const Signature& sig, int attr, const std::vector<int>& args) {
    std::string s = sig.attr(attr).name;
    if (!args.empty()) {
        s += '(';
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (i) s += ',';
            s += sig.constant_name(args[i]);
        }
        s += ')';
    }
    return s;
}

std::string literal_to_string(const Signature& sig, int attr, const std::vector<int>& args, bool positive) {
    return (positive ? "" : "-") + atom_to_string(sig, attr, args);
}

namespace {

std::string term_str(const Signature& sig, const std::vector<std::string>& vars, const Term& t) {
    return t.is_var ? vars[t.id] : sig.constant_name(t.id);
}

std::string atomref_str(const Signature& sig, const std::vector<std::string>& vars, const AtomRef& a) {
    std::string s = sig.attr(a.attr).name;
    if (!a.args.empty()) {
        s += '(';
        for (std::size_t i = 0; i < a.args.size(); ++i) {
            if (i) s += ", ";
            s += term_str(sig, vars, a.args[i]);
        }
        s += ')';
    }
    return s;
}

std::string body_str(const Signature& sig, const std::vector<std::string>& vars,
                     const std::vector<BodyElem>& body) {
    std::string s;
    for (std::size_t i = 0; i < body.size(); ++i) {
        if (i) s += ", ";
        const auto& b = body[i];
        switch (b.kind) {
            case BodyElem::Kind::Lit:
                if (!b.lit.positive) s += '-';
                s += atomref_str(sig, vars, b.lit.atom);
                break;
            case BodyElem::Kind::Neq:
                s += term_str(sig, vars, b.lhs) + " != " + term_str(sig, vars, b.rhs);
                break;
            case BodyElem::Kind::Eq:
                s += term_str(sig, vars, b.lhs) + " == " + term_str(sig, vars, b.rhs);
                break;
            case BodyElem::Kind::SortGuard:
                s += sig.sort_name(b.guard_sort) + "(" + term_str(sig, vars, b.guard_term) + ")";
                break;
        }
    }
    return s;
}

} // namespace

std::string print_domain(const SystemDescription& d) {
    const Signature& sig = d.sig;
    std::ostringstream os;

    os << "sorts:\n";
    for (int s = 0; s < sig.sort_count(); ++s) {
        os << "  " << sig.sort_name(s) << " = ";
        if (sig.sort_is_base(s)) {
            os << "{";
            const auto& mem = sig.base_members(s);
            for (std::size_t i = 0; i < mem.size(); ++i) {
                if (i) os << ", ";
                os << sig.constant_name(mem[i]);
            }
            os << "}";
        } else {
            const auto& ch = sig.sort_children(s);
            for (std::size_t i = 0; i < ch.size(); ++i) {
                if (i) os << " + ";
                os << sig.sort_name(ch[i]);
            }
        }
        os << "\n";
    }

    auto print_attrs = [&](const char* header, AttrKind kind) {
        bool any = false;
        for (int a = 0; a < sig.attr_count(); ++a)
            if (sig.attr(a).kind == kind) { any = true; break; }
        if (!any) return;
        os << header << "\n";
        for (int a = 0; a < sig.attr_count(); ++a) {
            const auto& at = sig.attr(a);
            if (at.kind != kind) continue;
            os << "  " << at.name;
            if (!at.arg_sorts.empty()) {
                os << "(";
                for (std::size_t i = 0; i < at.arg_sorts.size(); ++i) {
                    if (i) os << ", ";
                    os << sig.sort_name(at.arg_sorts[i]);
                }
                os << ")";
            }
            os << "\n";
        }
    };
    print_attrs("statics:", AttrKind::Static);
    print_attrs("fluents basic:", AttrKind::BasicFluent);
    print_attrs("fluents defined:", AttrKind::DefinedFluent);
    print_attrs("actions agent:", AttrKind::AgentAction);
    print_attrs("actions exogenous:", AttrKind::ExoAction);
    print_attrs("actions knowledge:", AttrKind::KnowledgeAction);

    if (!d.axioms.empty()) os << "axioms:\n";
    for (const auto& ax : d.axioms) {
        os << "  ";
        switch (ax.kind) {
            case Axiom::Kind::Causal:
                os << atomref_str(sig, ax.var_names, *ax.trigger) << " causes ";
                if (!ax.head->positive) os << '-';
                os << atomref_str(sig, ax.var_names, ax.head->atom);
                if (!ax.body.empty()) os << " if " << body_str(sig, ax.var_names, ax.body);
                break;
            case Axiom::Kind::Constraint:
                if (!ax.head->positive) os << '-';
                os << atomref_str(sig, ax.var_names, ax.head->atom);
                os << " if " << body_str(sig, ax.var_names, ax.body);
                break;
            case Axiom::Kind::Executability:
                os << "impossible " << atomref_str(sig, ax.var_names, *ax.trigger);
                if (!ax.body.empty()) os << " if " << body_str(sig, ax.var_names, ax.body);
                break;
            case Axiom::Kind::Never:
                os << "never " << body_str(sig, ax.var_names, ax.body);
                break;
        }
        os << "\n";
    }

    if (!d.defaults.empty()) os << "defaults:\n";
    for (const auto& df : d.defaults) {
        os << "  " << df.priority << ": ";
        if (!df.head.positive) os << '-';
        os << atomref_str(sig, df.var_names, df.head.atom);
        if (!df.body.empty()) os << " if " << body_str(sig, df.var_names, df.body);
        os << "\n";
    }

    if (!d.facts.empty()) os << "facts:\n";
    for (const auto& f : d.facts)
        os << "  " << literal_to_string(sig, f.attr, f.args, f.positive) << "\n";

    if (!d.initial_obs.empty()) os << "initial:\n";
    for (const auto& f : d.initial_obs)
        os << "  " << literal_to_string(sig, f.attr, f.args, f.positive) << "\n";

    if (d.refinement) {
        os << "refinement:\n";
        for (const auto& c : d.refinement->counterparts) {
            os << "  counterpart " << c.coarse_sort << " = " << c.fine_sort << " {\n";
            for (const auto& [coarse, fines] : c.components) {
                os << "    " << coarse << " = {";
                for (std::size_t i = 0; i < fines.size(); ++i) {
                    if (i) os << ", ";
                    os << fines[i];
                }
                os << "}\n";
            }
            os << "  }\n";
        }
        for (const auto& f : d.refinement->facts) {
            os << "  fact " << (f.positive ? "" : "-") << f.attr;
            if (!f.args.empty()) {
                os << "(";
                for (std::size_t i = 0; i < f.args.size(); ++i) {
                    if (i) os << ", ";
                    os << f.args[i];
                }
                os << ")";
            }
            os << "\n";
        }
    }
    return os.str();
}

} // namespace resolute
