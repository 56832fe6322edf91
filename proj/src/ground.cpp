#include "resolute/ground.hpp"

#include <algorithm>
#include <memory>

namespace resolute {

namespace {

// Sorted member list by constant *name*, so dense ids follow the textual
// ordering regardless of interning order.
std::vector<int> members_by_name(const Signature& sig, int sort) {
    std::vector<int> m = sig.members(sort);
    std::sort(m.begin(), m.end(), [&](int a, int b) {
        return sig.constant_name(a) < sig.constant_name(b);
    });
    return m;
}

} // namespace

std::vector<int> GroundedDescription::atom_args(int atom) const {
    for (const auto& t : atom_tables_) {
        if (atom >= t.base && atom < t.base + t.count) {
            int off = atom - t.base;
            std::vector<int> args(t.arg_members.size());
            for (int i = (int)t.arg_members.size() - 1; i >= 0; --i) {
                int n = (int)t.arg_members[i].size();
                args[i] = t.arg_members[i][off % n];
                off /= n;
            }
            return args;
        }
    }
    return {};
}

int GroundedDescription::table_lookup(const std::vector<AttrTable>& tables,
                                      const std::vector<int>& table_of_attr, int attr,
                                      const std::vector<int>& args) const {
    if (attr < 0 || attr >= (int)table_of_attr.size()) return -1;
    int ti = table_of_attr[attr];
    if (ti < 0) return -1;
    const AttrTable& t = tables[ti];
    int off = 0;
    for (std::size_t i = 0; i < args.size(); ++i) {
        int c = args[i];
        if (c < 0 || c >= (int)t.arg_rank[i].size()) return -1;
        int r = t.arg_rank[i][c];
        if (r < 0) return -1;
        off = off * (int)t.arg_members[i].size() + r;
    }
    return t.base + off;
}

int GroundedDescription::atom_id(int attr, const std::vector<int>& args) const {
    return table_lookup(atom_tables_, atom_table_of_attr_, attr, args);
}
int GroundedDescription::action_id(int attr, const std::vector<int>& args) const {
    return table_lookup(action_tables_, action_table_of_attr_, attr, args);
}

std::string GroundedDescription::atom_name(int atom) const {
    return atom_to_string(sig(), atom_attr_[atom], atom_args(atom));
}
std::vector<int> GroundedDescription::action_args(int action) const {
    for (const auto& t : action_tables_) {
        if (action >= t.base && action < t.base + t.count) {
            int off = action - t.base;
            std::vector<int> args(t.arg_members.size());
            for (int i = (int)t.arg_members.size() - 1; i >= 0; --i) {
                int n = (int)t.arg_members[i].size();
                args[i] = t.arg_members[i][off % n];
                off /= n;
            }
            return args;
        }
    }
    return {};
}
std::string GroundedDescription::action_name(int action) const {
    return atom_to_string(sig(), action_attr_[action], action_args(action));
}

namespace {

// parses "name(a,b,c)" against a lookup function
template <typename F>
int parse_ground_term(const Signature& sig, const std::string& text, F&& lookup) {
    auto lp = text.find('(');
    std::string name = lp == std::string::npos ? text : text.substr(0, lp);
    int attr = sig.attr_id(std::string(trim(name)));
    if (attr < 0) return -1;
    std::vector<int> args;
    if (lp != std::string::npos) {
        auto rp = text.rfind(')');
        if (rp == std::string::npos || rp < lp) return -1;
        std::string inner = text.substr(lp + 1, rp - lp - 1);
        for (auto part : split(inner, ',')) {
            int c = sig.constant_id(std::string(trim(part)));
            if (c < 0) return -1;
            args.push_back(c);
        }
    }
    return lookup(attr, args);
}

} // namespace

int GroundedDescription::action_by_name(const std::string& text) const {
    return parse_ground_term(sig(), text, [&](int a, const std::vector<int>& args) {
        return action_id(a, args);
    });
}
int GroundedDescription::atom_by_name(const std::string& text) const {
    return parse_ground_term(sig(), text, [&](int a, const std::vector<int>& args) {
        return atom_id(a, args);
    });
}

bool GroundedDescription::action_is_agent(int action) const {
    return sig().attr(action_attr_[action]).kind == AttrKind::AgentAction;
}
bool GroundedDescription::action_is_knowledge(int action) const {
    return sig().attr(action_attr_[action]).kind == AttrKind::KnowledgeAction;
}

const std::vector<int>& GroundedDescription::causal_for(int action) const {
    return causal_for_[action];
}
const std::vector<int>& GroundedDescription::exec_for(int action) const {
    return exec_for_[action];
}

namespace {

struct Instantiator {
    const SystemDescription& desc;
    GroundedDescription& g;
    const GroundLimits& limits;
    std::size_t& enumerated;

    // Substitutes the current assignment into an atom; returns -1 if the
    // combination falls outside the attribute's sort product.
    int subst_atom(const AtomRef& a, const std::vector<int>& assign, bool as_action) {
        std::vector<int> args(a.args.size());
        for (std::size_t i = 0; i < a.args.size(); ++i)
            args[i] = a.args[i].is_var ? assign[a.args[i].id] : a.args[i].id;
        return as_action ? g.action_id(a.attr, args) : g.atom_id(a.attr, args);
    }

    int term_val(const Term& t, const std::vector<int>& assign) {
        return t.is_var ? assign[t.id] : t.id;
    }

    // Enumerate all sort-respecting assignments for `domains`, invoking
    // fn(assign). Counts instances against the budget.
    template <typename Fn>
    void enumerate(const std::vector<std::vector<int>>& domains, Fn&& fn) {
        std::vector<int> assign(domains.size(), -1);
        std::vector<std::size_t> idx(domains.size(), 0);
        std::size_t depth = 0;
        if (domains.empty()) {
            bump();
            fn(assign);
            return;
        }
        while (true) {
            if (idx[depth] >= domains[depth].size()) {
                if (depth == 0) return;
                idx[depth] = 0;
                --depth;
                ++idx[depth];
                continue;
            }
            assign[depth] = domains[depth][idx[depth]];
            if (depth + 1 == domains.size()) {
                bump();
                fn(assign);
                ++idx[depth];
            } else {
                ++depth;
            }
        }
    }

    void bump() {
        if (++enumerated > limits.max_axiom_instances)
            throw ResourceLimitError("grounding budget exceeded (" +
                                     std::to_string(limits.max_axiom_instances) +
                                     " instances)");
    }

    // Builds the ground body. Returns false if the instance is vacuous
    // (a static literal or guard that can never hold) and should be
    // dropped; true statics are simplified away.
    bool build_body(const std::vector<BodyElem>& body, const std::vector<int>& assign,
                    std::vector<GroundLit>& out) {
        for (const auto& b : body) {
            switch (b.kind) {
                case BodyElem::Kind::Neq:
                    if (term_val(b.lhs, assign) == term_val(b.rhs, assign)) return false;
                    break;
                case BodyElem::Kind::Eq:
                    if (term_val(b.lhs, assign) != term_val(b.rhs, assign)) return false;
                    break;
                case BodyElem::Kind::SortGuard: {
                    int c = term_val(b.guard_term, assign);
                    if (!desc.sig.is_member(b.guard_sort, c)) return false;
                    break;
                }
                case BodyElem::Kind::Lit: {
                    int atom = subst_atom(b.lit.atom, assign, false);
                    if (atom < 0) return false;
                    if (g.atom_is_static(atom)) {
                        if (g.static_value(atom) != b.lit.positive) return false;
                        break;  // satisfied static, drop from body
                    }
                    out.push_back({atom, b.lit.positive});
                    break;
                }
            }
        }
        return true;
    }
};

} // namespace

GroundedDescription ground(const SystemDescription& desc, const GroundLimits& limits) {
    GroundedDescription g;
    g.desc_ = std::make_shared<SystemDescription>(desc);
    const SystemDescription& d = *g.desc_;
    const Signature& sig = d.sig;

    // ---- atom and action tables, attributes in name order ----
    std::vector<int> attr_order(sig.attr_count());
    for (int i = 0; i < sig.attr_count(); ++i) attr_order[i] = i;
    std::sort(attr_order.begin(), attr_order.end(), [&](int a, int b) {
        return sig.attr(a).name < sig.attr(b).name;
    });

    g.atom_table_of_attr_.assign(sig.attr_count(), -1);
    g.action_table_of_attr_.assign(sig.attr_count(), -1);

    auto build_table = [&](int attr, int base) {
        GroundedDescription::AttrTable t;
        t.attr = attr;
        t.base = base;
        t.count = 1;
        for (int s : sig.attr(attr).arg_sorts) {
            auto mem = members_by_name(sig, s);
            t.count *= (int)mem.size();
            std::vector<int> rank(sig.constant_count(), -1);
            for (std::size_t i = 0; i < mem.size(); ++i) rank[mem[i]] = (int)i;
            t.arg_members.push_back(std::move(mem));
            t.arg_rank.push_back(std::move(rank));
        }
        return t;
    };

    int atom_base = 0, action_base = 0;
    for (int attr : attr_order) {
        AttrKind k = sig.attr(attr).kind;
        if (is_action(k)) {
            auto t = build_table(attr, action_base);
            action_base += t.count;
            g.action_table_of_attr_[attr] = (int)g.action_tables_.size();
            g.action_tables_.push_back(std::move(t));
        } else {
            auto t = build_table(attr, atom_base);
            atom_base += t.count;
            g.atom_table_of_attr_[attr] = (int)g.atom_tables_.size();
            g.atom_tables_.push_back(std::move(t));
        }
        if ((std::size_t)atom_base + action_base > limits.max_atoms)
            throw ResourceLimitError("atom budget exceeded");
    }

    g.atom_attr_.resize(atom_base);
    for (const auto& t : g.atom_tables_)
        for (int i = 0; i < t.count; ++i) g.atom_attr_[t.base + i] = t.attr;
    g.action_attr_.resize(action_base);
    for (const auto& t : g.action_tables_)
        for (int i = 0; i < t.count; ++i) g.action_attr_[t.base + i] = t.attr;

    for (int a = 0; a < atom_base; ++a) {
        switch (g.kind_of(a)) {
            case AttrKind::Static: g.static_atoms_.push_back(a); break;
            case AttrKind::BasicFluent: g.basic_atoms_.push_back(a); break;
            case AttrKind::DefinedFluent: g.defined_atoms_.push_back(a); break;
            default: break;
        }
    }
    for (int a = 0; a < action_base; ++a) {
        switch (sig.attr(g.action_attr_[a]).kind) {
            case AttrKind::AgentAction: g.agent_actions_.push_back(a); break;
            case AttrKind::ExoAction: g.exo_actions_.push_back(a); break;
            case AttrKind::KnowledgeAction: g.knowledge_actions_.push_back(a); break;
            default: break;
        }
    }

    Instantiator inst{d, g, limits, g.instances_enumerated_};

    // ---- statics: facts closed under static-head constraints ----
    g.static_values_ = Bitset(atom_base);
    for (const auto& f : d.facts) {
        int atom = g.atom_id(f.attr, f.args);
        if (atom < 0) throw std::runtime_error("fact outside signature: " +
                                               atom_to_string(sig, f.attr, f.args));
        if (f.positive) g.static_values_.set(atom, true);
    }
    struct StaticRule { int head; std::vector<std::pair<int, bool>> body; };
    std::vector<StaticRule> static_rules;
    for (std::size_t ai = 0; ai < d.axioms.size(); ++ai) {
        const Axiom& ax = d.axioms[ai];
        if (ax.kind != Axiom::Kind::Constraint) continue;
        if (sig.attr(ax.head->atom.attr).kind != AttrKind::Static) continue;
        for (const auto& b : ax.body)
            if (b.kind == BodyElem::Kind::Lit &&
                sig.attr(b.lit.atom.attr).kind != AttrKind::Static)
                throw std::runtime_error("static-head constraint with fluent body (line " +
                                         std::to_string(ax.line) + ")");
        if (!ax.head->positive)
            throw std::runtime_error("negative static-head constraints are not supported (line " +
                                     std::to_string(ax.line) + ")");
        inst.enumerate(ax.var_domains, [&](const std::vector<int>& assign) {
            StaticRule r;
            int head = inst.subst_atom(ax.head->atom, assign, false);
            if (head < 0) return;
            r.head = head;
            bool keep = true;
            for (const auto& b : ax.body) {
                switch (b.kind) {
                    case BodyElem::Kind::Neq:
                        if (inst.term_val(b.lhs, assign) == inst.term_val(b.rhs, assign)) keep = false;
                        break;
                    case BodyElem::Kind::Eq:
                        if (inst.term_val(b.lhs, assign) != inst.term_val(b.rhs, assign)) keep = false;
                        break;
                    case BodyElem::Kind::SortGuard:
                        if (!sig.is_member(b.guard_sort, inst.term_val(b.guard_term, assign))) keep = false;
                        break;
                    case BodyElem::Kind::Lit: {
                        int atom = inst.subst_atom(b.lit.atom, assign, false);
                        if (atom < 0) { keep = false; break; }
                        r.body.push_back({atom, b.lit.positive});
                        break;
                    }
                }
                if (!keep) break;
            }
            if (keep) static_rules.push_back(std::move(r));
        });
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& r : static_rules) {
            bool holds = true;
            for (auto [atom, pos] : r.body)
                if (g.static_values_.test(atom) != pos) { holds = false; break; }
            if (holds && !g.static_values_.test(r.head)) {
                g.static_values_.set(r.head, true);
                changed = true;
            }
        }
    }

    // ---- axioms ----
    g.causal_for_.resize(action_base);
    g.exec_for_.resize(action_base);
    for (std::size_t ai = 0; ai < d.axioms.size(); ++ai) {
        const Axiom& ax = d.axioms[ai];
        if (ax.kind == Axiom::Kind::Constraint &&
            sig.attr(ax.head->atom.attr).kind == AttrKind::Static)
            continue;  // folded into the statics fixpoint above
        inst.enumerate(ax.var_domains, [&](const std::vector<int>& assign) {
            GroundAxiom ga;
            ga.kind = ax.kind;
            ga.schema = (int)ai;
            if (ax.trigger) {
                ga.action = inst.subst_atom(*ax.trigger, assign, true);
                if (ga.action < 0) return;
            }
            if (ax.head) {
                int h = inst.subst_atom(ax.head->atom, assign, false);
                if (h < 0) return;
                ga.head = {h, ax.head->positive};
            } else {
                ga.head = {-1, true};
            }
            if (!inst.build_body(ax.body, assign, ga.body)) return;
            int idx = (int)g.axioms_.size();
            switch (ax.kind) {
                case Axiom::Kind::Causal:
                    g.causal_for_[ga.action].push_back(idx);
                    break;
                case Axiom::Kind::Executability:
                    g.exec_for_[ga.action].push_back(idx);
                    break;
                case Axiom::Kind::Constraint:
                    g.constraint_idx_.push_back(idx);
                    if (g.atom_is_defined(ga.head.atom)) g.defined_head_idx_.push_back(idx);
                    else g.basic_head_idx_.push_back(idx);
                    break;
                case Axiom::Kind::Never:
                    g.never_idx_.push_back(idx);
                    break;
            }
            g.axioms_.push_back(std::move(ga));
        });
    }

    // ---- defaults ----
    for (std::size_t di = 0; di < d.defaults.size(); ++di) {
        const Default& df = d.defaults[di];
        inst.enumerate(df.var_domains, [&](const std::vector<int>& assign) {
            GroundDefault gd;
            gd.schema = (int)di;
            gd.priority = df.priority;
            int h = inst.subst_atom(df.head.atom, assign, false);
            if (h < 0) return;
            gd.head = {h, df.head.positive};
            if (!inst.build_body(df.body, assign, gd.body)) return;
            g.defaults_.push_back(std::move(gd));
        });
    }
    // deterministic application order: by priority, then schema, then head atom
    std::stable_sort(g.defaults_.begin(), g.defaults_.end(),
                     [](const GroundDefault& a, const GroundDefault& b) {
                         if (a.priority != b.priority) return a.priority < b.priority;
                         if (a.schema != b.schema) return a.schema < b.schema;
                         return a.head.atom < b.head.atom;
                     });

    return g;
}

} // namespace resolute
