#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace resolute {

// A diagnostic produced by parsing or validation, printable as
// "file:line:col: message".
struct Diagnostic {
    std::string file;
    int line = 0;
    int col = 0;
    std::string message;

    std::string str() const;
};

struct DomainError {
    std::vector<Diagnostic> diagnostics;
    std::string str() const;
};

enum class AttrKind {
    Static,
    BasicFluent,
    DefinedFluent,
    AgentAction,
    ExoAction,
    KnowledgeAction,   // sensing actions introduced by refinement
};

inline bool is_fluent(AttrKind k) {
    return k == AttrKind::BasicFluent || k == AttrKind::DefinedFluent;
}
inline bool is_action(AttrKind k) {
    return k == AttrKind::AgentAction || k == AttrKind::ExoAction ||
           k == AttrKind::KnowledgeAction;
}

// Sorted signature: sorts with member constants arranged in a DAG, plus
// typed statics, fluents and actions.
class Signature {
public:
    // constants are interned once and referenced by id everywhere
    int intern_constant(const std::string& name);
    int constant_id(const std::string& name) const;  // -1 if absent
    const std::string& constant_name(int id) const { return constants_[id]; }
    int constant_count() const { return (int)constants_.size(); }

    // a sort is either a base sort (explicit members) or a union of other sorts
    int add_base_sort(const std::string& name, const std::vector<std::string>& members);
    int add_union_sort(const std::string& name, const std::vector<int>& children);
    int sort_id(const std::string& name) const;  // -1 if absent
    const std::string& sort_name(int id) const { return sort_names_[id]; }
    int sort_count() const { return (int)sort_names_.size(); }
    const std::vector<int>& sort_children(int id) const { return sort_children_[id]; }
    bool sort_is_base(int id) const { return sort_base_[id]; }

    // transitive member set, sorted ascending by constant id
    const std::vector<int>& members(int sort) const;
    bool is_member(int sort, int constant) const;
    // declared members of a base sort, in declaration order
    const std::vector<int>& base_members(int sort) const { return sort_members_[sort]; }

    struct Attr {
        std::string name;
        AttrKind kind;
        std::vector<int> arg_sorts;
    };
    int add_attr(const std::string& name, AttrKind kind, const std::vector<int>& arg_sorts);
    int attr_id(const std::string& name) const;  // -1 if absent
    const Attr& attr(int id) const { return attrs_[id]; }
    int attr_count() const { return (int)attrs_.size(); }

    // structural checks: DAG hierarchy, declared sorts, disjoint name
    // spaces. Appends findings to `out` and returns false on any error.
    bool validate(std::vector<Diagnostic>& out) const;

    bool operator==(const Signature& o) const;

private:
    void invalidate_cache() { members_cache_.clear(); }
    std::vector<std::string> constants_;
    std::map<std::string, int> constant_ids_;
    std::vector<std::string> sort_names_;
    std::map<std::string, int> sort_ids_;
    std::vector<bool> sort_base_;
    std::vector<std::vector<int>> sort_members_;   // base members (constant ids)
    std::vector<std::vector<int>> sort_children_;  // union children (sort ids)
    std::vector<Attr> attrs_;
    std::map<std::string, int> attr_ids_;
    mutable std::vector<std::vector<int>> members_cache_;
};

// Terms are constants or axiom-local variables.
struct Term {
    bool is_var = false;
    int id = -1;  // constant id or variable index
    bool operator==(const Term& o) const { return is_var == o.is_var && id == o.id; }
};

struct AtomRef {
    int attr = -1;
    std::vector<Term> args;
    bool operator==(const AtomRef& o) const { return attr == o.attr && args == o.args; }
};

struct Literal {
    AtomRef atom;
    bool positive = true;
    bool operator==(const Literal& o) const { return atom == o.atom && positive == o.positive; }
};

// Body elements: domain literals, (in)equalities between terms, and
// sort guards like book(X).
struct BodyElem {
    enum class Kind { Lit, Neq, Eq, SortGuard };
    Kind kind = Kind::Lit;
    Literal lit;
    Term lhs, rhs;       // for Neq/Eq
    int guard_sort = -1; // for SortGuard
    Term guard_term;
    bool operator==(const BodyElem& o) const {
        return kind == o.kind && lit == o.lit && lhs == o.lhs && rhs == o.rhs &&
               guard_sort == o.guard_sort && guard_term == o.guard_term;
    }
};

struct Axiom {
    // Never is a headless integrity constraint: a state satisfying its body
    // is illegal (the `never` statement in the DSL).
    enum class Kind { Causal, Constraint, Executability, Never };
    Kind kind = Kind::Constraint;
    std::optional<AtomRef> trigger;  // action term for causal/executability
    std::optional<Literal> head;     // absent for executability/never
    std::vector<BodyElem> body;
    std::vector<std::string> var_names;
    std::vector<std::vector<int>> var_domains;  // resolved constant ids per variable
    int line = 0;
    bool operator==(const Axiom& o) const {
        return kind == o.kind && trigger == o.trigger && head == o.head &&
               body == o.body && var_names == o.var_names;
    }
};

// Prioritized initial-state default; lower priority value binds stronger.
struct Default {
    int priority = 0;
    Literal head;
    std::vector<BodyElem> body;
    std::vector<std::string> var_names;
    std::vector<std::vector<int>> var_domains;
    int line = 0;
    bool operator==(const Default& o) const {
        return priority == o.priority && head == o.head && body == o.body &&
               var_names == o.var_names;
    }
};

// Ground literal appearing in facts / initial observations.
struct GroundFact {
    int attr = -1;
    std::vector<int> args;  // constant ids
    bool positive = true;
    int line = 0;
    bool operator==(const GroundFact& o) const {
        return attr == o.attr && args == o.args && positive == o.positive;
    }
};

// Magnification spec: counterpart sorts, component pairs and
// fine-level static facts, parsed from the `refinement:` block.
struct RefinementSpec {
    struct Counterpart {
        std::string coarse_sort;
        std::string fine_sort;
        // coarse constant -> its fine components
        std::vector<std::pair<std::string, std::vector<std::string>>> components;
        bool operator==(const Counterpart&) const = default;
    };
    std::vector<Counterpart> counterparts;
    struct FineFact {
        std::string attr;  // names resolve after refinement constructs the signature
        std::vector<std::string> args;
        bool positive = true;
        int line = 0;
        bool operator==(const FineFact& o) const {
            return attr == o.attr && args == o.args && positive == o.positive;
        }
    };
    std::vector<FineFact> facts;
    bool operator==(const RefinementSpec&) const = default;
};

struct SystemDescription {
    Signature sig;
    std::vector<Axiom> axioms;
    std::vector<Default> defaults;
    std::vector<GroundFact> facts;        // ground static values
    std::vector<GroundFact> initial_obs;  // optional step-0 observations
    std::optional<RefinementSpec> refinement;

    bool operator==(const SystemDescription& o) const;

    // semantic validation beyond the signature checks: sorted variable
    // consistency, head discipline, default head kinds.
    bool validate(std::vector<Diagnostic>& out) const;
};

// Pretty-printer; output re-parses to an equal description.
std::string print_domain(const SystemDescription& d);

std::string atom_to_string(const Signature& sig, int attr, const std::vector<int>& args);
std::string literal_to_string(const Signature& sig, int attr, const std::vector<int>& args, bool positive);

// Resolves variable domains for axioms and defaults (sort meet across all
// positions plus guards). Appends diagnostics on inconsistent usage.
bool resolve_variables(SystemDescription& d, std::vector<Diagnostic>& out);

} // namespace resolute
