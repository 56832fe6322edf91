#pragma once

#include "resolute/ast.hpp"
#include "resolute/util.hpp"

#include <memory>
#include <stdexcept>
#include <vector>

namespace resolute {

// Raised when grounding exceeds the configured instance budget. Callers
// treat this as a resource failure of the attempted reasoning task, not
// as a domain bug.
struct ResourceLimitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GroundLimits {
    std::size_t max_axiom_instances = 5'000'000;
    std::size_t max_atoms = 2'000'000;
};

struct GroundLit {
    int atom = -1;
    bool positive = true;
    bool operator==(const GroundLit& o) const = default;
};

struct GroundAxiom {
    Axiom::Kind kind = Axiom::Kind::Constraint;
    int schema = -1;       // index into SystemDescription::axioms
    int action = -1;       // ground action id for causal/executability
    GroundLit head;        // head.atom < 0 for executability conditions
    std::vector<GroundLit> body;  // statics-simplified, statics removed
};

struct GroundDefault {
    int schema = -1;  // index into SystemDescription::defaults
    int priority = 0;
    GroundLit head;
    std::vector<GroundLit> body;  // may reference fluent atoms
};

// Variable-free image of a system description. Atom and action ids are
// dense and ordered lexicographically by attribute name, then argument
// constant names, which keeps every downstream tie-break deterministic.
class GroundedDescription {
public:
    const SystemDescription& desc() const { return *desc_; }
    const Signature& sig() const { return desc_->sig; }

    int atom_count() const { return (int)atom_attr_.size(); }
    int action_count() const { return (int)action_attr_.size(); }

    int atom_attr(int atom) const { return atom_attr_[atom]; }
    std::vector<int> atom_args(int atom) const;
    int atom_id(int attr, const std::vector<int>& args) const;  // -1 if absent
    std::string atom_name(int atom) const;

    int action_attr(int action) const { return action_attr_[action]; }
    std::vector<int> action_args(int action) const;
    int action_id(int attr, const std::vector<int>& args) const;
    std::string action_name(int action) const;
    int action_by_name(const std::string& text) const;  // parses "f(a,b)"
    int atom_by_name(const std::string& text) const;

    bool atom_is_static(int atom) const { return kind_of(atom) == AttrKind::Static; }
    bool atom_is_basic(int atom) const { return kind_of(atom) == AttrKind::BasicFluent; }
    bool atom_is_defined(int atom) const { return kind_of(atom) == AttrKind::DefinedFluent; }
    AttrKind kind_of(int atom) const { return desc_->sig.attr(atom_attr_[atom]).kind; }

    const std::vector<int>& basic_atoms() const { return basic_atoms_; }
    const std::vector<int>& defined_atoms() const { return defined_atoms_; }
    const std::vector<int>& static_atoms() const { return static_atoms_; }

    const std::vector<int>& agent_actions() const { return agent_actions_; }
    const std::vector<int>& exo_actions() const { return exo_actions_; }
    const std::vector<int>& knowledge_actions() const { return knowledge_actions_; }
    bool action_is_agent(int action) const;
    bool action_is_knowledge(int action) const;

    const std::vector<GroundAxiom>& axioms() const { return axioms_; }
    const std::vector<int>& causal_for(int action) const;
    const std::vector<int>& exec_for(int action) const;
    const std::vector<int>& constraints() const { return constraint_idx_; }
    const std::vector<int>& defined_head_constraints() const { return defined_head_idx_; }
    const std::vector<int>& basic_head_constraints() const { return basic_head_idx_; }
    const std::vector<int>& never_constraints() const { return never_idx_; }

    const std::vector<GroundDefault>& defaults() const { return defaults_; }

    // statics are fixed per description: facts closed under static-head
    // constraints
    bool static_value(int atom) const { return static_values_.test(atom); }
    const Bitset& static_bits() const { return static_values_; }

    std::size_t grounding_work() const { return instances_enumerated_; }

    friend GroundedDescription ground(const SystemDescription& desc, const GroundLimits& limits);

private:
    std::shared_ptr<const SystemDescription> desc_;

    // mixed-radix atom/action tables per attribute
    struct AttrTable {
        int attr = -1;
        int base = 0;
        int count = 0;
        std::vector<std::vector<int>> arg_members;  // per position, sorted by name
        std::vector<std::vector<int>> arg_rank;     // constant id -> position or -1
    };
    std::vector<AttrTable> atom_tables_, action_tables_;
    std::vector<int> atom_table_of_attr_, action_table_of_attr_;
    std::vector<int> atom_attr_, action_attr_;

    std::vector<int> basic_atoms_, defined_atoms_, static_atoms_;
    std::vector<int> agent_actions_, exo_actions_, knowledge_actions_;

    std::vector<GroundAxiom> axioms_;
    std::vector<int> constraint_idx_, defined_head_idx_, basic_head_idx_, never_idx_;
    std::vector<std::vector<int>> causal_for_, exec_for_;
    std::vector<GroundDefault> defaults_;

    Bitset static_values_;
    std::size_t instances_enumerated_ = 0;

    int table_lookup(const std::vector<AttrTable>& tables,
                     const std::vector<int>& table_of_attr, int attr,
                     const std::vector<int>& args) const;
};

GroundedDescription ground(const SystemDescription& desc, const GroundLimits& limits = {});

} // namespace resolute
