#include "resolute/multires.hpp"

#include <algorithm>
#include <stdexcept>

namespace resolute {

namespace {

constexpr const char* kPartsSort = "parts";
constexpr const char* kWholesSort = "wholes";
constexpr const char* kComponentAttr = "component";

std::string starred(const std::string& name) { return name + "*"; }

struct FineBuilder {
    const SystemDescription& coarse;
    const DomainProfile& profile;
    FineDescription out;

    // coarse sort id -> fine counterpart sort id (fine signature ids)
    std::vector<int> counterpart_sort;
    // coarse sort id -> same sort in fine signature
    std::vector<int> same_sort;
    std::vector<bool> sort_magnified;
    // coarse attr id -> starred attr id in fine signature (-1 if none)
    std::vector<int> star_attr;
    // coarse attr id -> plain copy attr id in fine signature (-1 if dropped)
    std::vector<int> copy_attr;
    std::vector<bool> attr_defined_ized;

    int fine_place_sort = -1;   // counterpart of the profile's place sort
    int coarse_place_sort = -1; // the place sort inside the fine signature
    int robot_sort = -1;
    int component_attr = -1;

    explicit FineBuilder(const SystemDescription& c, const DomainProfile& p)
        : coarse(c), profile(p) {}

    void run() {
        out.info.profile = profile;
        build_component_maps();
        build_sorts();
        build_attrs();
        build_knowledge_machinery();
        translate_axioms();
        emit_bridges();
        copy_facts_and_defaults();

        std::vector<Diagnostic> diags;
        resolve_variables(out.desc, diags);
        if (!diags.empty()) {
            // bridge variants that share a fully magnified position have no
            // instances; drop them rather than reject the description
            std::vector<Axiom> kept;
            for (auto& ax : out.desc.axioms) {
                bool vacuous = false;
                for (const auto& dom : ax.var_domains)
                    if (dom.empty()) vacuous = true;
                if (!vacuous) kept.push_back(std::move(ax));
            }
            out.desc.axioms = std::move(kept);
            diags.clear();
            resolve_variables(out.desc, diags);
        }
        out.desc.validate(diags);
        if (!diags.empty()) {
            std::string msg = "refinement produced an invalid description:\n";
            for (const auto& d : diags) msg += "  " + d.message + "\n";
            throw std::runtime_error(msg);
        }
    }

    const RefinementSpec& spec() const {
        static const RefinementSpec empty;
        return coarse.refinement ? *coarse.refinement : empty;
    }

    void build_component_maps() {
        for (const auto& cp : spec().counterparts) {
            if (coarse.sig.sort_id(cp.coarse_sort) < 0)
                throw std::runtime_error("refinement references undeclared sort '" +
                                         cp.coarse_sort + "'");
            for (const auto& [coarse_const, fines] : cp.components) {
                if (coarse.sig.constant_id(coarse_const) < 0)
                    throw std::runtime_error("refinement references undeclared constant '" +
                                             coarse_const + "'");
                if (out.info.components_of.count(coarse_const))
                    throw std::runtime_error("constant '" + coarse_const +
                                             "' magnified more than once");
                out.info.components_of[coarse_const] = fines;
                for (const auto& f : fines) {
                    if (out.info.component_of.count(f))
                        throw std::runtime_error("component '" + f +
                                                 "' assigned to two constants");
                    out.info.component_of[f] = coarse_const;
                }
            }
        }
    }

    bool constant_magnified(int coarse_const) const {
        return out.info.components_of.count(coarse.sig.constant_name(coarse_const)) > 0;
    }

    void build_sorts() {
        const Signature& cs = coarse.sig;
        Signature& fsig = out.desc.sig;
        same_sort.assign(cs.sort_count(), -1);
        counterpart_sort.assign(cs.sort_count(), -1);
        sort_magnified.assign(cs.sort_count(), false);

        // counterpart name chosen by the spec block when present
        std::map<std::string, std::string> declared_name;
        for (const auto& cp : spec().counterparts) declared_name[cp.coarse_sort] = cp.fine_sort;

        for (int s = 0; s < cs.sort_count(); ++s) {
            const std::string& name = cs.sort_name(s);
            if (cs.sort_is_base(s)) {
                std::vector<std::string> members, fine_members;
                bool changed = false;
                for (int m : cs.base_members(s)) {
                    const std::string& mn = cs.constant_name(m);
                    members.push_back(mn);
                    auto it = out.info.components_of.find(mn);
                    if (it != out.info.components_of.end()) {
                        changed = true;
                        for (const auto& f : it->second) fine_members.push_back(f);
                    }
                    // unmagnified members have no fine-resolution counterpart
                }
                same_sort[s] = fsig.add_base_sort(name, members);
                if (changed) {
                    auto dn = declared_name.find(name);
                    counterpart_sort[s] = fsig.add_base_sort(
                        dn != declared_name.end() ? dn->second : starred(name), fine_members);
                    sort_magnified[s] = true;
                } else {
                    counterpart_sort[s] = same_sort[s];
                }
            } else {
                std::vector<int> kids, fine_kids;
                bool changed = false;
                for (int c : cs.sort_children(s)) {
                    kids.push_back(same_sort[c]);
                    fine_kids.push_back(counterpart_sort[c]);
                    if (sort_magnified[c]) changed = true;
                }
                same_sort[s] = fsig.add_union_sort(name, kids);
                if (changed) {
                    counterpart_sort[s] = fsig.add_union_sort(starred(name), fine_kids);
                    sort_magnified[s] = true;
                } else {
                    counterpart_sort[s] = same_sort[s];
                }
            }
        }

        robot_sort = fsig.sort_id(profile.robot_sort);
        coarse_place_sort = fsig.sort_id(profile.place_sort);
        int cps = cs.sort_id(profile.place_sort);
        fine_place_sort = cps >= 0 ? counterpart_sort[cps] : -1;

        if (!out.info.components_of.empty()) {
            std::vector<std::string> parts, wholes;
            for (const auto& [whole, fines] : out.info.components_of) {
                wholes.push_back(whole);
                for (const auto& f : fines) parts.push_back(f);
            }
            std::sort(parts.begin(), parts.end());
            std::sort(wholes.begin(), wholes.end());
            int ps = fsig.add_base_sort(kPartsSort, parts);
            int ws = fsig.add_base_sort(kWholesSort, wholes);
            component_attr = fsig.add_attr(kComponentAttr, AttrKind::Static, {ps, ws});
            for (const auto& [whole, fines] : out.info.components_of)
                for (const auto& f : fines) {
                    GroundFact gf;
                    gf.attr = component_attr;
                    gf.args = {fsig.constant_id(f), fsig.constant_id(whole)};
                    out.desc.facts.push_back(gf);
                }
        }
    }

    bool attr_magnified(int attr) const {
        for (int s : coarse.sig.attr(attr).arg_sorts)
            if (sort_magnified[s]) return true;
        return false;
    }

    std::vector<int> map_args(int attr, bool to_fine) const {
        std::vector<int> sorts;
        for (int s : coarse.sig.attr(attr).arg_sorts)
            sorts.push_back(to_fine ? counterpart_sort[s] : same_sort[s]);
        return sorts;
    }

    void build_attrs() {
        const Signature& cs = coarse.sig;
        Signature& fsig = out.desc.sig;
        star_attr.assign(cs.attr_count(), -1);
        copy_attr.assign(cs.attr_count(), -1);
        attr_defined_ized.assign(cs.attr_count(), false);

        for (const char* reserved : {kComponentAttr})
            if (cs.attr_id(reserved) >= 0)
                throw std::runtime_error(std::string("attribute name '") + reserved +
                                         "' is reserved by refinement");

        for (int a = 0; a < cs.attr_count(); ++a) {
            const auto& at = cs.attr(a);
            bool mag = attr_magnified(a);
            switch (at.kind) {
                case AttrKind::Static:
                    copy_attr[a] = fsig.add_attr(at.name, AttrKind::Static, map_args(a, false));
                    if (mag) star_attr[a] = fsig.add_attr(starred(at.name), AttrKind::Static,
                                                          map_args(a, true));
                    break;
                case AttrKind::BasicFluent:
                    // coarse fluents stay basic; magnified ones gain a starred
                    // twin tied back by the bridge machinery
                    copy_attr[a] = fsig.add_attr(at.name, AttrKind::BasicFluent,
                                                 map_args(a, false));
                    if (mag) {
                        star_attr[a] = fsig.add_attr(starred(at.name), AttrKind::BasicFluent,
                                                     map_args(a, true));
                        out.info.starred_of[at.name] = starred(at.name);
                        out.info.unstarred_of[starred(at.name)] = at.name;
                        out.info.observability[at.name] = RefinementInfo::Observability::Indirect;
                        out.info.observability[starred(at.name)] =
                            RefinementInfo::Observability::Direct;
                    } else {
                        out.info.observability[at.name] = RefinementInfo::Observability::Direct;
                    }
                    break;
                case AttrKind::DefinedFluent:
                    // defined fluents keep their definitions; magnified ones
                    // get a starred twin whose definition is the starred
                    // translation of the coarse constraints
                    copy_attr[a] = fsig.add_attr(at.name, AttrKind::DefinedFluent,
                                                 map_args(a, false));
                    if (mag) star_attr[a] = fsig.add_attr(starred(at.name),
                                                          AttrKind::DefinedFluent,
                                                          map_args(a, true));
                    break;
                case AttrKind::AgentAction:
                case AttrKind::ExoAction:
                    if (mag) {
                        star_attr[a] = fsig.add_attr(starred(at.name), at.kind, map_args(a, true));
                        out.info.starred_of[at.name] = starred(at.name);
                        out.info.unstarred_of[starred(at.name)] = at.name;
                    } else {
                        copy_attr[a] = fsig.add_attr(at.name, at.kind, map_args(a, false));
                    }
                    break;
                case AttrKind::KnowledgeAction:
                    throw std::runtime_error("coarse descriptions cannot declare knowledge actions");
            }
        }

        int loc = cs.attr_id(profile.loc_attr);
        out.info.fine_loc_attr =
            loc >= 0 && star_attr[loc] >= 0 ? starred(profile.loc_attr) : profile.loc_attr;
    }

    // one variable per argument: V0, V1, ...
    static std::vector<Term> arg_vars(int n, int from = 0) {
        std::vector<Term> v;
        for (int i = 0; i < n; ++i) v.push_back(Term{true, from + i});
        return v;
    }

    void build_knowledge_machinery() {
        Signature& fsig = out.desc.sig;
        int fine_loc = fsig.attr_id(out.info.fine_loc_attr);
        int loc_place_pos = -1;
        if (fine_loc >= 0)
            loc_place_pos = (int)fsig.attr(fine_loc).arg_sorts.size() - 1;

        // direct basic fluents get observed/test/can_test machinery; coarse
        // originals of starred fluents are only indirectly observable
        std::set<int> indirect;
        for (int a = 0; a < coarse.sig.attr_count(); ++a)
            if (coarse.sig.attr(a).kind == AttrKind::BasicFluent && star_attr[a] >= 0)
                indirect.insert(copy_attr[a]);
        std::vector<int> direct;
        for (int a = 0; a < fsig.attr_count(); ++a)
            if (fsig.attr(a).kind == AttrKind::BasicFluent && !indirect.count(a))
                direct.push_back(a);

        for (int a : direct) {
            const auto name = fsig.attr(a).name;
            const auto args = fsig.attr(a).arg_sorts;
            int n = (int)args.size();
            int observed = fsig.add_attr("observed_" + name, AttrKind::BasicFluent, args);
            int test = fsig.add_attr("test_" + name, AttrKind::KnowledgeAction, args);
            int can_test = fsig.add_attr("can_test_" + name, AttrKind::DefinedFluent, args);

            auto vars = arg_vars(n);
            std::vector<std::string> var_names;
            for (int i = 0; i < n; ++i) var_names.push_back("V" + std::to_string(i));

            Axiom causal;
            causal.kind = Axiom::Kind::Causal;
            causal.trigger = AtomRef{test, vars};
            causal.head = Literal{AtomRef{observed, vars}, true};
            causal.var_names = var_names;
            out.desc.axioms.push_back(causal);

            Axiom exec1;
            exec1.kind = Axiom::Kind::Executability;
            exec1.trigger = AtomRef{test, vars};
            BodyElem cant;
            cant.kind = BodyElem::Kind::Lit;
            cant.lit = Literal{AtomRef{can_test, vars}, false};
            exec1.body = {cant};
            exec1.var_names = var_names;
            out.desc.axioms.push_back(exec1);

            Axiom exec2;  // sensing an already observed fluent is pointless
            exec2.kind = Axiom::Kind::Executability;
            exec2.trigger = AtomRef{test, vars};
            BodyElem seen;
            seen.kind = BodyElem::Kind::Lit;
            seen.lit = Literal{AtomRef{observed, vars}, true};
            exec2.body = {seen};
            exec2.var_names = var_names;
            out.desc.axioms.push_back(exec2);

            // visibility by colocation with the fluent's place argument
            Axiom vis;
            vis.kind = Axiom::Kind::Constraint;
            vis.head = Literal{AtomRef{can_test, vars}, true};
            vis.var_names = var_names;
            int fine_pos = -1, coarse_pos = -1;
            for (int i = 0; i < n; ++i) {
                if (fine_place_sort >= 0 && args[i] == fine_place_sort &&
                    fine_place_sort != coarse_place_sort)
                    fine_pos = i;
                else if (args[i] == coarse_place_sort)
                    coarse_pos = i;
            }
            if (fine_loc >= 0 && robot_sort >= 0 && fine_pos >= 0) {
                int rv = n;
                vis.var_names.push_back("R");
                std::vector<Term> loc_args = arg_vars(loc_place_pos + 1, 0);
                loc_args[0] = Term{true, rv};
                loc_args[loc_place_pos] = Term{true, fine_pos};
                BodyElem colocated;
                colocated.kind = BodyElem::Kind::Lit;
                colocated.lit = Literal{AtomRef{fine_loc, loc_args}, true};
                vis.body = {colocated};
                out.info.testable_condition[name] = "robot colocated with place argument";
            } else if (fine_loc >= 0 && robot_sort >= 0 && coarse_pos >= 0 &&
                       component_attr >= 0 && fine_place_sort != coarse_place_sort) {
                int rv = n, cv = n + 1;
                vis.var_names.push_back("R");
                vis.var_names.push_back("C");
                std::vector<Term> loc_args = {Term{true, rv}, Term{true, cv}};
                BodyElem colocated;
                colocated.kind = BodyElem::Kind::Lit;
                colocated.lit = Literal{AtomRef{fine_loc, loc_args}, true};
                BodyElem join;
                join.kind = BodyElem::Kind::Lit;
                join.lit = Literal{AtomRef{component_attr,
                                           {Term{true, cv}, Term{true, coarse_pos}}},
                                   true};
                vis.body = {colocated, join};
                out.info.testable_condition[name] = "robot located in a cell of the place argument";
            } else {
                out.info.testable_condition[name] = "always";
            }
            out.desc.axioms.push_back(vis);
        }
    }

    // Rewrites a coarse axiom over the starred attributes. Variables and
    // constants used both at fine and at coarse positions are connected by
    // component joins.
    struct Translation {
        std::vector<std::string> var_names;
        std::vector<BodyElem> extra_joins;
        // coarse var id -> fine var id (when split) or itself
        std::vector<int> fine_var;
        std::vector<bool> var_is_fine;  // demanded at a fine position
        std::vector<bool> var_is_coarse_magnified;
    };

    bool position_magnified(int coarse_attr, int pos) const {
        return sort_magnified[coarse.sig.attr(coarse_attr).arg_sorts[pos]];
    }

    // chooses the fine attr for a coarse attr in the starred translation
    int fine_attr_for(int coarse_attr) const {
        return star_attr[coarse_attr] >= 0 ? star_attr[coarse_attr] : copy_attr[coarse_attr];
    }

    void scan_atom(const AtomRef& a, Translation& tr) const {
        bool use_star = star_attr[a.attr] >= 0;
        for (std::size_t i = 0; i < a.args.size(); ++i) {
            if (!a.args[i].is_var) continue;
            bool fine_here = use_star && position_magnified(a.attr, (int)i);
            bool coarse_magnified_here = !use_star && position_magnified(a.attr, (int)i);
            if (fine_here) tr.var_is_fine[a.args[i].id] = true;
            if (coarse_magnified_here) tr.var_is_coarse_magnified[a.args[i].id] = true;
        }
    }

    AtomRef translate_atom(const AtomRef& a, Translation& tr) {
        AtomRef r;
        bool use_star = star_attr[a.attr] >= 0;
        r.attr = fine_attr_for(a.attr);
        for (std::size_t i = 0; i < a.args.size(); ++i) {
            Term t = a.args[i];
            bool fine_here = use_star && position_magnified(a.attr, (int)i);
            if (!t.is_var) {
                const std::string& cn = coarse.sig.constant_name(t.id);
                int fc = out.desc.sig.constant_id(cn);
                if (fine_here && out.info.components_of.count(cn)) {
                    // constant magnified at a fine position: fresh component var
                    int v = (int)tr.var_names.size();
                    tr.var_names.push_back("Z" + std::to_string(v));
                    BodyElem join;
                    join.kind = BodyElem::Kind::Lit;
                    join.lit = Literal{AtomRef{component_attr, {Term{true, v}, Term{false, fc}}},
                                       true};
                    tr.extra_joins.push_back(join);
                    r.args.push_back(Term{true, v});
                } else {
                    r.args.push_back(Term{false, fc});
                }
                continue;
            }
            if (fine_here && tr.var_is_coarse_magnified[t.id]) {
                // split variable: fine positions use the joined component var
                if (tr.fine_var[t.id] < 0) {
                    int v = (int)tr.var_names.size();
                    tr.var_names.push_back(tr.var_names[t.id] + "f");
                    tr.fine_var[t.id] = v;
                    BodyElem join;
                    join.kind = BodyElem::Kind::Lit;
                    join.lit = Literal{AtomRef{component_attr, {Term{true, v}, Term{true, t.id}}},
                                       true};
                    tr.extra_joins.push_back(join);
                }
                r.args.push_back(Term{true, tr.fine_var[t.id]});
            } else {
                r.args.push_back(t);
            }
        }
        return r;
    }

    Term translate_term(const Term& t) const {
        if (t.is_var) return t;
        return Term{false, out.desc.sig.constant_id(coarse.sig.constant_name(t.id))};
    }

    std::optional<Axiom> translate_axiom_starred(const Axiom& ax) {
        Translation tr;
        tr.var_names = ax.var_names;
        tr.fine_var.assign(ax.var_names.size(), -1);
        tr.var_is_fine.assign(ax.var_names.size(), false);
        tr.var_is_coarse_magnified.assign(ax.var_names.size(), false);

        if (ax.trigger) scan_atom(*ax.trigger, tr);
        if (ax.head) scan_atom(ax.head->atom, tr);
        for (const auto& b : ax.body)
            if (b.kind == BodyElem::Kind::Lit) scan_atom(b.lit.atom, tr);

        Axiom r;
        r.kind = ax.kind;
        r.line = ax.line;
        if (ax.trigger) r.trigger = translate_atom(*ax.trigger, tr);
        if (ax.head) r.head = Literal{translate_atom(ax.head->atom, tr), ax.head->positive};
        for (const auto& b : ax.body) {
            BodyElem e = b;
            switch (b.kind) {
                case BodyElem::Kind::Lit:
                    e.lit = Literal{translate_atom(b.lit.atom, tr), b.lit.positive};
                    break;
                case BodyElem::Kind::Neq:
                case BodyElem::Kind::Eq: {
                    e.lhs = translate_term(b.lhs);
                    e.rhs = translate_term(b.rhs);
                    // comparisons between split variables compare the fine sides
                    if (e.lhs.is_var && tr.fine_var[e.lhs.id] >= 0) e.lhs.id = tr.fine_var[e.lhs.id];
                    if (e.rhs.is_var && e.rhs.id < (int)tr.fine_var.size() &&
                        tr.fine_var[e.rhs.id] >= 0)
                        e.rhs.id = tr.fine_var[e.rhs.id];
                    break;
                }
                case BodyElem::Kind::SortGuard: {
                    int gs = same_sort[b.guard_sort];
                    // guards over a split variable keep constraining the coarse side
                    e.guard_sort = gs;
                    e.guard_term = translate_term(b.guard_term);
                    break;
                }
            }
            r.body.push_back(std::move(e));
        }
        for (auto& j : tr.extra_joins) r.body.push_back(std::move(j));
        r.var_names = tr.var_names;
        return r;
    }

    // remaps a coarse axiom into the fine signature without starring
    std::optional<Axiom> copy_axiom_plain(const Axiom& ax) {
        auto remap_atom = [&](const AtomRef& a) -> std::optional<AtomRef> {
            if (copy_attr[a.attr] < 0) return std::nullopt;
            AtomRef r;
            r.attr = copy_attr[a.attr];
            for (const auto& t : a.args) r.args.push_back(translate_term(t));
            return r;
        };
        Axiom r;
        r.kind = ax.kind;
        r.line = ax.line;
        r.var_names = ax.var_names;
        if (ax.trigger) {
            auto t = remap_atom(*ax.trigger);
            if (!t) return std::nullopt;
            r.trigger = *t;
        }
        if (ax.head) {
            auto hd = remap_atom(ax.head->atom);
            if (!hd) return std::nullopt;
            // a defined-ized head invalidates the coarse reading
            if (attr_defined_ized[ax.head->atom.attr]) return std::nullopt;
            r.head = Literal{*hd, ax.head->positive};
        }
        for (const auto& b : ax.body) {
            BodyElem e = b;
            switch (b.kind) {
                case BodyElem::Kind::Lit: {
                    auto a = remap_atom(b.lit.atom);
                    if (!a) return std::nullopt;
                    e.lit = Literal{*a, b.lit.positive};
                    break;
                }
                case BodyElem::Kind::Neq:
                case BodyElem::Kind::Eq:
                    e.lhs = translate_term(b.lhs);
                    e.rhs = translate_term(b.rhs);
                    break;
                case BodyElem::Kind::SortGuard:
                    e.guard_sort = same_sort[b.guard_sort];
                    e.guard_term = translate_term(b.guard_term);
                    break;
            }
            r.body.push_back(std::move(e));
        }
        return r;
    }

    bool axiom_touches_starred(const Axiom& ax) const {
        auto touches = [&](const AtomRef& a) { return star_attr[a.attr] >= 0; };
        if (ax.trigger && touches(*ax.trigger)) return true;
        if (ax.head && touches(ax.head->atom)) return true;
        for (const auto& b : ax.body)
            if (b.kind == BodyElem::Kind::Lit && touches(b.lit.atom)) return true;
        return false;
    }

    void translate_axioms() {
        for (const auto& ax : coarse.axioms) {
            bool star = axiom_touches_starred(ax);
            if (star) {
                if (auto t = translate_axiom_starred(ax)) out.desc.axioms.push_back(std::move(*t));
            }
            // the coarse reading survives when it stays well formed
            bool trigger_dropped = ax.trigger && copy_attr[ax.trigger->attr] < 0;
            if (!trigger_dropped) {
                if (auto c = copy_axiom_plain(ax)) {
                    if (!star || !(*c == out.desc.axioms.back()))
                        out.desc.axioms.push_back(std::move(*c));
                }
            }
        }
    }

    // Bridge machinery per starred basic fluent A: a defined shadow
    // bridged_A collecting the fine support, propagation constraints tying
    // the coarse value to it in both directions (guarded to constants that
    // actually have a fine presence), and the indirect-observation twin.
    void emit_bridges() {
        for (int a = 0; a < coarse.sig.attr_count(); ++a) {
            if (coarse.sig.attr(a).kind != AttrKind::BasicFluent || star_attr[a] < 0) continue;
            int shadow = out.desc.sig.add_attr("bridged_" + coarse.sig.attr(a).name,
                                               AttrKind::DefinedFluent, map_args(a, false));
            emit_bridge_family(shadow, star_attr[a], a);
            emit_propagation_pair(copy_attr[a], shadow, a);

            int obs_fine = out.desc.sig.attr_id("observed_" + starred(coarse.sig.attr(a).name));
            if (obs_fine >= 0) {
                int obs_coarse = out.desc.sig.add_attr("observed_" + coarse.sig.attr(a).name,
                                                       AttrKind::DefinedFluent,
                                                       map_args(a, false));
                emit_bridge_family(obs_coarse, obs_fine, a);
                out.info.testable_condition[coarse.sig.attr(a).name] =
                    "indirect via fine-resolution observations";
            }
        }
    }

    // head(args) if body_attr(fine-args) with component joins over the
    // magnified positions; one variant per shared/joined combination
    void emit_bridge_family(int head_attr, int body_attr, int coarse_attr) {
        int n = (int)coarse.sig.attr(coarse_attr).arg_sorts.size();
        std::vector<int> mag_positions;
        for (int i = 0; i < n; ++i)
            if (position_magnified(coarse_attr, i)) mag_positions.push_back(i);

        for (unsigned mask = 0; mask < (1u << mag_positions.size()); ++mask) {
            Axiom br;
            br.kind = Axiom::Kind::Constraint;
            std::vector<std::string> names;
            for (int i = 0; i < n; ++i) names.push_back("V" + std::to_string(i));
            auto head_args = arg_vars(n);
            auto body_args = arg_vars(n);
            std::vector<BodyElem> joins;
            for (std::size_t k = 0; k < mag_positions.size(); ++k) {
                if (!(mask & (1u << k))) continue;  // shared constant at this position
                int pos = mag_positions[k];
                int v = (int)names.size();
                names.push_back("W" + std::to_string(pos));
                body_args[pos] = Term{true, v};
                BodyElem join;
                join.kind = BodyElem::Kind::Lit;
                join.lit = Literal{AtomRef{component_attr, {Term{true, v}, Term{true, pos}}}, true};
                joins.push_back(join);
            }
            br.head = Literal{AtomRef{head_attr, head_args}, true};
            BodyElem fine_lit;
            fine_lit.kind = BodyElem::Kind::Lit;
            fine_lit.lit = Literal{AtomRef{body_attr, body_args}, true};
            br.body.push_back(fine_lit);
            for (auto& j : joins) br.body.push_back(std::move(j));
            br.var_names = names;
            out.desc.axioms.push_back(std::move(br));
        }
    }

    // A(args) if bridged_A(args); -A(args) if -bridged_A(args) restricted
    // to constants with a fine presence (parts-only counterparts exempt
    // unmagnified members from the downward direction)
    void emit_propagation_pair(int coarse_fine_attr, int shadow_attr, int coarse_attr) {
        int n = (int)coarse.sig.attr(coarse_attr).arg_sorts.size();
        std::vector<std::string> names;
        for (int i = 0; i < n; ++i) names.push_back("V" + std::to_string(i));
        auto vars = arg_vars(n);

        Axiom up;
        up.kind = Axiom::Kind::Constraint;
        up.head = Literal{AtomRef{coarse_fine_attr, vars}, true};
        BodyElem b;
        b.kind = BodyElem::Kind::Lit;
        b.lit = Literal{AtomRef{shadow_attr, vars}, true};
        up.body = {b};
        up.var_names = names;
        out.desc.axioms.push_back(std::move(up));

        std::vector<int> mag_positions;
        for (int i = 0; i < n; ++i)
            if (position_magnified(coarse_attr, i)) mag_positions.push_back(i);
        int wholes_sort = out.desc.sig.sort_id(kWholesSort);
        for (unsigned mask = 0; mask < (1u << mag_positions.size()); ++mask) {
            Axiom down;
            down.kind = Axiom::Kind::Constraint;
            down.head = Literal{AtomRef{coarse_fine_attr, vars}, false};
            BodyElem nb;
            nb.kind = BodyElem::Kind::Lit;
            nb.lit = Literal{AtomRef{shadow_attr, vars}, false};
            down.body = {nb};
            down.var_names = names;
            for (std::size_t k = 0; k < mag_positions.size(); ++k) {
                int pos = mag_positions[k];
                BodyElem guard;
                guard.kind = BodyElem::Kind::SortGuard;
                guard.guard_term = Term{true, pos};
                if (mask & (1u << k)) {
                    if (wholes_sort < 0) { guard.guard_sort = -1; }
                    guard.guard_sort = wholes_sort;  // magnified constant
                } else {
                    // shared constant: present in the counterpart sort itself
                    guard.guard_sort = counterpart_sort[coarse.sig.attr(coarse_attr).arg_sorts[pos]];
                }
                if (guard.guard_sort < 0) { down.body.clear(); break; }
                down.body.push_back(guard);
            }
            if (!down.body.empty()) out.desc.axioms.push_back(std::move(down));
        }
    }

    void copy_facts_and_defaults() {
        for (const auto& f : coarse.facts) {
            if (copy_attr[f.attr] < 0) continue;
            GroundFact nf = f;
            nf.attr = copy_attr[f.attr];
            for (auto& arg : nf.args)
                arg = out.desc.sig.constant_id(coarse.sig.constant_name(arg));
            out.desc.facts.push_back(std::move(nf));
        }
        for (const auto& ff : spec().facts) {
            int attr = out.desc.sig.attr_id(ff.attr);
            if (attr < 0)
                throw std::runtime_error("refinement fact references unknown attribute '" +
                                         ff.attr + "'");
            GroundFact gf;
            gf.attr = attr;
            gf.positive = ff.positive;
            gf.line = ff.line;
            for (const auto& an : ff.args) {
                int c = out.desc.sig.constant_id(an);
                if (c < 0)
                    throw std::runtime_error("refinement fact references unknown constant '" +
                                             an + "'");
                gf.args.push_back(c);
            }
            out.desc.facts.push_back(std::move(gf));
        }
        for (const auto& df : coarse.defaults) {
            if (attr_defined_ized[df.head.atom.attr]) continue;
            Default nd = df;
            nd.head.atom.attr = copy_attr[df.head.atom.attr];
            for (auto& t : nd.head.atom.args) t = translate_term(t);
            bool ok = nd.head.atom.attr >= 0;
            for (auto& b : nd.body) {
                if (b.kind == BodyElem::Kind::Lit) {
                    if (copy_attr[b.lit.atom.attr] < 0) { ok = false; break; }
                    b.lit.atom.attr = copy_attr[b.lit.atom.attr];
                    for (auto& t : b.lit.atom.args) t = translate_term(t);
                } else if (b.kind == BodyElem::Kind::SortGuard) {
                    b.guard_sort = same_sort[b.guard_sort];
                    b.guard_term = translate_term(b.guard_term);
                } else {
                    b.lhs = translate_term(b.lhs);
                    b.rhs = translate_term(b.rhs);
                }
            }
            if (ok) out.desc.defaults.push_back(std::move(nd));
        }
    }
};

} // namespace

FineDescription refine(const SystemDescription& coarse, const DomainProfile& profile) {
    FineBuilder b(coarse, profile);
    b.run();
    return std::move(b.out);
}

std::vector<int> relevant_constants(const GroundedDescription& coarse_g,
                                    const CoarseTransition& t, const Goal& goal) {
    std::set<int> rel;
    auto add_args = [&](const std::vector<int>& args) {
        for (int c : args) rel.insert(c);
    };
    // constants of the action and of the goal
    add_args(coarse_g.action_args(t.action));
    for (const auto& l : goal.literals) add_args(coarse_g.atom_args(l.atom));
    // fluent terms that change across the transition
    for (int a = 0; a < coarse_g.atom_count(); ++a) {
        if (coarse_g.atom_is_static(a)) continue;
        if (t.before.values.test(a) != t.after.values.test(a))
            add_args(coarse_g.atom_args(a));
    }
    // terms of the action's executability bodies holding before
    for (int idx : coarse_g.exec_for(t.action)) {
        for (const auto& l : coarse_g.axioms()[idx].body)
            if (t.before.values.test(l.atom)) add_args(coarse_g.atom_args(l.atom));
    }
    return {rel.begin(), rel.end()};
}

namespace {

// Rebuilds a description keeping only the given constants; sorts that lose
// all members disappear along with attributes and axioms over them.
SystemDescription restrict_description(const SystemDescription& src,
                                       const std::set<std::string>& keep) {
    const Signature& ss = src.sig;
    SystemDescription out;
    Signature& fs = out.sig;

    std::vector<int> sort_map(ss.sort_count(), -1);
    for (int s = 0; s < ss.sort_count(); ++s) {
        if (ss.sort_is_base(s)) {
            std::vector<std::string> members;
            for (int m : ss.base_members(s))
                if (keep.count(ss.constant_name(m))) members.push_back(ss.constant_name(m));
            if (!members.empty()) sort_map[s] = fs.add_base_sort(ss.sort_name(s), members);
        } else {
            std::vector<int> kids;
            for (int c : ss.sort_children(s))
                if (sort_map[c] >= 0) kids.push_back(sort_map[c]);
            if (!kids.empty()) sort_map[s] = fs.add_union_sort(ss.sort_name(s), kids);
        }
    }

    std::vector<int> attr_map(ss.attr_count(), -1);
    for (int a = 0; a < ss.attr_count(); ++a) {
        const auto& at = ss.attr(a);
        std::vector<int> args;
        bool ok = true;
        for (int s : at.arg_sorts) {
            if (sort_map[s] < 0) { ok = false; break; }
            args.push_back(sort_map[s]);
        }
        if (ok) attr_map[a] = fs.add_attr(at.name, at.kind, args);
    }

    auto map_const = [&](int c) { return fs.constant_id(ss.constant_name(c)); };
    auto map_term = [&](const Term& t) -> std::optional<Term> {
        if (t.is_var) return t;
        int c = map_const(t.id);
        if (c < 0) return std::nullopt;
        return Term{false, c};
    };
    auto map_atom = [&](const AtomRef& a) -> std::optional<AtomRef> {
        if (attr_map[a.attr] < 0) return std::nullopt;
        AtomRef r;
        r.attr = attr_map[a.attr];
        for (const auto& t : a.args) {
            auto m = map_term(t);
            if (!m) return std::nullopt;
            r.args.push_back(*m);
        }
        return r;
    };

    for (const auto& ax : src.axioms) {
        Axiom r;
        r.kind = ax.kind;
        r.line = ax.line;
        r.var_names = ax.var_names;
        bool ok = true;
        if (ax.trigger) {
            auto t = map_atom(*ax.trigger);
            if (!t) continue;
            r.trigger = *t;
        }
        if (ax.head) {
            auto hd = map_atom(ax.head->atom);
            if (!hd) continue;
            r.head = Literal{*hd, ax.head->positive};
        }
        for (const auto& b : ax.body) {
            BodyElem e = b;
            if (b.kind == BodyElem::Kind::Lit) {
                auto a = map_atom(b.lit.atom);
                if (!a) { ok = false; break; }
                e.lit = Literal{*a, b.lit.positive};
            } else if (b.kind == BodyElem::Kind::SortGuard) {
                if (sort_map[b.guard_sort] < 0) { ok = false; break; }
                e.guard_sort = sort_map[b.guard_sort];
                auto t = map_term(b.guard_term);
                if (!t) { ok = false; break; }
                e.guard_term = *t;
            } else {
                auto l = map_term(b.lhs), rr = map_term(b.rhs);
                if (!l || !rr) { ok = false; break; }
                e.lhs = *l;
                e.rhs = *rr;
            }
            r.body.push_back(std::move(e));
        }
        if (ok) out.axioms.push_back(std::move(r));
    }

    for (const auto& df : src.defaults) {
        Default r = df;
        if (attr_map[df.head.atom.attr] < 0) continue;
        r.head.atom.attr = attr_map[df.head.atom.attr];
        bool ok = true;
        for (auto& t : r.head.atom.args) {
            auto m = map_term(t);
            if (!m) { ok = false; break; }
            t = *m;
        }
        for (auto& b : r.body) {
            if (!ok) break;
            if (b.kind == BodyElem::Kind::Lit) {
                if (attr_map[b.lit.atom.attr] < 0) { ok = false; break; }
                b.lit.atom.attr = attr_map[b.lit.atom.attr];
                for (auto& t : b.lit.atom.args) {
                    auto m = map_term(t);
                    if (!m) { ok = false; break; }
                    t = *m;
                }
            } else if (b.kind == BodyElem::Kind::SortGuard) {
                if (sort_map[b.guard_sort] < 0) { ok = false; break; }
                b.guard_sort = sort_map[b.guard_sort];
                auto m = map_term(b.guard_term);
                if (!m) { ok = false; break; }
                b.guard_term = *m;
            } else {
                auto l = map_term(b.lhs), rr = map_term(b.rhs);
                if (!l || !rr) { ok = false; break; }
                b.lhs = *l;
                b.rhs = *rr;
            }
        }
        if (ok) out.defaults.push_back(std::move(r));
    }

    for (const auto& f : src.facts) {
        if (attr_map[f.attr] < 0) continue;
        GroundFact r = f;
        r.attr = attr_map[f.attr];
        bool ok = true;
        for (auto& c : r.args) {
            int m = map_const(c);
            if (m < 0) { ok = false; break; }
            c = m;
        }
        if (ok) out.facts.push_back(std::move(r));
    }

    std::vector<Diagnostic> diags;
    resolve_variables(out, diags);
    // variables can lose their domain under restriction; drop such axioms
    if (!diags.empty()) {
        SystemDescription pruned;
        pruned.sig = out.sig;
        pruned.facts = out.facts;
        for (auto& ax : out.axioms) {
            bool bad = false;
            for (const auto& dom : ax.var_domains)
                if (dom.empty()) bad = true;
            if (!bad) pruned.axioms.push_back(ax);
        }
        for (auto& df : out.defaults) {
            bool bad = false;
            for (const auto& dom : df.var_domains)
                if (dom.empty()) bad = true;
            if (!bad) pruned.defaults.push_back(df);
        }
        return pruned;
    }
    return out;
}

} // namespace

ZoomedDescription zoom(const FineDescription& fine, const std::vector<std::string>& relcon_names) {
    std::set<std::string> keep(relcon_names.begin(), relcon_names.end());
    // a retained magnified constant brings its components along
    for (const auto& name : relcon_names) {
        auto it = fine.info.components_of.find(name);
        if (it != fine.info.components_of.end())
            for (const auto& f : it->second) keep.insert(f);
    }
    ZoomedDescription z;
    z.desc = restrict_description(fine.desc, keep);
    z.retained_constants.assign(keep.begin(), keep.end());
    return z;
}

std::vector<ObsLit> lift_observations(const std::vector<std::pair<std::string, bool>>& fine_literals,
                                      const RefinementInfo& info,
                                      const GroundedDescription& coarse_g) {
    struct Pending {
        bool any_true = false;
        std::set<std::string> falses;
        std::size_t preimage = 1;
    };
    std::map<int, Pending> agg;  // coarse atom -> aggregation

    auto parse = [&](const std::string& text, std::string& name, std::vector<std::string>& args) {
        auto lp = text.find('(');
        std::string head = lp == std::string::npos ? text : text.substr(0, lp);
        name = std::string(trim(head));
        args.clear();
        if (lp != std::string::npos) {
            auto rp = text.rfind(')');
            std::string inner = text.substr(lp + 1, rp - lp - 1);
            for (auto part : split(inner, ','))
                args.push_back(std::string(trim(part)));
        }
    };

    for (const auto& [lit, value] : fine_literals) {
        std::string name;
        std::vector<std::string> args;
        parse(lit, name, args);

        auto star_it = info.unstarred_of.find(name);
        std::string coarse_attr = star_it != info.unstarred_of.end() ? star_it->second : name;
        int attr = coarse_g.sig().attr_id(coarse_attr);
        if (attr < 0) continue;  // not a coarse-visible fluent (e.g. observed_*)

        std::vector<int> coarse_args;
        std::size_t preimage = 1;
        bool ok = true;
        for (const auto& a : args) {
            std::string mapped = info.to_coarse(a);
            int c = coarse_g.sig().constant_id(mapped);
            if (c < 0) {
                throw std::runtime_error("unmapped fine constant '" + a + "' in observation");
            }
            coarse_args.push_back(c);
            auto comp = info.components_of.find(mapped);
            if (comp != info.components_of.end() && star_it != info.unstarred_of.end())
                preimage *= comp->second.size();
        }
        if (!ok) continue;
        int atom = coarse_g.atom_id(attr, coarse_args);
        if (atom < 0) continue;

        Pending& p = agg[atom];
        p.preimage = preimage;
        if (value) p.any_true = true;
        else p.falses.insert(lit);
    }

    std::vector<ObsLit> out;
    for (const auto& [atom, p] : agg) {
        if (p.any_true) out.push_back({atom, true});
        else if (p.falses.size() >= p.preimage) out.push_back({atom, false});
    }
    return out;
}

} // namespace resolute
