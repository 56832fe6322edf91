#pragma once

#include "resolute/ground.hpp"
#include "resolute/plan.hpp"

#include <map>
#include <set>

namespace resolute {

// Names the handful of domain symbols the generic machinery needs to know
// about (the mobile agent and its location attribute).
struct DomainProfile {
    std::string robot_constant = "rob_1";
    std::string robot_sort = "robot";
    std::string loc_attr = "loc";
    std::string in_hand_attr = "in_hand";
    std::string place_sort = "place";
};

// How the refined description relates to its coarse original. All maps are
// keyed by name so they survive independent groundings.
struct RefinementInfo {
    std::map<std::string, std::string> component_of;  // fine constant -> coarse constant
    std::map<std::string, std::vector<std::string>> components_of;
    std::map<std::string, std::string> starred_of;    // coarse attr -> starred attr
    std::map<std::string, std::string> unstarred_of;  // starred attr -> coarse attr
    enum class Observability { Direct, Indirect };
    std::map<std::string, Observability> observability;   // fluent attr -> class
    std::map<std::string, std::string> testable_condition; // fluent attr -> description
    std::string fine_loc_attr;  // robot location attribute at fine resolution
    DomainProfile profile;

    // maps a fine constant to its coarse counterpart (identity for shared
    // constants); returns empty when unknown
    std::string to_coarse(const std::string& fine_constant) const {
        auto it = component_of.find(fine_constant);
        return it == component_of.end() ? fine_constant : it->second;
    }
};

// Fine-resolution description produced by refinement: starred counterparts,
// bridge axioms, test actions and knowledge fluents. Contains no mental
// machinery.
struct FineDescription {
    SystemDescription desc;
    RefinementInfo info;
};

// Builds the refined description from a coarse one whose `refinement:`
// block provides the magnified sorts and component pairs.
FineDescription refine(const SystemDescription& coarse, const DomainProfile& profile = {});

// A coarse transition to be implemented at fine resolution.
struct CoarseTransition {
    State before;
    int action = -1;
    State after;
};

// Object constants relevant to a transition and goal (closure over the
// relevance rules). Returns coarse constant ids, sorted.
std::vector<int> relevant_constants(const GroundedDescription& coarse_g,
                                    const CoarseTransition& t, const Goal& goal);

struct ZoomedDescription {
    SystemDescription desc;
    std::vector<std::string> retained_constants;  // provenance
};

// Restricts the fine description to the sorts, attributes and axioms
// expressible over the components of the given relevant coarse constants.
ZoomedDescription zoom(const FineDescription& fine, const std::vector<std::string>& relcon_names);

struct ObsLit {
    int atom = -1;
    bool value = true;
};

// Lifts fine-resolution outcomes to coarse observations. Positive starred
// observations map through the component relation; a coarse negative is
// emitted only when every fine counterpart is reported false. Direct coarse
// observations pass through. Throws on unmapped constants.
std::vector<ObsLit> lift_observations(const std::vector<std::pair<std::string, bool>>& fine_literals,
                                      const RefinementInfo& info,
                                      const GroundedDescription& coarse_g);

} // namespace resolute
