#pragma once

#include <map>
#include <string>
#include <vector>

#include "wearlab/ingest.hpp"
#include "wearlab/rng.hpp"

namespace wearlab::synthcohort {

// Planted group-level effect for one named signal: subjects draw their
// latent value from a normal with the group's mean.
struct Effect {
    double pos_mean = 0;  // lost >= 2% group
    double neg_mean = 0;  // lost < 2% group
    double sd = 0;        // within-group spread

    double mean_for(bool positive) const { return positive ? pos_mean : neg_mean; }
};

struct CohortSpec {
    int n_positive = 55;
    int n_negative = 38;
    int days = 14;
    uint64_t seed = 0;
    std::map<std::string, Effect> effect_profile;  // see default_effect_profile()

    void validate() const;
};

// Group means for the planted signals; within-group spreads sized for
// desk-scale recovery checks.
std::map<std::string, Effect> default_effect_profile();

// Scales every effect's group separation around its midpoint; spreads are
// untouched. amplify(profile, 0) yields a null profile.
std::map<std::string, Effect> amplify_effects(const std::map<std::string, Effect>& profile,
                                              double factor);
// Same profile with the emotional-state signals nulled out.
std::map<std::string, Effect> without_emotional_effects(
    const std::map<std::string, Effect>& profile);

struct GeneratedCohort {
    std::vector<ingest::SubjectBundle> bundles;
    std::vector<ingest::Label> labels;  // matches label_subject on each bundle
};

GeneratedCohort generate_cohort(const CohortSpec& spec);

std::vector<ingest::Label> permute_labels(const std::vector<ingest::Label>& labels,
                                          uint64_t seed);

// Uniformly permutes the label assignment; bundles stay untouched, so the
// permuted labels intentionally decouple from the stored weights.
GeneratedCohort plant_label_permutation(const GeneratedCohort& cohort, uint64_t seed);

}  // namespace wearlab::synthcohort
