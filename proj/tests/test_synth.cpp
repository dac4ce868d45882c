#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "wearlab/featgen.hpp"
#include "wearlab/synthcohort.hpp"

using namespace wearlab;
using namespace wearlab::synthcohort;

namespace {

CohortSpec small_spec(uint64_t seed, int pos = 6, int neg = 5) {
    CohortSpec spec;
    spec.n_positive = pos;
    spec.n_negative = neg;
    spec.seed = seed;
    spec.effect_profile = default_effect_profile();
    return spec;
}

double group_mean(const featgen::CohortMatrix& m, int feature_id, ingest::Label label) {
    double sum = 0;
    int n = 0;
    for (size_t r = 0; r < m.rows.size(); ++r) {
        const double v = m.rows[r].values[feature_id - 1];
        if (m.labels[r] == label && !is_missing(v)) {
            sum += v;
            ++n;
        }
    }
    return sum / n;
}

}  // namespace

TEST_CASE("default cohort has the published shape: 93 subjects, 55 positive") {
    CohortSpec spec;
    spec.effect_profile = default_effect_profile();
    const auto cohort = generate_cohort(spec);
    CHECK(cohort.bundles.size() == 93);
    int positives = 0;
    for (auto l : cohort.labels) positives += l == ingest::Label::lost_ge_2pct;
    CHECK(positives == 55);
    for (size_t i = 0; i < cohort.bundles.size(); ++i) {
        CHECK(ingest::label_subject(cohort.bundles[i].meta) == cohort.labels[i]);
    }
    CHECK(cohort.bundles[0].glucose.samples.size() == 96 * 14);
    CHECK(cohort.bundles[0].hr.samples.size() == 1440 * 14);
    CHECK(cohort.bundles[0].daily.size() == 14);
    CHECK(cohort.bundles[0].sleeps.size() == 14);
    CHECK(cohort.bundles[0].stress.size() == 14);
    CHECK(!cohort.bundles[0].eda.empty());
    CHECK(!cohort.bundles[0].ecg.empty());
}

TEST_CASE("generation is deterministic per seed") {
    const auto a = generate_cohort(small_spec(42));
    const auto b = generate_cohort(small_spec(42));
    REQUIRE(a.bundles.size() == b.bundles.size());
    for (size_t i = 0; i < a.bundles.size(); ++i) {
        const auto fa = featgen::extract_all(a.bundles[i]);
        const auto fb = featgen::extract_all(b.bundles[i]);
        for (int c = 0; c < featgen::kFeatureCount; ++c) {
            if (is_missing(fa.values[c])) {
                CHECK(is_missing(fb.values[c]));
            } else {
                CHECK(fa.values[c] == fb.values[c]);
            }
        }
    }
    const auto c = generate_cohort(small_spec(43));
    CHECK(c.bundles[0].glucose.samples[0].value != a.bundles[0].glucose.samples[0].value);
}

TEST_CASE("generated bundles pass ingest invariants: standardize is a no-op") {
    const auto cohort = generate_cohort(small_spec(7));
    for (const auto& b : cohort.bundles) {
        ingest::CleaningReport rep;
        const auto clean = ingest::standardize_bundle(b, &rep);
        CHECK(rep.total() == 0);
        CHECK(clean.glucose.samples.size() == b.glucose.samples.size());
        CHECK(clean.hr.samples.size() == b.hr.samples.size());
        CHECK(clean.daily.size() == b.daily.size());
        CHECK(clean.sleeps.size() == b.sleeps.size());
        CHECK(clean.stress.size() == b.stress.size());
        CHECK(clean.exercises.size() == b.exercises.size());
        CHECK(clean.eda.size() == b.eda.size());
        CHECK(clean.ecg.size() == b.ecg.size());
    }
}

TEST_CASE("label permutation: counts preserved, deterministic, invertible") {
    const auto cohort = generate_cohort(small_spec(3));
    const auto permuted = plant_label_permutation(cohort, 17);
    REQUIRE(permuted.labels.size() == cohort.labels.size());
    int pos_before = 0, pos_after = 0;
    for (size_t i = 0; i < cohort.labels.size(); ++i) {
        pos_before += cohort.labels[i] == ingest::Label::lost_ge_2pct;
        pos_after += permuted.labels[i] == ingest::Label::lost_ge_2pct;
    }
    CHECK(pos_before == pos_after);
    CHECK(plant_label_permutation(cohort, 17).labels == permuted.labels);

    // reconstruct the permutation the same way and undo it
    std::vector<size_t> perm(cohort.labels.size());
    std::iota(perm.begin(), perm.end(), size_t{0});
    Rng rng = Rng::seeded(17).derive({0x7065726dULL});
    rng.shuffle(perm);
    std::vector<ingest::Label> undone(cohort.labels.size());
    for (size_t i = 0; i < perm.size(); ++i) undone[perm[i]] = permuted.labels[i];
    CHECK(undone == cohort.labels);

    // bundles untouched
    CHECK(permuted.bundles[0].glucose.samples[0].value ==
          cohort.bundles[0].glucose.samples[0].value);
}

TEST_CASE("planted glucose variability lands near its group targets") {
    CohortSpec spec;
    spec.effect_profile = default_effect_profile();
    spec.seed = 1;
    const auto cohort = generate_cohort(spec);
    const auto matrix = featgen::extract_cohort(cohort.bundles);

    const auto& effect = spec.effect_profile.at("glucose_cv");
    const double pos_mean = group_mean(matrix, 61, ingest::Label::lost_ge_2pct);
    const double neg_mean = group_mean(matrix, 61, ingest::Label::lost_lt_2pct);
    const double se_pos = effect.sd / std::sqrt(55.0);
    const double se_neg = effect.sd / std::sqrt(38.0);
    CHECK(std::fabs(pos_mean - effect.pos_mean) <= 3 * se_pos);
    CHECK(std::fabs(neg_mean - effect.neg_mean) <= 3 * se_neg);
}

TEST_CASE("planted signal directions recover across seeds") {
    // stress: positives lower; rem minutes: positives lower; cv: positives higher
    int stress_ok = 0, rem_ok = 0, cv_ok = 0;
    const int seeds = 5;
    for (uint64_t s = 0; s < seeds; ++s) {
        CohortSpec spec;
        spec.n_positive = 26;
        spec.n_negative = 22;
        spec.seed = 100 + s;
        spec.effect_profile = default_effect_profile();
        const auto cohort = generate_cohort(spec);
        const auto matrix = featgen::extract_cohort(cohort.bundles);
        stress_ok += group_mean(matrix, 265, ingest::Label::lost_ge_2pct) <
                     group_mean(matrix, 265, ingest::Label::lost_lt_2pct);
        rem_ok += group_mean(matrix, 182, ingest::Label::lost_ge_2pct) <
                  group_mean(matrix, 182, ingest::Label::lost_lt_2pct);
        cv_ok += group_mean(matrix, 61, ingest::Label::lost_ge_2pct) >
                 group_mean(matrix, 61, ingest::Label::lost_lt_2pct);
    }
    CHECK(stress_ok >= seeds - 1);
    CHECK(rem_ok >= seeds - 1);
    CHECK(cv_ok == seeds);
}

TEST_CASE("amplify and null profiles behave as documented") {
    const auto base = default_effect_profile();
    const auto tripled = amplify_effects(base, 3.0);
    const auto& b = base.at("glucose_cv");
    const auto& t = tripled.at("glucose_cv");
    CHECK(t.pos_mean - t.neg_mean == doctest::Approx(3 * (b.pos_mean - b.neg_mean)));
    CHECK(t.pos_mean + t.neg_mean == doctest::Approx(b.pos_mean + b.neg_mean));
    CHECK(t.sd == b.sd);

    const auto nulled = amplify_effects(base, 0.0);
    for (const auto& [name, e] : nulled) CHECK(e.pos_mean == doctest::Approx(e.neg_mean));

    const auto calm = without_emotional_effects(base);
    CHECK(calm.at("stress_score").pos_mean == doctest::Approx(calm.at("stress_score").neg_mean));
    CHECK(calm.at("glucose_cv").pos_mean == b.pos_mean);
}

TEST_CASE("spec validation rejects bad cohorts") {
    CohortSpec spec;
    spec.n_positive = 0;
    CHECK_THROWS_AS(generate_cohort(spec), DomainError);
    spec.n_positive = 3;
    spec.days = 1;
    CHECK_THROWS_AS(generate_cohort(spec), DomainError);
}
