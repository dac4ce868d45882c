#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "wearlab/csv.hpp"
#include "wearlab/ingest.hpp"
#include "wearlab/rng.hpp"
#include "wearlab/synthcohort.hpp"

using namespace wearlab;
using namespace wearlab::ingest;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("wearlab_test_" + std::to_string(Rng::seeded(std::random_device{}()).next()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name, const std::string& content) const {
        const auto p = path / name;
        fs::create_directories(p.parent_path());
        std::ofstream out(p);
        out << content;
        return p.string();
    }
    std::string str() const { return path.string(); }
};

SubjectMeta demo_meta() {
    SubjectMeta m;
    m.subject_id = "S001";
    m.age = 52;
    m.sex = Sex::female;
    m.height_cm = 165;
    m.initial_weight_kg = 84.0;
    m.final_weight_kg = 82.0;
    m.intervention_start = Date{2022, 3, 1};
    m.intervention_end = Date{2022, 3, 15};
    return m;
}

}  // namespace

TEST_CASE("manifest: header-only file gives an empty list") {
    TempDir tmp;
    const auto p = tmp.file("subjects.csv",
                            "subject_id,age,sex,height_cm,initial_weight_kg,final_weight_kg,"
                            "start_date,end_date\n");
    CHECK(parse_subject_manifest(p).empty());
}

TEST_CASE("manifest: a row parses to an identical SubjectMeta") {
    TempDir tmp;
    const auto p = tmp.file("subjects.csv",
                            "subject_id,age,sex,height_cm,initial_weight_kg,final_weight_kg,"
                            "start_date,end_date\n"
                            "S001,52,female,165,84.0,82.0,2022-03-01,2022-03-29\n");
    const auto metas = parse_subject_manifest(p);
    REQUIRE(metas.size() == 1);
    CHECK(metas[0].subject_id == "S001");
    CHECK(metas[0].age == 52);
    CHECK(metas[0].sex == Sex::female);
    CHECK(metas[0].height_cm == 165.0);
    CHECK(metas[0].initial_weight_kg == 84.0);
    CHECK(metas[0].final_weight_kg == 82.0);
    CHECK(metas[0].intervention_start == Date{2022, 3, 1});
    CHECK(metas[0].intervention_end == Date{2022, 3, 29});
}

TEST_CASE("manifest: bad weight is a row error at the right line") {
    TempDir tmp;
    const auto p = tmp.file("subjects.csv",
                            "subject_id,age,sex,height_cm,initial_weight_kg,final_weight_kg,"
                            "start_date,end_date\n"
                            "S001,52,female,165,84.0,-1,2022-03-01,2022-03-29\n");
    try {
        parse_subject_manifest(p);
        FAIL("expected RowError");
    } catch (const RowError& e) {
        CHECK(e.line() == 2);
    }

    const auto q = tmp.file("subjects2.csv",
                            "subject_id,age,sex,height_cm,initial_weight_kg,final_weight_kg,"
                            "start_date,end_date\n"
                            "S001,52,female,165,abc,80.0,2022-03-01,2022-03-29\n");
    CHECK_THROWS_AS(parse_subject_manifest(q), RowError);

    // missing column is a schema error naming the column
    const auto r = tmp.file("subjects3.csv",
                            "subject_id,age,sex,height_cm,initial_weight_kg,start_date,end_date\n");
    try {
        parse_subject_manifest(r);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("final_weight_kg") != std::string::npos);
    }
}

TEST_CASE("timeseries csv: identity parse, bounds, empty body") {
    TempDir tmp;
    const auto p = tmp.file("cgm.csv",
                            "timestamp,value\n"
                            "2022-03-01T08:00:00+01:00,95\n"
                            "2022-03-01T08:15:00+01:00,102\n");
    const auto cgm = parse_cgm_csv(p);
    REQUIRE(cgm.samples.size() == 2);
    CHECK(cgm.samples[0].value == 95.0);
    CHECK(cgm.samples[1].value == 102.0);

    const auto bad = tmp.file("hr.csv",
                              "timestamp,value\n"
                              "2022-03-01T08:00:00+01:00,300\n");
    CHECK_THROWS_AS(parse_hr_csv(bad), RowError);

    const auto empty = tmp.file("cgm_empty.csv", "timestamp,value\n");
    CHECK(parse_cgm_csv(empty).samples.empty());

    const auto badts = tmp.file("cgm_badts.csv", "timestamp,value\n08:00,95\n");
    CHECK_THROWS_AS(parse_cgm_csv(badts), RowError);
}

TEST_CASE("daily csv: identity parse and duplicate dates") {
    TempDir tmp;
    const auto stress = tmp.file("stress.csv",
                                 "date,stress_score,sleep_points,responsiveness_points,"
                                 "exertion_points\n"
                                 "2022-03-05,78,31,23,24\n");
    const auto recs = parse_stress_csv(stress);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].stress_score == 78.0);
    CHECK(recs[0].sleep_points == 31.0);

    const auto dup = tmp.file("stress_dup.csv",
                              "date,stress_score,sleep_points,responsiveness_points,"
                              "exertion_points\n"
                              "2022-03-05,78,31,23,24\n"
                              "2022-03-05,70,30,20,20\n");
    CHECK_THROWS_AS(parse_stress_csv(dup), RowError);

    // optional column absent -> missing
    const auto sparse = tmp.file("stress_sparse.csv",
                                 "date,stress_score,sleep_points,responsiveness_points,"
                                 "exertion_points\n"
                                 "2022-03-05,78,,23,24\n");
    CHECK(is_missing(parse_stress_csv(sparse)[0].sleep_points));
}

TEST_CASE("session csv: exercise bounds, missing sample file, empty scl") {
    TempDir tmp;
    const auto zero = tmp.file("exercise.csv",
                               "start,duration_min,avg_hr\n"
                               "2022-03-02T18:00:00+01:00,0,110\n");
    CHECK_THROWS_AS(parse_exercise_csv(zero), RowError);

    tmp.file("eda_sessions.csv",
             "session_id,start,hr_begin,hr_end,hrv_baseline_ms\n"
             "eda001,2022-03-02T16:00:00+01:00,75,72,40\n");
    CHECK_THROWS_AS(
        parse_eda_sessions(tmp.str() + "/eda_sessions.csv", tmp.str() + "/eda"), SchemaError);

    tmp.file("eda/eda001.csv", "scl_us\n");
    CHECK_THROWS_AS(
        parse_eda_sessions(tmp.str() + "/eda_sessions.csv", tmp.str() + "/eda"), SchemaError);

    tmp.file("eda/eda001.csv", "scl_us\n1.5\n1.6\n");
    const auto eda = parse_eda_sessions(tmp.str() + "/eda_sessions.csv", tmp.str() + "/eda");
    REQUIRE(eda.size() == 1);
    CHECK(eda[0].scl_samples.size() == 2);

    tmp.file("ecg_sessions.csv",
             "session_id,start,session_hr\n"
             "ecg001,2022-03-02T10:00:00+01:00,70\n");
    tmp.file("ecg/ecg001.csv", "t_sec,mv\n0,0.1\n0.02,0.2\n");
    const auto ecg = parse_ecg_sessions(tmp.str() + "/ecg_sessions.csv", tmp.str() + "/ecg");
    REQUIRE(ecg.size() == 1);
    CHECK(ecg[0].waveform.size() == 2);

    tmp.file("ecg/ecg001.csv", "t_sec,mv\n0,0.1\n0.02,0.2\n0.05,0.3\n");
    CHECK_THROWS_AS(parse_ecg_sessions(tmp.str() + "/ecg_sessions.csv", tmp.str() + "/ecg"),
                    SchemaError);  // non-uniform interval
}

TEST_CASE("standardize: sorts, dedupes, windows, drops out-of-bounds") {
    SubjectBundle b;
    b.meta = demo_meta();
    const auto t1 = parse_timestamp("2022-03-02T08:00:00+01:00");
    const auto t2 = parse_timestamp("2022-03-02T08:15:00+01:00");
    b.glucose.samples = {{t2, 100}, {t1, 95}};
    CleaningReport rep;
    auto clean = standardize_bundle(b, &rep);
    REQUIRE(clean.glucose.samples.size() == 2);
    CHECK(clean.glucose.samples[0].value == 95.0);
    CHECK(rep.total() == 0);

    // duplicate timestamps keep the first occurrence
    b.glucose.samples = {{t1, 95}, {t1, 95}, {t1, 99}};
    CleaningReport rep2;
    clean = standardize_bundle(b, &rep2);
    REQUIRE(clean.glucose.samples.size() == 1);
    CHECK(clean.glucose.samples[0].value == 95.0);
    CHECK(rep2.drops.at("cgm_duplicate_timestamp") == 2);

    // sample a year before the window is dropped
    b.glucose.samples = {{t1, 95}};
    b.hr.samples = {{parse_timestamp("2021-03-02T08:00:00+01:00"), 70}};
    CleaningReport rep3;
    clean = standardize_bundle(b, &rep3);
    CHECK(clean.hr.samples.empty());
    CHECK(rep3.drops.at("hr_out_of_window") == 1);

    // window slack is one day on each side
    b.hr.samples = {{parse_timestamp("2022-02-28T23:00:00+01:00"), 70},
                    {parse_timestamp("2022-03-16T10:00:00+01:00"), 71},
                    {parse_timestamp("2022-03-17T10:00:00+01:00"), 72}};
    CleaningReport rep4;
    clean = standardize_bundle(b, &rep4);
    CHECK(clean.hr.samples.size() == 2);
    CHECK(rep4.drops.at("hr_out_of_window") == 1);
}

TEST_CASE("standardize: activity minute invariant drops the record") {
    SubjectBundle b;
    b.meta = demo_meta();
    DailyActivityRecord d;
    d.date = Date{2022, 3, 3};
    d.sedentary_min = 900;
    d.lightly_min = 400;
    d.moderately_min = 150;
    d.very_min = 50;  // sums to 1500
    b.daily = {d};
    CleaningReport rep;
    const auto clean = standardize_bundle(b, &rep);
    CHECK(clean.daily.empty());
    CHECK(rep.drops.at("activity_invariant") == 1);
}

TEST_CASE("standardize is idempotent on a messy bundle") {
    synthcohort::CohortSpec spec;
    spec.n_positive = 1;
    spec.n_negative = 1;
    spec.seed = 11;
    spec.effect_profile = synthcohort::default_effect_profile();
    auto cohort = synthcohort::generate_cohort(spec);
    auto& b = cohort.bundles[0];
    // make it messy: shuffle and duplicate some samples, add an outlier
    b.glucose.samples.push_back(b.glucose.samples[0]);
    std::swap(b.glucose.samples[3], b.glucose.samples[10]);
    b.hr.samples.push_back({parse_timestamp("2020-01-01T00:00:00+01:00"), 70});

    CleaningReport rep1;
    const auto once = standardize_bundle(b, &rep1);
    CHECK(rep1.total() > 0);
    CleaningReport rep2;
    const auto twice = standardize_bundle(once, &rep2);
    CHECK(rep2.total() == 0);
    CHECK(once.glucose.samples.size() == twice.glucose.samples.size());
    for (size_t i = 0; i < once.glucose.samples.size(); ++i) {
        CHECK(once.glucose.samples[i].time == twice.glucose.samples[i].time);
        CHECK(once.glucose.samples[i].value == twice.glucose.samples[i].value);
    }
    CHECK(once.sleeps.size() == twice.sleeps.size());
    CHECK(once.daily.size() == twice.daily.size());
}

TEST_CASE("label_subject: boundary inclusive and paper-anchored cases") {
    SubjectMeta m = demo_meta();
    m.initial_weight_kg = 100.0;
    m.final_weight_kg = 98.0;  // exactly 2%
    CHECK(label_subject(m) == Label::lost_ge_2pct);

    m.initial_weight_kg = 85.7;
    m.final_weight_kg = 85.9;  // gained weight
    CHECK(label_subject(m) == Label::lost_lt_2pct);

    m.initial_weight_kg = 106.3;
    m.final_weight_kg = 100.9;
    CHECK(label_subject(m) == Label::lost_ge_2pct);
}

TEST_CASE("label_subject is scale invariant") {
    Rng rng = Rng::seeded(17);
    SubjectMeta m = demo_meta();
    for (int i = 0; i < 200; ++i) {
        m.initial_weight_kg = rng.uniform(50, 150);
        m.final_weight_kg = m.initial_weight_kg * rng.uniform(0.9, 1.05);
        const Label base = label_subject(m);
        const double c = rng.uniform(0.1, 10.0);
        SubjectMeta scaled = m;
        scaled.initial_weight_kg *= c;
        scaled.final_weight_kg *= c;
        CHECK(label_subject(scaled) == base);
    }
}

TEST_CASE("write -> parse round-trips a generated subject bit-identically") {
    synthcohort::CohortSpec spec;
    spec.n_positive = 1;
    spec.n_negative = 1;
    spec.seed = 23;
    spec.effect_profile = synthcohort::default_effect_profile();
    const auto cohort = synthcohort::generate_cohort(spec);

    TempDir tmp;
    write_cohort_dir(tmp.str(), cohort.bundles);
    const auto parsed = read_cohort_dir(tmp.str());
    REQUIRE(parsed.size() == cohort.bundles.size());
    for (size_t s = 0; s < parsed.size(); ++s) {
        const auto& a = cohort.bundles[s];
        const auto& p = parsed[s];
        CHECK(p.meta.subject_id == a.meta.subject_id);
        CHECK(p.meta.initial_weight_kg == a.meta.initial_weight_kg);
        CHECK(p.meta.final_weight_kg == a.meta.final_weight_kg);
        REQUIRE(p.glucose.samples.size() == a.glucose.samples.size());
        for (size_t i = 0; i < p.glucose.samples.size(); ++i) {
            CHECK(p.glucose.samples[i].time == a.glucose.samples[i].time);
            CHECK(p.glucose.samples[i].value == a.glucose.samples[i].value);
        }
        REQUIRE(p.sleeps.size() == a.sleeps.size());
        for (size_t i = 0; i < p.sleeps.size(); ++i) {
            CHECK(p.sleeps[i].start == a.sleeps[i].start);
            CHECK(p.sleeps[i].end == a.sleeps[i].end);
            CHECK(p.sleeps[i].asleep_min == a.sleeps[i].asleep_min);
            CHECK(p.sleeps[i].br_rem.std_dev == a.sleeps[i].br_rem.std_dev);
            CHECK(p.sleeps[i].nightly_rmssd == a.sleeps[i].nightly_rmssd);
        }
        REQUIRE(p.eda.size() == a.eda.size());
        for (size_t i = 0; i < p.eda.size(); ++i) {
            CHECK(p.eda[i].scl_samples == a.eda[i].scl_samples);
            CHECK(p.eda[i].hr_begin == a.eda[i].hr_begin);
        }
        REQUIRE(p.ecg.size() == a.ecg.size());
        for (size_t i = 0; i < p.ecg.size(); ++i) {
            CHECK(p.ecg[i].waveform == a.ecg[i].waveform);
        }
        REQUIRE(p.daily.size() == a.daily.size());
        for (size_t i = 0; i < p.daily.size(); ++i) {
            CHECK(p.daily[i].steps == a.daily[i].steps);
            CHECK(p.daily[i].resting_hr == a.daily[i].resting_hr);
        }
        REQUIRE(p.stress.size() == a.stress.size());
        REQUIRE(p.exercises.size() == a.exercises.size());
    }
}
