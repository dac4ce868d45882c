#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wearlab/common.hpp"
#include "wearlab/timeutil.hpp"

namespace wearlab::ingest {

enum class Sex { female, male };
enum class Label { lost_ge_2pct, lost_lt_2pct };

Sex parse_sex(const std::string& s);
const char* to_string(Sex s);
const char* to_string(Label l);

struct SubjectMeta {
    std::string subject_id;
    int age = 0;
    Sex sex = Sex::female;
    double height_cm = 0;
    double initial_weight_kg = 0;
    double final_weight_kg = 0;
    Date intervention_start;
    Date intervention_end;
};

struct Sample {
    Timestamp time;
    double value = 0;
};

struct GlucoseSeries {
    std::vector<Sample> samples;  // mg/dL
};

struct HeartRateSeries {
    std::vector<Sample> samples;  // bpm
};

struct DailyActivityRecord {
    Date date;
    double calories = kMissing;
    double steps = kMissing;
    double distance_km = kMissing;
    double sedentary_min = kMissing;
    double lightly_min = kMissing;
    double moderately_min = kMissing;
    double very_min = kMissing;
    double fat_burn_min = kMissing;
    double cardio_min = kMissing;
    double peak_min = kMissing;
    double below_zone1_min = kMissing;
    double zone1_min = kMissing;
    double zone2_min = kMissing;
    double zone3_min = kMissing;
    double demographic_vo2max = kMissing;
    double resting_hr = kMissing;
};

struct ExerciseSession {
    Timestamp start;
    double duration_min = 0;
    double avg_hr = kMissing;
};

struct BreathingRate {
    double mean = kMissing;
    double std_dev = kMissing;
    double signal_to_noise = kMissing;
};

struct SleepEpisode {
    Timestamp start;
    Timestamp end;
    double asleep_min = kMissing;
    double awake_min = kMissing;
    double deep_min = kMissing;
    double light_min = kMissing;
    double rem_min = kMissing;
    double efficiency = kMissing;  // percent
    double awakenings = kMissing;
    double spo2_avg = kMissing;
    double spo2_lower = kMissing;
    double spo2_upper = kMissing;
    double nightly_temp_delta = kMissing;  // degrees C vs baseline
    BreathingRate br_full;
    BreathingRate br_deep;
    BreathingRate br_light;
    BreathingRate br_rem;
    double restlessness = kMissing;  // ratio in [0,1]
    double score_overall = kMissing;
    double score_composition = kMissing;
    double score_revitalization = kMissing;
    double score_duration = kMissing;
    double nightly_rmssd = kMissing;  // ms
    double nonrem_hr = kMissing;      // bpm

    double time_in_bed_min() const {
        return static_cast<double>(end.epoch_sec - start.epoch_sec) / 60.0;
    }
    // Episodes belong to the calendar date they end on (the wake date).
    Date wake_date() const { return end.local_date(); }
};

struct EdaSession {
    std::string session_id;
    Timestamp start;
    std::vector<double> scl_samples;  // microsiemens
    double hr_begin = kMissing;       // mean bpm over the first 30 s
    double hr_end = kMissing;         // mean bpm over the last 30 s
    double hrv_baseline_ms = kMissing;
};

struct EcgSession {
    std::string session_id;
    Timestamp start;
    std::vector<std::pair<double, double>> waveform;  // (t seconds, mV), uniform dt
    double session_hr = kMissing;
};

struct StressDailyRecord {
    Date date;
    double stress_score = kMissing;
    double sleep_points = kMissing;
    double responsiveness_points = kMissing;
    double exertion_points = kMissing;
};

struct SubjectBundle {
    SubjectMeta meta;
    GlucoseSeries glucose;
    HeartRateSeries hr;
    std::vector<DailyActivityRecord> daily;
    std::vector<ExerciseSession> exercises;
    std::vector<SleepEpisode> sleeps;
    std::vector<EdaSession> eda;
    std::vector<EcgSession> ecg;
    std::vector<StressDailyRecord> stress;
};

// Counts of records dropped while standardizing, keyed by reason.
struct CleaningReport {
    std::map<std::string, int> drops;

    int total() const {
        int n = 0;
        for (const auto& [k, v] : drops) n += v;
        return n;
    }
    void add(const std::string& reason, int n = 1) {
        if (n > 0) drops[reason] += n;
    }
};

enum class TimeseriesKind { cgm, hr };
enum class DailyKind { activity, sleep, stress };
enum class SessionKind { eda, ecg, exercise };

// --- Parsers (one file each; schemas under "External interfaces" in README).
std::vector<SubjectMeta> parse_subject_manifest(const std::string& path);
GlucoseSeries parse_cgm_csv(const std::string& path);
HeartRateSeries parse_hr_csv(const std::string& path);
std::vector<DailyActivityRecord> parse_activity_csv(const std::string& path);
std::vector<SleepEpisode> parse_sleep_csv(const std::string& path);
std::vector<StressDailyRecord> parse_stress_csv(const std::string& path);
std::vector<ExerciseSession> parse_exercise_csv(const std::string& path);
std::vector<EdaSession> parse_eda_sessions(const std::string& index_path,
                                           const std::string& samples_dir);
std::vector<EcgSession> parse_ecg_sessions(const std::string& index_path,
                                           const std::string& samples_dir);

// Reads one subject's directory given its manifest row.
SubjectBundle read_subject_dir(const std::string& cohort_dir, const SubjectMeta& meta);

// Reads the whole cohort: manifest plus one directory per subject.
std::vector<SubjectBundle> read_cohort_dir(const std::string& cohort_dir);

// Sorts series, collapses duplicate timestamps (keep first), drops samples
// outside [start - 1 day, end + 1 day], and drops physiologically impossible
// values. Lossy cleaning is reported, never fatal. Idempotent.
SubjectBundle standardize_bundle(const SubjectBundle& raw, CleaningReport* report = nullptr);

Label label_subject(const SubjectMeta& meta);

// Serializes a bundle back into the exact per-subject directory layout the
// parsers read (used by the synthetic generator and round-trip tests).
void write_subject_dir(const std::string& cohort_dir, const SubjectBundle& bundle);
void write_cohort_dir(const std::string& cohort_dir, const std::vector<SubjectBundle>& bundles);

}  // namespace wearlab::ingest
