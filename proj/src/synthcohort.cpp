#include "wearlab/synthcohort.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "wearlab/featgen.hpp"

namespace wearlab::synthcohort {

using ingest::SubjectBundle;

void CohortSpec::validate() const {
    if (n_positive <= 0 || n_negative <= 0) throw DomainError("cohort spec: counts must be > 0");
    if (days < 2) throw DomainError("cohort spec: needs at least 2 days");
    for (const auto& [name, e] : effect_profile) {
        if (e.sd < 0) throw DomainError("cohort spec: negative spread for " + name);
    }
}

std::map<std::string, Effect> default_effect_profile() {
    return {
        {"glucose_mean", {100.87, 98.85, 6.0}},
        {"glucose_cv", {16.64, 14.68, 3.0}},
        {"hr_mean", {75.81, 75.63, 6.0}},
        {"resting_hr", {62.78, 62.93, 7.0}},
        {"nonrem_hr", {59.56, 60.72, 7.5}},
        {"ecg_hr", {69.76, 70.22, 9.0}},
        {"steps", {11356, 10601, 3500}},
        {"calories", {3019, 2932, 400}},
        {"sedentary_min", {717, 724, 90}},
        {"mvpa_min", {68.18, 63.05, 25.0}},
        {"exercise_count", {14.2, 15.9, 7.0}},
        {"exercise_duration", {38.8, 36.2, 14.0}},
        {"spo2", {94.00, 94.20, 1.2}},
        {"time_in_bed_min", {414, 431, 40}},
        {"awake_min", {55, 53, 10}},
        {"deep_min", {58, 64, 12}},
        {"rem_min", {74, 82, 16}},
        {"sleep_score", {74.10, 75.80, 4.0}},
        {"sleep_start_min", {345, 365, 24}},  // minutes after 18:00
        {"sleep_end_min", {455, 490, 26}},    // minutes after midnight
        {"stress_score", {75.70, 79.84, 4.0}},
        {"scl_mean", {8.0, 8.0, 2.5}},
        {"age", {52, 45, 12}},
    };
}

std::map<std::string, Effect> amplify_effects(const std::map<std::string, Effect>& profile,
                                              double factor) {
    std::map<std::string, Effect> out = profile;
    for (auto& [name, e] : out) {
        const double mid = (e.pos_mean + e.neg_mean) / 2.0;
        e.pos_mean = mid + factor * (e.pos_mean - mid);
        e.neg_mean = mid + factor * (e.neg_mean - mid);
    }
    return out;
}

std::map<std::string, Effect> without_emotional_effects(
    const std::map<std::string, Effect>& profile) {
    std::map<std::string, Effect> out = profile;
    for (const char* name : {"stress_score", "scl_mean"}) {
        auto it = out.find(name);
        if (it == out.end()) continue;
        const double mid = (it->second.pos_mean + it->second.neg_mean) / 2.0;
        it->second.pos_mean = mid;
        it->second.neg_mean = mid;
    }
    return out;
}

namespace {

constexpr int32_t kOffsetSec = 3600;  // +01:00 everywhere

struct Latents {
    std::map<std::string, double> values;
    double of(const std::string& name) const {
        auto it = values.find(name);
        if (it == values.end()) throw DomainError("unknown latent " + name);
        return it->second;
    }
};

Latents draw_latents(const std::map<std::string, Effect>& profile, bool positive, Rng& rng) {
    Latents l;
    for (const auto& [name, e] : profile) {
        l.values[name] = rng.normal(e.mean_for(positive), e.sd);
    }
    return l;
}

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

// Rescales xs to the exact target mean and population std.
void rescale_exact(std::vector<double>& xs, double mean, double sd) {
    double m = 0;
    for (double v : xs) m += v;
    m /= static_cast<double>(xs.size());
    double acc = 0;
    for (double v : xs) acc += (v - m) * (v - m);
    const double cur = std::sqrt(acc / static_cast<double>(xs.size()));
    const double scale = cur > 1e-12 ? sd / cur : 0.0;
    for (double& v : xs) v = mean + (v - m) * scale;
}

std::string session_id(const char* prefix, int i) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%s%03d", prefix, i + 1);
    return buf;
}

SubjectBundle simulate_subject(const std::string& subject_id, bool positive,
                               const CohortSpec& spec, Rng rng) {
    const Latents lat = draw_latents(spec.effect_profile, positive, rng);
    SubjectBundle b;
    const Date start{2022, 3, 1};
    const Date end = add_days(start, spec.days);

    b.meta.subject_id = subject_id;
    b.meta.age = static_cast<int>(clamp(std::round(lat.of("age")), 18, 80));
    b.meta.sex = rng.bernoulli(0.70) ? ingest::Sex::female : ingest::Sex::male;
    b.meta.height_cm = std::round(rng.normal(165, 9) * 10) / 10;
    b.meta.intervention_start = start;
    b.meta.intervention_end = end;
    const double initial = clamp(rng.normal(85, 12), 60, 140);
    double loss_fraction;
    if (positive) {
        loss_fraction = 0.02 + std::fabs(rng.normal(0.015, 0.01));
    } else {
        loss_fraction = 0.02 - std::fabs(rng.normal(0.012, 0.008)) - 1e-4;
    }
    b.meta.initial_weight_kg = std::round(initial * 10) / 10;
    b.meta.final_weight_kg = std::round(initial * (1.0 - loss_fraction) * 10) / 10;
    // Rounding can push the ratio across the 2% boundary; nudge until the
    // label matches group membership.
    while ((ingest::label_subject(b.meta) == ingest::Label::lost_ge_2pct) != positive) {
        b.meta.final_weight_kg += positive ? -0.1 : 0.1;
        b.meta.final_weight_kg = std::round(b.meta.final_weight_kg * 10) / 10;
    }

    // --- CGM every 15 minutes: mean-reverting noise with meal bumps, then an
    // exact rescale so the subject's all-day mean and CV hit the latents.
    {
        const double mean_target = clamp(lat.of("glucose_mean"), 70, 160);
        const double cv_target = clamp(lat.of("glucose_cv"), 4.0, 35.0);
        const double sd_target = mean_target * cv_target / 100.0;
        std::vector<double> values;
        std::vector<Timestamp> times;
        double ou = 0;
        for (int day = 0; day < spec.days; ++day) {
            const Date d = add_days(start, day);
            for (int slot = 0; slot < 96; ++slot) {
                const int minute = slot * 15;
                double bump = 0;
                for (const int meal : {8 * 60, 14 * 60, 21 * 60}) {
                    const double dt = (minute - meal) / 45.0;
                    bump += std::exp(-dt * dt / 2.0);
                }
                ou = 0.92 * ou + rng.normal(0, 1.0);
                values.push_back(bump * 1.6 + ou);
                times.push_back(
                    make_timestamp(d, minute / 60, minute % 60, 0, kOffsetSec));
            }
        }
        rescale_exact(values, mean_target, sd_target);
        for (size_t i = 0; i < values.size(); ++i) {
            b.glucose.samples.push_back({times[i], clamp(values[i], 1.0, 999.0)});
        }
    }

    // --- Heart rate every minute with a circadian profile.
    {
        const double hr_target = clamp(lat.of("hr_mean"), 55, 100);
        std::vector<double> values;
        values.reserve(static_cast<size_t>(spec.days) * 1440);
        double ou = 0;
        for (int day = 0; day < spec.days; ++day) {
            for (int minute = 0; minute < 1440; ++minute) {
                const double phase = 2.0 * M_PI * (minute - 870.0) / 1440.0;
                const double circadian = 8.0 * std::cos(phase);  // peak mid-afternoon
                ou = 0.97 * ou + rng.normal(0, 0.8);
                values.push_back(circadian + ou);
            }
        }
        rescale_exact(values, hr_target, 9.0);
        size_t i = 0;
        for (int day = 0; day < spec.days; ++day) {
            const Date d = add_days(start, day);
            for (int minute = 0; minute < 1440; ++minute, ++i) {
                b.hr.samples.push_back(
                    {make_timestamp(d, minute / 60, minute % 60, 0, kOffsetSec),
                     clamp(values[i], 35.0, 210.0)});
            }
        }
    }

    // --- Exercise sessions.
    {
        const int count = static_cast<int>(clamp(std::round(lat.of("exercise_count")), 2, 40));
        const double dur_mean = clamp(lat.of("exercise_duration"), 12, 90);
        for (int i = 0; i < count; ++i) {
            ingest::ExerciseSession s;
            const int day = static_cast<int>(rng.below(static_cast<uint64_t>(spec.days)));
            const int minute = 17 * 60 + static_cast<int>(rng.below(150));
            s.start = make_timestamp(add_days(start, day), minute / 60,
                                             minute % 60, 0, kOffsetSec);
            s.duration_min = clamp(rng.normal(dur_mean, 8), 5, 150);
            s.avg_hr = clamp(rng.normal(101, 8), 70, 185);
            b.exercises.push_back(s);
        }
        std::stable_sort(b.exercises.begin(), b.exercises.end(),
                         [](const auto& a, const auto& c) {
                             return a.start.epoch_sec < c.start.epoch_sec;
                         });
    }

    // --- Daily activity records.
    {
        const double steps_mean = clamp(lat.of("steps"), 1500, 25000);
        const double calories_mean = clamp(lat.of("calories"), 1500, 4500);
        const double sdt_mean = clamp(lat.of("sedentary_min"), 400, 1000);
        const double mvpa_mean = clamp(lat.of("mvpa_min"), 2, 240);
        const double resting_mean = clamp(lat.of("resting_hr"), 45, 90);
        const double vo2 = clamp(rng.normal(38, 5), 20, 60);
        for (int day = 0; day < spec.days; ++day) {
            ingest::DailyActivityRecord r;
            r.date = add_days(start, day);
            r.steps = std::round(clamp(rng.normal(steps_mean, steps_mean * 0.12), 300, 40000));
            r.calories = std::round(clamp(rng.normal(calories_mean, 140), 1200, 6000));
            r.distance_km = std::round(r.steps * 0.00074 * 100) / 100;
            const double mvpa = clamp(rng.normal(mvpa_mean, mvpa_mean * 0.20 + 2), 0, 360);
            r.moderately_min = std::round(mvpa * 2.0 / 3.0);
            r.very_min = std::round(mvpa - r.moderately_min);
            r.lightly_min = std::round(clamp(rng.normal(210, 28), 60, 500));
            r.sedentary_min = std::round(
                clamp(rng.normal(sdt_mean, 45), 200,
                      1440.0 - r.moderately_min - r.very_min - r.lightly_min));
            r.fat_burn_min = std::round(clamp(rng.normal(36, 10), 0, 200));
            r.cardio_min = std::round(clamp(rng.normal(12, 5), 0, 90));
            r.peak_min = std::round(clamp(rng.normal(3, 2), 0, 40));
            r.below_zone1_min =
                std::round(clamp(1440.0 - r.fat_burn_min - r.cardio_min - r.peak_min -
                                     rng.normal(60, 20),
                                 600, 1440));
            r.zone1_min = r.fat_burn_min;
            r.zone2_min = r.cardio_min;
            r.zone3_min = r.peak_min;
            r.demographic_vo2max = std::round((vo2 + rng.normal(0, 0.4)) * 10) / 10;
            r.resting_hr = std::round(clamp(rng.normal(resting_mean, 1.6), 40, 100));
            b.daily.push_back(r);
        }
    }

    // --- Sleep episodes, one per night; the episode belongs to its wake date.
    {
        const double tib_mean = clamp(lat.of("time_in_bed_min"), 240, 600);
        const double awake_mean = clamp(lat.of("awake_min"), 15, 120);
        const double deep_mean = clamp(lat.of("deep_min"), 20, 120);
        const double rem_mean = clamp(lat.of("rem_min"), 20, 150);
        const double score_mean = clamp(lat.of("sleep_score"), 40, 95);
        const double bed_mean = lat.of("sleep_start_min");   // minutes after 18:00
        const double wake_mean = lat.of("sleep_end_min");    // minutes after midnight
        const double spo2_mean = clamp(lat.of("spo2"), 88, 99);
        const double nonrem_mean = clamp(lat.of("nonrem_hr"), 40, 95);

        for (int night = 0; night < spec.days; ++night) {
            ingest::SleepEpisode e;
            const Date bed_date = add_days(start, night);
            const bool weekend_wake = is_weekend(add_days(bed_date, 1));
            const double bed_min = clamp(
                rng.normal(bed_mean + (weekend_wake ? 18.0 : 0.0), 22), 120, 700);
            const int bed_total = static_cast<int>(std::round(bed_min)) + 18 * 60;
            e.start = make_timestamp(bed_date, (bed_total / 60) % 24, bed_total % 60, 0,
                                             kOffsetSec);
            if (bed_total >= 1440) {  // past midnight
                e.start = make_timestamp(add_days(bed_date, 1),
                                                 (bed_total - 1440) / 60, bed_total % 60, 0,
                                                 kOffsetSec);
            }
            double tib = clamp(rng.normal(tib_mean, 28), 180, 720);
            // Aim the wake clock at the subject's latent wake time when in a
            // sane range, keeping bedtime + duration consistent.
            const double wake_guess =
                std::fmod(static_cast<double>(bed_total) + tib, 1440.0);
            const double wake_target = clamp(rng.normal(wake_mean, 14), 240, 780);
            double shift = wake_target - wake_guess;
            if (shift > 720) shift -= 1440;
            if (shift < -720) shift += 1440;
            tib = clamp(tib + shift, 180, 780);
            const int tib_i = static_cast<int>(std::round(tib));
            e.end = Timestamp{e.start.epoch_sec + tib_i * 60, kOffsetSec};

            e.awake_min = std::round(clamp(rng.normal(awake_mean, 9), 5, tib_i * 0.4));
            e.asleep_min = tib_i - e.awake_min;
            e.deep_min = std::round(clamp(rng.normal(deep_mean, 9), 10, e.asleep_min * 0.5));
            e.rem_min = std::round(clamp(rng.normal(rem_mean, 12), 10,
                                         e.asleep_min - e.deep_min - 20));
            e.light_min = e.asleep_min - e.deep_min - e.rem_min;
            e.efficiency = std::round(100.0 * e.asleep_min / tib_i * 10) / 10;
            e.awakenings = std::round(clamp(rng.normal(14, 4), 0, 40));
            e.spo2_avg = std::round(clamp(rng.normal(spo2_mean, 0.5), 85, 100) * 10) / 10;
            e.spo2_lower = std::round(clamp(e.spo2_avg - std::fabs(rng.normal(2.2, 0.7)), 80,
                                            e.spo2_avg) * 10) / 10;
            e.spo2_upper = std::round(clamp(e.spo2_avg + std::fabs(rng.normal(1.8, 0.6)),
                                            e.spo2_avg, 100) * 10) / 10;
            e.nightly_temp_delta = std::round(rng.normal(0, 0.45) * 100) / 100;

            auto breathing = [&](double base_shift, double spread) {
                ingest::BreathingRate br;
                br.mean = std::round(clamp(rng.normal(14.5 + base_shift, 0.8), 8, 24) * 10) / 10;
                br.std_dev = std::round(clamp(std::fabs(rng.normal(spread, 0.25)), 0.05, 4.0) *
                                        100) / 100;
                br.signal_to_noise = std::round(clamp(rng.normal(20, 4), 2, 40) * 10) / 10;
                return br;
            };
            e.br_full = breathing(0.0, 1.0);
            e.br_deep = breathing(-0.8, 0.7);
            e.br_light = breathing(0.2, 1.0);
            e.br_rem = breathing(0.6, 1.2);

            e.restlessness =
                clamp(std::round(rng.normal(0.10, 0.03) * 1000) / 1000, 0.005, 0.6);
            const double overall = clamp(rng.normal(score_mean, 3.2), 30, 98);
            e.score_overall = std::round(overall);
            e.score_composition = std::round(clamp(overall * 0.30 + rng.normal(0, 1.5), 5, 100));
            e.score_revitalization =
                std::round(clamp(overall * 0.28 + rng.normal(0, 1.5), 5, 100));
            e.score_duration = std::round(clamp(overall * 0.40 + rng.normal(0, 2.0), 5, 100));

            // Nightly RMSSD from a short synthetic inter-beat series.
            {
                std::vector<double> ibi(40);
                const double base = 60000.0 / clamp(nonrem_mean, 40.0, 95.0);
                for (auto& v : ibi) v = base + rng.normal(0, 28);
                e.nightly_rmssd = std::round(featgen::rmssd(ibi) * 10) / 10;
            }
            e.nonrem_hr = std::round(clamp(rng.normal(nonrem_mean, 1.8), 40, 95) * 10) / 10;
            b.sleeps.push_back(e);
        }
    }

    // --- Stress, one record per day.
    {
        const double stress_mean = clamp(lat.of("stress_score"), 30, 98);
        for (int day = 0; day < spec.days; ++day) {
            ingest::StressDailyRecord r;
            r.date = add_days(start, day);
            const double score = clamp(rng.normal(stress_mean, 2.2), 5, 100);
            r.stress_score = std::round(score);
            r.sleep_points = std::round(clamp(score * 0.40 + rng.normal(0, 1.2), 0, 100));
            r.responsiveness_points =
                std::round(clamp(score * 0.29 + rng.normal(0, 1.2), 0, 100));
            r.exertion_points = std::round(clamp(score * 0.31 + rng.normal(0, 1.2), 0, 100));
            b.stress.push_back(r);
        }
    }

    // --- EDA sessions with SCL sample files.
    {
        const double scl_mean = clamp(lat.of("scl_mean"), 0.5, 30);
        const int count = 4 + static_cast<int>(rng.below(4));
        for (int i = 0; i < count; ++i) {
            ingest::EdaSession s;
            s.session_id = session_id("eda", i);
            const int day = static_cast<int>(rng.below(static_cast<uint64_t>(spec.days)));
            const int minute = 15 * 60 + static_cast<int>(rng.below(240));
            s.start = make_timestamp(add_days(start, day), minute / 60,
                                             minute % 60, 0, kOffsetSec);
            const int samples = 50 + static_cast<int>(rng.below(30));
            double level = clamp(rng.normal(scl_mean, scl_mean * 0.15 + 0.1), 0.05, 60);
            for (int k = 0; k < samples; ++k) {
                level = std::max(0.01, level + rng.normal(0, 0.08));
                s.scl_samples.push_back(std::round(level * 1000) / 1000);
            }
            const double hr_level = clamp(rng.normal(74, 6), 50, 110);
            s.hr_begin = std::round(clamp(hr_level + rng.normal(1.5, 1.0), 40, 130) * 10) / 10;
            s.hr_end = std::round(clamp(hr_level - rng.normal(1.0, 1.0), 40, 130) * 10) / 10;
            s.hrv_baseline_ms = std::round(clamp(rng.normal(42, 9), 8, 120) * 10) / 10;
            b.eda.push_back(s);
        }
        std::stable_sort(b.eda.begin(), b.eda.end(), [](const auto& a, const auto& c) {
            return a.start.epoch_sec < c.start.epoch_sec;
        });
    }

    // --- ECG sessions: 30 s at 50 Hz with a coarse beat morphology.
    {
        const double ecg_hr = clamp(lat.of("ecg_hr"), 45, 110);
        const int count = 3 + static_cast<int>(rng.below(3));
        for (int i = 0; i < count; ++i) {
            ingest::EcgSession s;
            s.session_id = session_id("ecg", i);
            const int day = static_cast<int>(rng.below(static_cast<uint64_t>(spec.days)));
            const int minute = 10 * 60 + static_cast<int>(rng.below(540));
            s.start = make_timestamp(add_days(start, day), minute / 60,
                                             minute % 60, 0, kOffsetSec);
            s.session_hr = std::round(clamp(rng.normal(ecg_hr, 2.0), 40, 130) * 10) / 10;
            const double beat_period = 60.0 / s.session_hr;
            const double dt = 0.02;
            const int samples = 1500;
            for (int k = 0; k < samples; ++k) {
                const double t = k * dt;
                const double phase = std::fmod(t, beat_period) / beat_period;
                double mv = 0.04 * std::sin(2 * M_PI * phase);
                const double qrs = (phase - 0.35) / 0.025;
                mv += 0.9 * std::exp(-qrs * qrs / 2.0);
                mv += rng.normal(0, 0.01);
                s.waveform.emplace_back(std::round(t * 1000) / 1000,
                                        std::round(mv * 10000) / 10000);
            }
            b.ecg.push_back(s);
        }
        std::stable_sort(b.ecg.begin(), b.ecg.end(), [](const auto& a, const auto& c) {
            return a.start.epoch_sec < c.start.epoch_sec;
        });
    }

    return b;
}

}  // namespace

GeneratedCohort generate_cohort(const CohortSpec& spec) {
    spec.validate();
    GeneratedCohort cohort;
    const int total = spec.n_positive + spec.n_negative;
    cohort.bundles.resize(total);
    cohort.labels.resize(total);
    const Rng root = Rng::seeded(spec.seed).derive({0x73796eULL /* "syn" */});
    for (int i = 0; i < total; ++i) {
        const bool positive = i < spec.n_positive;
        char sid[16];
        std::snprintf(sid, sizeof sid, "S%03d", i + 1);
        cohort.bundles[i] =
            simulate_subject(sid, positive, spec, root.derive({static_cast<uint64_t>(i)}));
        cohort.labels[i] = ingest::label_subject(cohort.bundles[i].meta);
    }
    return cohort;
}

std::vector<ingest::Label> permute_labels(const std::vector<ingest::Label>& labels,
                                          uint64_t seed) {
    std::vector<size_t> perm(labels.size());
    std::iota(perm.begin(), perm.end(), size_t{0});
    Rng rng = Rng::seeded(seed).derive({0x7065726dULL /* "perm" */});
    rng.shuffle(perm);
    std::vector<ingest::Label> out(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) out[i] = labels[perm[i]];
    return out;
}

GeneratedCohort plant_label_permutation(const GeneratedCohort& cohort, uint64_t seed) {
    GeneratedCohort out = cohort;
    out.labels = permute_labels(cohort.labels, seed);
    return out;
}

}  // namespace wearlab::synthcohort
