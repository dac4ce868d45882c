#include "wearlab/featgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wearlab/csv.hpp"

namespace wearlab::featgen {

using ingest::Sample;
using ingest::SleepEpisode;
using ingest::SubjectBundle;

const char* to_string(DatasetId d) {
    switch (d) {
        case DatasetId::ds4: return "DS4";
        case DatasetId::ds6: return "DS6";
        case DatasetId::ds7: return "DS7";
        case DatasetId::ds8: return "DS8";
        case DatasetId::ds9: return "DS9";
    }
    return "?";
}

const char* to_string(Daypart p) {
    switch (p) {
        case Daypart::all_day: return "all";
        case Daypart::morning: return "morning";
        case Daypart::afternoon: return "afternoon";
        case Daypart::evening: return "evening";
        case Daypart::night: return "night";
    }
    return "?";
}

DatasetId dataset_of(int id) {
    if (id <= 65) return DatasetId::ds4;
    if (id <= 123) return DatasetId::ds6;
    if (id <= 167) return DatasetId::ds7;
    if (id <= 264) return DatasetId::ds8;
    return DatasetId::ds9;
}

std::pair<int, int> dataset_block(DatasetId d) {
    switch (d) {
        case DatasetId::ds4: return {1, 65};
        case DatasetId::ds6: return {66, 123};
        case DatasetId::ds7: return {124, 167};
        case DatasetId::ds8: return {168, 264};
        case DatasetId::ds9: return {265, 284};
    }
    return {0, 0};
}

namespace {

// Sub-feature order within every day-parted block.
constexpr std::array<Daypart, 5> kDayparts = {Daypart::all_day, Daypart::morning,
                                              Daypart::afternoon, Daypart::evening,
                                              Daypart::night};

const char* daypart_phrase(Daypart p) {
    switch (p) {
        case Daypart::all_day: return "all day";
        case Daypart::morning: return "in the morning";
        case Daypart::afternoon: return "in the afternoon";
        case Daypart::evening: return "in the evening";
        case Daypart::night: return "at night";
    }
    return "";
}

constexpr std::array<const char*, 6> kStatPrefix = {"avg", "std of", "variance of",
                                                    "max", "min", "range of"};

std::vector<double> present_only(const std::vector<double>& xs) {
    std::vector<double> out;
    out.reserve(xs.size());
    for (double v : xs) {
        if (!is_missing(v)) out.push_back(v);
    }
    return out;
}

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return kMissing;
    double s = 0;
    for (double v : xs) s += v;
    return s / static_cast<double>(xs.size());
}

double pop_std(const std::vector<double>& xs) {
    if (xs.empty()) return kMissing;
    const double m = mean_of(xs);
    double acc = 0;
    for (double v : xs) acc += (v - m) * (v - m);
    return std::sqrt(acc / static_cast<double>(xs.size()));
}

// Appends (mean, std) over the present values of xs.
void push_mean_std(std::vector<double>& out, const std::vector<double>& xs) {
    const auto p = present_only(xs);
    out.push_back(mean_of(p));
    out.push_back(pop_std(p));
}

void push_six_stats(std::vector<double>& out, const std::vector<double>& xs) {
    const auto s = descriptive_stats(present_only(xs));
    out.push_back(s.mean);
    out.push_back(s.std_dev);
    out.push_back(s.variance);
    out.push_back(s.max);
    out.push_back(s.min);
    out.push_back(s.range);
}

double median_of(std::vector<double> xs) {
    if (xs.empty()) return kMissing;
    std::sort(xs.begin(), xs.end());
    const size_t n = xs.size();
    return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

double pct(int hits, int total) {
    return total == 0 ? kMissing : 100.0 * static_cast<double>(hits) / total;
}

}  // namespace

FeatureRegistry::FeatureRegistry() {
    entries_.reserve(kFeatureCount);
    int next_id = 1;
    auto add = [&](std::string name, std::optional<Daypart> part = std::nullopt) {
        RegistryEntry e;
        e.id = next_id++;
        e.name = std::move(name);
        e.dataset = dataset_of(e.id);
        e.daypart = part;
        entries_.push_back(std::move(e));
    };
    auto add_dayparted = [&](const std::string& stem_before, const std::string& stem_after = "") {
        for (Daypart p : kDayparts) {
            add(stem_before + " " + daypart_phrase(p) + stem_after, p);
        }
    };

    // DS4 (1-65): glucose.
    for (const char* stat : kStatPrefix) add_dayparted(std::string(stat) + " glucose");
    for (const char* band : {"very high", "high", "target", "low", "very low"}) {
        add_dayparted("% time in " + std::string(band) + " values");
    }
    add_dayparted("HB1Ac avg");
    add_dayparted("glucose variability");

    // DS6 (66-123): heart rate and ECG sessions.
    for (const char* stat : kStatPrefix) add_dayparted(std::string(stat) + " heart rate");
    add("avg resting heart rate");
    add("std of resting heart rate");
    add("avg heart rate during physical activity");
    add("std of heart rate during physical activity");
    add("avg heart rate during non-REM sleep");
    add("std of heart rate during non-REM sleep");
    add("avg RMSSD during sleep");
    add("std of RMSSD during sleep");
    add("avg heart rate during EDA sessions");
    add("std of heart rate during EDA sessions");
    add("avg heart rate at EDA session start");
    add("std of heart rate at EDA session start");
    add("avg heart rate at EDA session end");
    add("std of heart rate at EDA session end");
    add("avg HRV baseline during EDA sessions");
    add("std of HRV baseline during EDA sessions");
    for (const char* stat : kStatPrefix) {
        add(std::string(stat) + " waveform slope from ECG sessions");
    }
    for (const char* stat : kStatPrefix) {
        add(std::string(stat) + " heart rate during ECG sessions");
    }

    // DS7 (124-167): physical activity.
    add("avg calories");
    add("std of calories");
    add("avg steps");
    add("std of steps");
    add("avg distance");
    add("std of distance");
    add("number of physical activities performed");
    add("avg duration of physical activities");
    for (const char* zone : {"fat burn", "cardio", "peak"}) {
        add("avg " + std::string(zone) + " minutes");
        add("std of " + std::string(zone) + " minutes");
    }
    for (const char* level : {"sedentary", "lightly active", "moderately active", "very active"}) {
        add("avg " + std::string(level) + " minutes");
        add("std of " + std::string(level) + " minutes");
    }
    add("avg minutes below default zone 1");
    add("std of minutes below default zone 1");
    for (int z = 1; z <= 3; ++z) {
        add("avg minutes in default zone " + std::to_string(z));
        add("std of minutes in default zone " + std::to_string(z));
    }
    add("avg demographic VO2max");
    add("std of demographic VO2max");
    for (const char* level : {"lightly", "moderately", "very"}) {
        add("% days with >= 10 " + std::string(level) + " active minutes");
    }
    add("avg MVPA minutes");
    for (const char* level : {"sedentary", "lightly active", "moderately active", "very active"}) {
        add("avg " + std::string(level) + " minutes last week");
    }
    add("avg calories last week");
    add("avg steps last week");
    add("avg distance last week");
    add("avg MVPA minutes last week");

    // DS8 (168-264): sleep.
    add("std of oxygen saturation during sleep");
    add("avg oxygen saturation during sleep");
    add("avg lower bound oxygen saturation during sleep");
    add("std of lower bound oxygen saturation during sleep");
    add("avg upper bound oxygen saturation during sleep");
    add("std of upper bound oxygen saturation during sleep");
    for (const char* what : {"asleep duration", "awake duration", "deep sleep duration",
                             "light sleep duration", "REM sleep duration", "time in bed"}) {
        add("avg " + std::string(what));
        add("std of " + std::string(what));
    }
    for (const char* stage : {"full", "deep sleep", "light sleep", "REM sleep"}) {
        add("avg " + std::string(stage) + " breathing rate");
        add("std of " + std::string(stage) + " breathing rate");
        add("avg of std of " + std::string(stage) + " breathing rate");
        add("std of std of " + std::string(stage) + " breathing rate");
    }
    for (const char* stage : {"full", "deep sleep", "light sleep", "REM sleep"}) {
        add("avg signal-to-noise of " + std::string(stage) + " breathing rate");
        add("std of signal-to-noise of " + std::string(stage) + " breathing rate");
    }
    add("avg nightly temperature deviation");
    add("std of nightly temperature deviation");
    for (const char* sc : {"composition score", "revitalization score", "duration score"}) {
        add("avg " + std::string(sc));
        add("std of " + std::string(sc));
    }
    add("avg restlessness");
    add("std of restlessness");
    for (const char* split : {"total", "weekdays", "weekend days"}) {
        add("avg " + std::string(split) + " overall sleep score");
    }
    for (const char* split : {"total", "weekdays", "weekend days"}) {
        add("std of " + std::string(split) + " overall sleep score");
    }
    for (const char* split : {"total", "weekdays", "weekend days"}) {
        add("avg " + std::string(split) + " sleep start time");
    }
    for (const char* split : {"total", "weekdays", "weekend days"}) {
        add("std of " + std::string(split) + " sleep start time");
    }
    for (const char* split : {"total", "weekdays", "weekend days"}) {
        add("avg " + std::string(split) + " sleep end time");
    }
    for (const char* split : {"total", "weekdays", "weekend days"}) {
        add("std of " + std::string(split) + " sleep end time");
    }
    add("avg sleep efficiency");
    add("std of sleep efficiency");
    add("avg night awakenings");
    add("std of night awakenings");
    add("% days with regular wake-up time");
    add("% weekdays with regular wake-up time");
    add("% weekend days with regular wake-up time");
    add("% days with regular bedtime");
    add("% weekdays with regular bedtime");
    add("% weekend days with regular bedtime");
    add("avg early waking deviation");
    add("avg late waking deviation");
    add("% nights with over 25% REM sleep");
    add("% nights with restlessness improvement");
    add("% nights with restlessness worsening");
    for (const char* stage : {"deep sleep", "light sleep", "REM sleep"}) {
        add("avg " + std::string(stage) + " percentage");
        add("std of " + std::string(stage) + " percentage");
    }
    add("avg awake percentage");
    add("std of awake percentage");
    add("avg early bedtime deviation");
    add("avg late bedtime deviation");
    add("% nights with awakenings");
    add("avg awakenings per hour asleep");

    // DS9 (265-284): emotional state.
    for (const char* what :
         {"stress score", "sleep points", "responsiveness points", "exertion points"}) {
        add("avg " + std::string(what));
        add("std of " + std::string(what));
    }
    for (const char* stat : {"means", "stds", "variances", "maxima", "minima", "ranges"}) {
        add("avg of SCL session " + std::string(stat));
        add("std of SCL session " + std::string(stat));
    }

    if (entries_.size() != kFeatureCount) {
        throw Error("feature registry has " + std::to_string(entries_.size()) +
                    " entries, expected " + std::to_string(kFeatureCount));
    }
}

const FeatureRegistry& FeatureRegistry::instance() {
    static const FeatureRegistry reg;
    return reg;
}

int FeatureRegistry::id_of(const std::string& name) const {
    static const std::map<std::string, int> index = [] {
        std::map<std::string, int> m;
        for (const auto& e : FeatureRegistry::instance().entries_) m.emplace(e.name, e.id);
        return m;
    }();
    auto it = index.find(name);
    return it == index.end() ? 0 : it->second;
}

DescriptiveStats descriptive_stats(const std::vector<double>& xs) {
    DescriptiveStats s;
    if (xs.empty()) return s;
    double sum = 0, mn = xs[0], mx = xs[0];
    for (double v : xs) {
        sum += v;
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    s.mean = sum / static_cast<double>(xs.size());
    double acc = 0;
    for (double v : xs) acc += (v - s.mean) * (v - s.mean);
    s.variance = acc / static_cast<double>(xs.size());
    s.std_dev = std::sqrt(s.variance);
    s.max = mx;
    s.min = mn;
    s.range = mx - mn;
    return s;
}

std::array<std::vector<double>, 5> partition_by_daypart(const std::vector<Sample>& xs) {
    std::array<std::vector<double>, 5> parts;
    parts[0].reserve(xs.size());
    for (const auto& s : xs) {
        parts[0].push_back(s.value);
        const double minute = s.time.local_minute_of_day();
        if (minute < 360) {
            parts[4].push_back(s.value);  // night [00:00, 06:00)
        } else if (minute < 720) {
            parts[1].push_back(s.value);  // morning [06:00, 12:00)
        } else if (minute < 1080) {
            parts[2].push_back(s.value);  // afternoon [12:00, 18:00)
        } else {
            parts[3].push_back(s.value);  // evening [18:00, 24:00)
        }
    }
    return parts;
}

GlucoseBands glucose_band_fractions(const std::vector<double>& readings) {
    GlucoseBands b;
    if (readings.empty()) return b;
    int very_low = 0, low = 0, target = 0, high = 0, very_high = 0;
    for (double v : readings) {
        if (v < 54) {
            ++very_low;
        } else if (v < 70) {
            ++low;
        } else if (v <= 180) {
            ++target;
        } else if (v <= 250) {
            ++high;
        } else {
            ++very_high;
        }
    }
    const double n = static_cast<double>(readings.size());
    b.very_low = 100.0 * very_low / n;
    b.low = 100.0 * low / n;
    b.target = 100.0 * target / n;
    b.high = 100.0 * high / n;
    b.very_high = 100.0 * very_high / n;
    return b;
}

double estimated_hba1c(double mean_glucose) {
    if (!(mean_glucose > 0)) {
        throw DomainError("estimated_hba1c: mean glucose must be positive");
    }
    return (mean_glucose + 46.7) / 28.7;
}

double glucose_cv(const std::vector<double>& readings) {
    if (readings.empty()) return kMissing;
    const double m = mean_of(readings);
    if (!(m > 0)) return kMissing;
    return 100.0 * pop_std(readings) / m;
}

double rmssd(const std::vector<double>& intervals_ms) {
    if (intervals_ms.size() < 2) return kMissing;
    double acc = 0;
    for (size_t i = 1; i < intervals_ms.size(); ++i) {
        const double d = intervals_ms[i] - intervals_ms[i - 1];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(intervals_ms.size() - 1));
}

std::vector<double> extract_ds4(const SubjectBundle& b) {
    std::vector<double> out;
    out.reserve(65);
    const auto parts = partition_by_daypart(b.glucose.samples);

    std::array<DescriptiveStats, 5> stats;
    for (int p = 0; p < 5; ++p) stats[p] = descriptive_stats(parts[p]);
    for (int p = 0; p < 5; ++p) out.push_back(stats[p].mean);
    for (int p = 0; p < 5; ++p) out.push_back(stats[p].std_dev);
    for (int p = 0; p < 5; ++p) out.push_back(stats[p].variance);
    for (int p = 0; p < 5; ++p) out.push_back(stats[p].max);
    for (int p = 0; p < 5; ++p) out.push_back(stats[p].min);
    for (int p = 0; p < 5; ++p) out.push_back(stats[p].range);

    std::array<GlucoseBands, 5> bands;
    for (int p = 0; p < 5; ++p) bands[p] = glucose_band_fractions(parts[p]);
    for (int p = 0; p < 5; ++p) out.push_back(bands[p].very_high);
    for (int p = 0; p < 5; ++p) out.push_back(bands[p].high);
    for (int p = 0; p < 5; ++p) out.push_back(bands[p].target);
    for (int p = 0; p < 5; ++p) out.push_back(bands[p].low);
    for (int p = 0; p < 5; ++p) out.push_back(bands[p].very_low);

    for (int p = 0; p < 5; ++p) {
        out.push_back(parts[p].empty() ? kMissing : estimated_hba1c(stats[p].mean));
    }
    for (int p = 0; p < 5; ++p) out.push_back(glucose_cv(parts[p]));
    return out;
}

std::vector<double> extract_ds6(const SubjectBundle& b) {
    std::vector<double> out;
    out.reserve(58);
    const auto parts = partition_by_daypart(b.hr.samples);
    std::array<DescriptiveStats, 5> stats;
    for (int p = 0; p < 5; ++p) stats[p] = descriptive_stats(parts[p]);
    for (int p = 0; p < 5; ++p) out.push_back(stats[p].mean);
    for (int p = 0; p < 5; ++p) out.push_back(stats[p].std_dev);
    for (int p = 0; p < 5; ++p) out.push_back(stats[p].variance);
    for (int p = 0; p < 5; ++p) out.push_back(stats[p].max);
    for (int p = 0; p < 5; ++p) out.push_back(stats[p].min);
    for (int p = 0; p < 5; ++p) out.push_back(stats[p].range);

    std::vector<double> resting, exercise_hr, nonrem, rmssd_vals;
    for (const auto& d : b.daily) resting.push_back(d.resting_hr);
    for (const auto& e : b.exercises) exercise_hr.push_back(e.avg_hr);
    for (const auto& s : b.sleeps) {
        nonrem.push_back(s.nonrem_hr);
        rmssd_vals.push_back(s.nightly_rmssd);
    }
    push_mean_std(out, resting);
    push_mean_std(out, exercise_hr);
    push_mean_std(out, nonrem);
    push_mean_std(out, rmssd_vals);

    std::vector<double> eda_hr, eda_begin, eda_end, eda_hrv;
    for (const auto& s : b.eda) {
        const bool hb = !is_missing(s.hr_begin);
        const bool he = !is_missing(s.hr_end);
        if (hb && he) {
            eda_hr.push_back((s.hr_begin + s.hr_end) / 2.0);
        } else if (hb) {
            eda_hr.push_back(s.hr_begin);
        } else if (he) {
            eda_hr.push_back(s.hr_end);
        }
        eda_begin.push_back(s.hr_begin);
        eda_end.push_back(s.hr_end);
        eda_hrv.push_back(s.hrv_baseline_ms);
    }
    push_mean_std(out, eda_hr);
    push_mean_std(out, eda_begin);
    push_mean_std(out, eda_end);
    push_mean_std(out, eda_hrv);

    // ECG: per-session mean of first differences over the sampling interval.
    std::vector<double> slopes, session_hr;
    for (const auto& s : b.ecg) {
        if (s.waveform.size() >= 2) {
            const double dt = s.waveform[1].first - s.waveform[0].first;
            double acc = 0;
            for (size_t i = 1; i < s.waveform.size(); ++i) {
                acc += (s.waveform[i].second - s.waveform[i - 1].second) / dt;
            }
            slopes.push_back(acc / static_cast<double>(s.waveform.size() - 1));
        }
        session_hr.push_back(s.session_hr);
    }
    push_six_stats(out, slopes);
    push_six_stats(out, session_hr);
    return out;
}

std::vector<double> extract_ds7(const SubjectBundle& b) {
    std::vector<double> out;
    out.reserve(44);
    std::vector<double> calories, steps, distance, fat_burn, cardio, peak, sedentary, lightly,
        moderately, very, below_z1, z1, z2, z3, vo2max, mvpa;
    const Date last_week_from = add_days(b.meta.intervention_end, -6);
    std::vector<double> lw_sed, lw_light, lw_mod, lw_very, lw_cal, lw_steps, lw_dist, lw_mvpa;

    int ge10_light = 0, n_light = 0, ge10_mod = 0, n_mod = 0, ge10_very = 0, n_very = 0;
    for (const auto& d : b.daily) {
        calories.push_back(d.calories);
        steps.push_back(d.steps);
        distance.push_back(d.distance_km);
        fat_burn.push_back(d.fat_burn_min);
        cardio.push_back(d.cardio_min);
        peak.push_back(d.peak_min);
        sedentary.push_back(d.sedentary_min);
        lightly.push_back(d.lightly_min);
        moderately.push_back(d.moderately_min);
        very.push_back(d.very_min);
        below_z1.push_back(d.below_zone1_min);
        z1.push_back(d.zone1_min);
        z2.push_back(d.zone2_min);
        z3.push_back(d.zone3_min);
        vo2max.push_back(d.demographic_vo2max);
        const bool has_mvpa = !is_missing(d.moderately_min) && !is_missing(d.very_min);
        const double day_mvpa = has_mvpa ? d.moderately_min + d.very_min : kMissing;
        mvpa.push_back(day_mvpa);
        if (!is_missing(d.lightly_min)) {
            ++n_light;
            if (d.lightly_min >= 10) ++ge10_light;
        }
        if (!is_missing(d.moderately_min)) {
            ++n_mod;
            if (d.moderately_min >= 10) ++ge10_mod;
        }
        if (!is_missing(d.very_min)) {
            ++n_very;
            if (d.very_min >= 10) ++ge10_very;
        }
        if (d.date >= last_week_from && d.date <= b.meta.intervention_end) {
            lw_sed.push_back(d.sedentary_min);
            lw_light.push_back(d.lightly_min);
            lw_mod.push_back(d.moderately_min);
            lw_very.push_back(d.very_min);
            lw_cal.push_back(d.calories);
            lw_steps.push_back(d.steps);
            lw_dist.push_back(d.distance_km);
            lw_mvpa.push_back(day_mvpa);
        }
    }

    push_mean_std(out, calories);
    push_mean_std(out, steps);
    push_mean_std(out, distance);
    // A zero session count is meaningful once the tracker produced any
    // activity data; with no data at all the count is unknown.
    const bool tracker_worn = !b.daily.empty() || !b.exercises.empty();
    out.push_back(tracker_worn ? static_cast<double>(b.exercises.size()) : kMissing);
    {
        std::vector<double> durations;
        for (const auto& e : b.exercises) durations.push_back(e.duration_min);
        out.push_back(mean_of(durations));
    }
    push_mean_std(out, fat_burn);
    push_mean_std(out, cardio);
    push_mean_std(out, peak);
    push_mean_std(out, sedentary);
    push_mean_std(out, lightly);
    push_mean_std(out, moderately);
    push_mean_std(out, very);
    push_mean_std(out, below_z1);
    push_mean_std(out, z1);
    push_mean_std(out, z2);
    push_mean_std(out, z3);
    push_mean_std(out, vo2max);
    out.push_back(pct(ge10_light, n_light));
    out.push_back(pct(ge10_mod, n_mod));
    out.push_back(pct(ge10_very, n_very));
    out.push_back(mean_of(present_only(mvpa)));
    out.push_back(mean_of(present_only(lw_sed)));
    out.push_back(mean_of(present_only(lw_light)));
    out.push_back(mean_of(present_only(lw_mod)));
    out.push_back(mean_of(present_only(lw_very)));
    out.push_back(mean_of(present_only(lw_cal)));
    out.push_back(mean_of(present_only(lw_steps)));
    out.push_back(mean_of(present_only(lw_dist)));
    out.push_back(mean_of(present_only(lw_mvpa)));
    return out;
}

namespace {

// Bedtimes as minutes after 18:00, wake times as minutes after midnight,
// keeping nightly values on a wrap-free axis for means and medians.
double bedtime_minutes(const SleepEpisode& e) {
    double m = e.start.local_minute_of_day() - 1080.0;
    if (m < 0) m += 1440.0;
    return m;
}

double waketime_minutes(const SleepEpisode& e) { return e.end.local_minute_of_day(); }

struct SplitValues {
    std::vector<double> total, weekdays, weekends;

    void push(double v, bool weekend) {
        if (is_missing(v)) return;
        total.push_back(v);
        if (weekend) {
            weekends.push_back(v);
        } else {
            weekdays.push_back(v);
        }
    }
};

void push_split_means(std::vector<double>& out, const SplitValues& s) {
    out.push_back(mean_of(s.total));
    out.push_back(mean_of(s.weekdays));
    out.push_back(mean_of(s.weekends));
    out.push_back(pop_std(s.total));
    out.push_back(pop_std(s.weekdays));
    out.push_back(pop_std(s.weekends));
}

// A day counts as regular when its time lies within +/-30 min of the
// subject's own median.
struct RegularityStats {
    double pct_total = kMissing, pct_weekdays = kMissing, pct_weekends = kMissing;
    double early_dev = kMissing, late_dev = kMissing;
};

RegularityStats regularity(const std::vector<double>& times, const std::vector<bool>& weekend) {
    RegularityStats r;
    if (times.empty()) return r;
    const double med = median_of(times);
    int reg = 0, n_wd = 0, reg_wd = 0, n_we = 0, reg_we = 0;
    std::vector<double> early, late;
    for (size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        const bool ok = std::fabs(t - med) <= 30.0;
        if (ok) ++reg;
        if (weekend[i]) {
            ++n_we;
            if (ok) ++reg_we;
        } else {
            ++n_wd;
            if (ok) ++reg_wd;
        }
        if (t < med - 30.0) early.push_back(med - 30.0 - t);
        if (t > med + 30.0) late.push_back(t - med - 30.0);
    }
    r.pct_total = pct(reg, static_cast<int>(times.size()));
    r.pct_weekdays = pct(reg_wd, n_wd);
    r.pct_weekends = pct(reg_we, n_we);
    r.early_dev = early.empty() ? 0.0 : mean_of(early);
    r.late_dev = late.empty() ? 0.0 : mean_of(late);
    return r;
}

}  // namespace

std::vector<double> extract_ds8(const SubjectBundle& b) {
    std::vector<double> out;
    out.reserve(97);
    const auto& sleeps = b.sleeps;

    std::vector<double> spo2_avg, spo2_lower, spo2_upper;
    for (const auto& e : sleeps) {
        spo2_avg.push_back(e.spo2_avg);
        spo2_lower.push_back(e.spo2_lower);
        spo2_upper.push_back(e.spo2_upper);
    }
    out.push_back(pop_std(present_only(spo2_avg)));
    out.push_back(mean_of(present_only(spo2_avg)));
    out.push_back(mean_of(present_only(spo2_lower)));
    out.push_back(pop_std(present_only(spo2_lower)));
    out.push_back(mean_of(present_only(spo2_upper)));
    out.push_back(pop_std(present_only(spo2_upper)));

    std::vector<double> asleep, awake, deep, light, rem, tib;
    for (const auto& e : sleeps) {
        asleep.push_back(e.asleep_min);
        awake.push_back(e.awake_min);
        deep.push_back(e.deep_min);
        light.push_back(e.light_min);
        rem.push_back(e.rem_min);
        tib.push_back(e.time_in_bed_min());
    }
    push_mean_std(out, asleep);
    push_mean_std(out, awake);
    push_mean_std(out, deep);
    push_mean_std(out, light);
    push_mean_std(out, rem);
    push_mean_std(out, tib);

    const auto br_of = [&](const SleepEpisode& e, int stage) -> const ingest::BreathingRate& {
        switch (stage) {
            case 0: return e.br_full;
            case 1: return e.br_deep;
            case 2: return e.br_light;
            default: return e.br_rem;
        }
    };
    for (int stage = 0; stage < 4; ++stage) {
        std::vector<double> means, stds;
        for (const auto& e : sleeps) {
            means.push_back(br_of(e, stage).mean);
            stds.push_back(br_of(e, stage).std_dev);
        }
        push_mean_std(out, means);
        push_mean_std(out, stds);
    }
    for (int stage = 0; stage < 4; ++stage) {
        std::vector<double> snr;
        for (const auto& e : sleeps) snr.push_back(br_of(e, stage).signal_to_noise);
        push_mean_std(out, snr);
    }

    std::vector<double> temp, comp, revit, dur, restless;
    for (const auto& e : sleeps) {
        temp.push_back(e.nightly_temp_delta);
        comp.push_back(e.score_composition);
        revit.push_back(e.score_revitalization);
        dur.push_back(e.score_duration);
        restless.push_back(e.restlessness);
    }
    push_mean_std(out, temp);
    push_mean_std(out, comp);
    push_mean_std(out, revit);
    push_mean_std(out, dur);
    push_mean_std(out, restless);

    SplitValues overall, start_time, end_time;
    for (const auto& e : sleeps) {
        const bool weekend = is_weekend(e.wake_date());
        overall.push(e.score_overall, weekend);
        start_time.push(bedtime_minutes(e), weekend);
        end_time.push(waketime_minutes(e), weekend);
    }
    push_split_means(out, overall);
    push_split_means(out, start_time);
    push_split_means(out, end_time);

    std::vector<double> efficiency, awakenings;
    for (const auto& e : sleeps) {
        efficiency.push_back(e.efficiency);
        awakenings.push_back(e.awakenings);
    }
    push_mean_std(out, efficiency);
    push_mean_std(out, awakenings);

    std::vector<double> wake_times, bed_times;
    std::vector<bool> weekends;
    for (const auto& e : sleeps) {
        wake_times.push_back(waketime_minutes(e));
        bed_times.push_back(bedtime_minutes(e));
        weekends.push_back(is_weekend(e.wake_date()));
    }
    const RegularityStats wake_reg = regularity(wake_times, weekends);
    const RegularityStats bed_reg = regularity(bed_times, weekends);
    out.push_back(wake_reg.pct_total);
    out.push_back(wake_reg.pct_weekdays);
    out.push_back(wake_reg.pct_weekends);
    out.push_back(bed_reg.pct_total);
    out.push_back(bed_reg.pct_weekdays);
    out.push_back(bed_reg.pct_weekends);
    out.push_back(wake_reg.early_dev);
    out.push_back(wake_reg.late_dev);

    {
        int restful = 0, n = 0;
        for (const auto& e : sleeps) {
            if (is_missing(e.rem_min) || is_missing(e.asleep_min) || e.asleep_min <= 0) continue;
            ++n;
            if (e.rem_min / e.asleep_min > 0.25) ++restful;
        }
        out.push_back(pct(restful, n));
    }

    // Night n improves on night n-1 when restlessness strictly drops.
    {
        int better = 0, worse = 0, pairs = 0;
        const SleepEpisode* prev = nullptr;
        for (const auto& e : sleeps) {
            if (is_missing(e.restlessness)) continue;
            if (prev) {
                ++pairs;
                if (e.restlessness < prev->restlessness) ++better;
                if (e.restlessness > prev->restlessness) ++worse;
            }
            prev = &e;
        }
        out.push_back(pct(better, pairs));
        out.push_back(pct(worse, pairs));
    }

    {
        std::vector<double> deep_pct, light_pct, rem_pct, awake_pct;
        for (const auto& e : sleeps) {
            if (!is_missing(e.asleep_min) && e.asleep_min > 0) {
                if (!is_missing(e.deep_min)) deep_pct.push_back(100.0 * e.deep_min / e.asleep_min);
                if (!is_missing(e.light_min)) {
                    light_pct.push_back(100.0 * e.light_min / e.asleep_min);
                }
                if (!is_missing(e.rem_min)) rem_pct.push_back(100.0 * e.rem_min / e.asleep_min);
            }
            const double t = e.time_in_bed_min();
            if (!is_missing(e.awake_min) && t > 0) awake_pct.push_back(100.0 * e.awake_min / t);
        }
        push_mean_std(out, deep_pct);
        push_mean_std(out, light_pct);
        push_mean_std(out, rem_pct);
        push_mean_std(out, awake_pct);
    }

    out.push_back(bed_reg.early_dev);
    out.push_back(bed_reg.late_dev);

    {
        int with = 0, n = 0;
        std::vector<double> per_hour;
        for (const auto& e : sleeps) {
            if (!is_missing(e.awakenings)) {
                ++n;
                if (e.awakenings >= 1) ++with;
                if (!is_missing(e.asleep_min) && e.asleep_min > 0) {
                    per_hour.push_back(e.awakenings / (e.asleep_min / 60.0));
                }
            }
        }
        out.push_back(pct(with, n));
        out.push_back(mean_of(per_hour));
    }
    return out;
}

std::vector<double> extract_ds9(const SubjectBundle& b) {
    std::vector<double> out;
    out.reserve(20);
    std::vector<double> score, sleep_pts, resp_pts, exer_pts;
    for (const auto& s : b.stress) {
        score.push_back(s.stress_score);
        sleep_pts.push_back(s.sleep_points);
        resp_pts.push_back(s.responsiveness_points);
        exer_pts.push_back(s.exertion_points);
    }
    push_mean_std(out, score);
    push_mean_std(out, sleep_pts);
    push_mean_std(out, resp_pts);
    push_mean_std(out, exer_pts);

    std::vector<double> means, stds, vars, maxima, minima, ranges;
    for (const auto& s : b.eda) {
        if (s.scl_samples.empty()) continue;
        const auto st = descriptive_stats(s.scl_samples);
        means.push_back(st.mean);
        stds.push_back(st.std_dev);
        vars.push_back(st.variance);
        maxima.push_back(st.max);
        minima.push_back(st.min);
        ranges.push_back(st.range);
    }
    push_mean_std(out, means);
    push_mean_std(out, stds);
    push_mean_std(out, vars);
    push_mean_std(out, maxima);
    push_mean_std(out, minima);
    push_mean_std(out, ranges);
    return out;
}

FeatureVector extract_all(const ingest::SubjectBundle& b) {
    FeatureVector fv;
    fv.subject_id = b.meta.subject_id;
    std::vector<double> all;
    all.reserve(kFeatureCount);
    for (const auto& block :
         {extract_ds4(b), extract_ds6(b), extract_ds7(b), extract_ds8(b), extract_ds9(b)}) {
        all.insert(all.end(), block.begin(), block.end());
    }
    if (all.size() != kFeatureCount) {
        throw Error("extract_all produced " + std::to_string(all.size()) + " values");
    }
    std::copy(all.begin(), all.end(), fv.values.begin());
    return fv;
}

CohortMatrix extract_cohort(const std::vector<ingest::SubjectBundle>& bundles) {
    CohortMatrix m;
    m.rows.reserve(bundles.size());
    for (const auto& b : bundles) {
        m.rows.push_back(extract_all(b));
        m.labels.push_back(ingest::label_subject(b.meta));
    }
    return m;
}

namespace {

std::string fmt_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

void write_features_csv(const std::string& path, const CohortMatrix& m) {
    std::ostringstream out;
    out << "subject_id,label";
    for (int i = 1; i <= kFeatureCount; ++i) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "f%03d", i);
        out << ',' << buf;
    }
    out << '\n';
    for (size_t r = 0; r < m.rows.size(); ++r) {
        out << m.rows[r].subject_id << ','
            << (m.labels[r] == ingest::Label::lost_ge_2pct ? '1' : '0');
        for (double v : m.rows[r].values) {
            out << ',';
            if (!is_missing(v)) out << fmt_double(v);
        }
        out << '\n';
    }
    write_text_file(path, out.str());
}

CohortMatrix read_features_csv(const std::string& path) {
    const CsvTable t = CsvTable::read_file(path);
    const size_t c_id = t.column("subject_id");
    const size_t c_label = t.column("label");
    size_t cols[kFeatureCount];
    for (int i = 1; i <= kFeatureCount; ++i) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "f%03d", i);
        cols[i - 1] = t.column(buf);
    }
    CohortMatrix m;
    for (size_t r = 0; r < t.rows(); ++r) {
        FeatureVector fv;
        fv.subject_id = t.required_string(r, c_id);
        for (int i = 0; i < kFeatureCount; ++i) {
            auto v = t.number(r, cols[i]);
            fv.values[i] = v ? *v : kMissing;
        }
        const double lbl = t.required_number(r, c_label);
        if (lbl != 0 && lbl != 1) t.fail(r, "label must be 0 or 1");
        m.rows.push_back(std::move(fv));
        m.labels.push_back(lbl == 1 ? ingest::Label::lost_ge_2pct : ingest::Label::lost_lt_2pct);
    }
    return m;
}

void write_registry_json(const std::string& path) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& e : FeatureRegistry::instance().entries()) {
        nlohmann::ordered_json item;
        item["id"] = e.id;
        item["name"] = e.name;
        item["dataset"] = to_string(e.dataset);
        if (e.daypart) {
            item["daypart"] = to_string(*e.daypart);
        } else {
            item["daypart"] = nullptr;
        }
        arr.push_back(std::move(item));
    }
    write_text_file(path, arr.dump(2) + "\n");
}

}  // namespace wearlab::featgen
