#include "wearlab/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "wearlab/csv.hpp"

namespace fs = std::filesystem;

namespace wearlab::ingest {

namespace {

constexpr double kGlucoseMin = 0.0, kGlucoseMax = 1000.0;  // exclusive bounds, mg/dL
constexpr double kHrMin = 20.0, kHrMax = 250.0;            // exclusive bounds, bpm

std::string fmt_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string opt_cell(double v) { return is_missing(v) ? std::string() : fmt_double(v); }

std::vector<Sample> parse_sample_rows(const CsvTable& t, double lo, double hi,
                                      const char* unit) {
    const size_t c_ts = t.column("timestamp");
    const size_t c_val = t.column("value");
    std::vector<Sample> out;
    out.reserve(t.rows());
    for (size_t r = 0; r < t.rows(); ++r) {
        Sample s;
        try {
            s.time = parse_timestamp(t.required_string(r, c_ts));
        } catch (const DomainError& e) {
            t.fail(r, e.what());
        }
        s.value = t.required_number(r, c_val);
        if (!(s.value > lo && s.value < hi)) {
            t.fail(r, std::string(unit) + " value " + fmt_double(s.value) + " outside (" +
                          fmt_double(lo) + ", " + fmt_double(hi) + ")");
        }
        out.push_back(s);
    }
    return out;
}

Date parse_date_cell(const CsvTable& t, size_t row, size_t col) {
    try {
        return parse_date(t.required_string(row, col));
    } catch (const DomainError& e) {
        t.fail(row, e.what());
    }
}

Timestamp parse_ts_cell(const CsvTable& t, size_t row, size_t col) {
    try {
        return parse_timestamp(t.required_string(row, col));
    } catch (const DomainError& e) {
        t.fail(row, e.what());
    }
}

double opt_number(const CsvTable& t, size_t row, size_t col) {
    auto v = t.number(row, col);
    return v ? *v : kMissing;
}

template <typename Rec>
void check_unique_dates(const CsvTable& t, const std::vector<Rec>& recs) {
    std::set<Date> seen;
    for (size_t i = 0; i < recs.size(); ++i) {
        if (!seen.insert(recs[i].date).second) {
            t.fail(i, "duplicate date " + format_date(recs[i].date) + " (ambiguous day)");
        }
    }
}

const std::vector<std::string> kSleepHeader = {
    "start", "end", "asleep_min", "awake_min", "deep_min", "light_min", "rem_min",
    "efficiency", "awakenings", "spo2_avg", "spo2_lower", "spo2_upper", "nightly_temp_delta",
    "br_full_mean", "br_full_std", "br_full_snr", "br_deep_mean", "br_deep_std", "br_deep_snr",
    "br_light_mean", "br_light_std", "br_light_snr", "br_rem_mean", "br_rem_std", "br_rem_snr",
    "restlessness", "score_overall", "score_composition", "score_revitalization",
    "score_duration", "nightly_rmssd", "nonrem_hr"};

bool in_range(double v, double lo, double hi) {
    return is_missing(v) || (v >= lo && v <= hi);
}

bool within_window(const Date& d, const Date& start, const Date& end) {
    return d >= add_days(start, -1) && d <= add_days(end, 1);
}

}  // namespace

Sex parse_sex(const std::string& s) {
    if (s == "female") return Sex::female;
    if (s == "male") return Sex::male;
    throw DomainError("invalid sex '" + s + "' (expected female|male)");
}

const char* to_string(Sex s) { return s == Sex::female ? "female" : "male"; }
const char* to_string(Label l) { return l == Label::lost_ge_2pct ? "lost_ge_2pct" : "lost_lt_2pct"; }

std::vector<SubjectMeta> parse_subject_manifest(const std::string& path) {
    const CsvTable t = CsvTable::read_file(path);
    const size_t c_id = t.column("subject_id");
    const size_t c_age = t.column("age");
    const size_t c_sex = t.column("sex");
    const size_t c_height = t.column("height_cm");
    const size_t c_w0 = t.column("initial_weight_kg");
    const size_t c_w1 = t.column("final_weight_kg");
    const size_t c_start = t.column("start_date");
    const size_t c_end = t.column("end_date");

    std::vector<SubjectMeta> out;
    std::set<std::string> ids;
    for (size_t r = 0; r < t.rows(); ++r) {
        SubjectMeta m;
        m.subject_id = t.required_string(r, c_id);
        if (!ids.insert(m.subject_id).second) t.fail(r, "duplicate subject_id " + m.subject_id);
        const double age = t.required_number(r, c_age);
        if (age < 18 || age != std::floor(age)) t.fail(r, "age must be an integer >= 18");
        m.age = static_cast<int>(age);
        try {
            m.sex = parse_sex(t.required_string(r, c_sex));
        } catch (const DomainError& e) {
            t.fail(r, e.what());
        }
        m.height_cm = t.required_number(r, c_height);
        m.initial_weight_kg = t.required_number(r, c_w0);
        m.final_weight_kg = t.required_number(r, c_w1);
        if (m.initial_weight_kg <= 0 || m.final_weight_kg <= 0) {
            t.fail(r, "weights must be positive");
        }
        m.intervention_start = parse_date_cell(t, r, c_start);
        m.intervention_end = parse_date_cell(t, r, c_end);
        if (!(m.intervention_end > m.intervention_start)) {
            t.fail(r, "end_date must be after start_date");
        }
        out.push_back(std::move(m));
    }
    return out;
}

GlucoseSeries parse_cgm_csv(const std::string& path) {
    const CsvTable t = CsvTable::read_file(path);
    return GlucoseSeries{parse_sample_rows(t, kGlucoseMin, kGlucoseMax, "glucose")};
}

HeartRateSeries parse_hr_csv(const std::string& path) {
    const CsvTable t = CsvTable::read_file(path);
    return HeartRateSeries{parse_sample_rows(t, kHrMin, kHrMax, "heart rate")};
}

std::vector<DailyActivityRecord> parse_activity_csv(const std::string& path) {
    const CsvTable t = CsvTable::read_file(path);
    const size_t c_date = t.column("date");
    const char* cols[] = {"calories", "steps", "distance_km", "sedentary_min", "lightly_min",
                          "moderately_min", "very_min", "fat_burn_min", "cardio_min", "peak_min",
                          "below_zone1_min", "zone1_min", "zone2_min", "zone3_min", "vo2max",
                          "resting_hr"};
    size_t idx[16];
    for (int i = 0; i < 16; ++i) idx[i] = t.column(cols[i]);

    std::vector<DailyActivityRecord> out;
    out.reserve(t.rows());
    for (size_t r = 0; r < t.rows(); ++r) {
        DailyActivityRecord rec;
        rec.date = parse_date_cell(t, r, c_date);
        double* fields[] = {&rec.calories, &rec.steps, &rec.distance_km, &rec.sedentary_min,
                            &rec.lightly_min, &rec.moderately_min, &rec.very_min,
                            &rec.fat_burn_min, &rec.cardio_min, &rec.peak_min,
                            &rec.below_zone1_min, &rec.zone1_min, &rec.zone2_min, &rec.zone3_min,
                            &rec.demographic_vo2max, &rec.resting_hr};
        for (int i = 0; i < 16; ++i) *fields[i] = opt_number(t, r, idx[i]);
        out.push_back(rec);
    }
    check_unique_dates(t, out);
    return out;
}

std::vector<SleepEpisode> parse_sleep_csv(const std::string& path) {
    const CsvTable t = CsvTable::read_file(path);
    size_t idx[32];
    for (size_t i = 0; i < kSleepHeader.size(); ++i) idx[i] = t.column(kSleepHeader[i]);

    std::vector<SleepEpisode> out;
    out.reserve(t.rows());
    for (size_t r = 0; r < t.rows(); ++r) {
        SleepEpisode e;
        e.start = parse_ts_cell(t, r, idx[0]);
        e.end = parse_ts_cell(t, r, idx[1]);
        double* fields[] = {&e.asleep_min, &e.awake_min, &e.deep_min, &e.light_min, &e.rem_min,
                            &e.efficiency, &e.awakenings, &e.spo2_avg, &e.spo2_lower,
                            &e.spo2_upper, &e.nightly_temp_delta, &e.br_full.mean,
                            &e.br_full.std_dev, &e.br_full.signal_to_noise, &e.br_deep.mean,
                            &e.br_deep.std_dev, &e.br_deep.signal_to_noise, &e.br_light.mean,
                            &e.br_light.std_dev, &e.br_light.signal_to_noise, &e.br_rem.mean,
                            &e.br_rem.std_dev, &e.br_rem.signal_to_noise, &e.restlessness,
                            &e.score_overall, &e.score_composition, &e.score_revitalization,
                            &e.score_duration, &e.nightly_rmssd, &e.nonrem_hr};
        for (int i = 0; i < 30; ++i) *fields[i] = opt_number(t, r, idx[i + 2]);
        out.push_back(e);
    }
    return out;
}

std::vector<StressDailyRecord> parse_stress_csv(const std::string& path) {
    const CsvTable t = CsvTable::read_file(path);
    const size_t c_date = t.column("date");
    const size_t c_score = t.column("stress_score");
    const size_t c_sleep = t.column("sleep_points");
    const size_t c_resp = t.column("responsiveness_points");
    const size_t c_exer = t.column("exertion_points");

    std::vector<StressDailyRecord> out;
    out.reserve(t.rows());
    for (size_t r = 0; r < t.rows(); ++r) {
        StressDailyRecord rec;
        rec.date = parse_date_cell(t, r, c_date);
        rec.stress_score = opt_number(t, r, c_score);
        rec.sleep_points = opt_number(t, r, c_sleep);
        rec.responsiveness_points = opt_number(t, r, c_resp);
        rec.exertion_points = opt_number(t, r, c_exer);
        out.push_back(rec);
    }
    check_unique_dates(t, out);
    return out;
}

std::vector<ExerciseSession> parse_exercise_csv(const std::string& path) {
    const CsvTable t = CsvTable::read_file(path);
    const size_t c_start = t.column("start");
    const size_t c_dur = t.column("duration_min");
    const size_t c_hr = t.column("avg_hr");

    std::vector<ExerciseSession> out;
    out.reserve(t.rows());
    for (size_t r = 0; r < t.rows(); ++r) {
        ExerciseSession s;
        s.start = parse_ts_cell(t, r, c_start);
        s.duration_min = t.required_number(r, c_dur);
        if (!(s.duration_min > 0)) t.fail(r, "exercise duration must be positive");
        s.avg_hr = opt_number(t, r, c_hr);
        out.push_back(s);
    }
    return out;
}

std::vector<EdaSession> parse_eda_sessions(const std::string& index_path,
                                           const std::string& samples_dir) {
    const CsvTable t = CsvTable::read_file(index_path);
    const size_t c_id = t.column("session_id");
    const size_t c_start = t.column("start");
    const size_t c_b = t.column("hr_begin");
    const size_t c_e = t.column("hr_end");
    const size_t c_hrv = t.column("hrv_baseline_ms");

    std::vector<EdaSession> out;
    for (size_t r = 0; r < t.rows(); ++r) {
        EdaSession s;
        s.session_id = t.required_string(r, c_id);
        s.start = parse_ts_cell(t, r, c_start);
        s.hr_begin = opt_number(t, r, c_b);
        s.hr_end = opt_number(t, r, c_e);
        s.hrv_baseline_ms = opt_number(t, r, c_hrv);

        const std::string sample_path = samples_dir + "/" + s.session_id + ".csv";
        if (!fs::exists(sample_path)) {
            throw SchemaError("EDA session " + s.session_id + ": missing sample file " +
                              sample_path);
        }
        const CsvTable st = CsvTable::read_file(sample_path);
        const size_t c_scl = st.column("scl_us");
        for (size_t sr = 0; sr < st.rows(); ++sr) {
            s.scl_samples.push_back(st.required_number(sr, c_scl));
        }
        if (s.scl_samples.empty()) {
            throw SchemaError("EDA session " + s.session_id + ": empty SCL sample file");
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<EcgSession> parse_ecg_sessions(const std::string& index_path,
                                           const std::string& samples_dir) {
    const CsvTable t = CsvTable::read_file(index_path);
    const size_t c_id = t.column("session_id");
    const size_t c_start = t.column("start");
    const size_t c_hr = t.column("session_hr");

    std::vector<EcgSession> out;
    for (size_t r = 0; r < t.rows(); ++r) {
        EcgSession s;
        s.session_id = t.required_string(r, c_id);
        s.start = parse_ts_cell(t, r, c_start);
        s.session_hr = opt_number(t, r, c_hr);

        const std::string sample_path = samples_dir + "/" + s.session_id + ".csv";
        if (!fs::exists(sample_path)) {
            throw SchemaError("ECG session " + s.session_id + ": missing sample file " +
                              sample_path);
        }
        const CsvTable st = CsvTable::read_file(sample_path);
        const size_t c_t = st.column("t_sec");
        const size_t c_mv = st.column("mv");
        for (size_t sr = 0; sr < st.rows(); ++sr) {
            s.waveform.emplace_back(st.required_number(sr, c_t), st.required_number(sr, c_mv));
        }
        if (s.waveform.size() < 2) {
            throw SchemaError("ECG session " + s.session_id + ": needs at least 2 samples");
        }
        const double dt = s.waveform[1].first - s.waveform[0].first;
        if (!(dt > 0)) {
            throw SchemaError("ECG session " + s.session_id + ": non-positive sampling interval");
        }
        for (size_t i = 2; i < s.waveform.size(); ++i) {
            const double di = s.waveform[i].first - s.waveform[i - 1].first;
            if (std::fabs(di - dt) > 1e-9) {
                throw SchemaError("ECG session " + s.session_id + ": non-uniform sampling");
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

SubjectBundle read_subject_dir(const std::string& cohort_dir, const SubjectMeta& meta) {
    const std::string dir = cohort_dir + "/" + meta.subject_id;
    SubjectBundle b;
    b.meta = meta;
    b.glucose = parse_cgm_csv(dir + "/cgm.csv");
    b.hr = parse_hr_csv(dir + "/hr.csv");
    b.daily = parse_activity_csv(dir + "/activity.csv");
    b.sleeps = parse_sleep_csv(dir + "/sleep.csv");
    b.stress = parse_stress_csv(dir + "/stress.csv");
    b.exercises = parse_exercise_csv(dir + "/exercise.csv");
    b.eda = parse_eda_sessions(dir + "/eda_sessions.csv", dir + "/eda");
    b.ecg = parse_ecg_sessions(dir + "/ecg_sessions.csv", dir + "/ecg");
    return b;
}

std::vector<SubjectBundle> read_cohort_dir(const std::string& cohort_dir) {
    const auto metas = parse_subject_manifest(cohort_dir + "/subjects.csv");
    std::vector<SubjectBundle> out;
    out.reserve(metas.size());
    for (const auto& m : metas) out.push_back(read_subject_dir(cohort_dir, m));
    return out;
}

namespace {

std::vector<Sample> clean_samples(std::vector<Sample> xs, const Date& start, const Date& end,
                                  double lo, double hi, const std::string& tag,
                                  CleaningReport& rep) {
    std::stable_sort(xs.begin(), xs.end(),
                     [](const Sample& a, const Sample& b) { return a.time < b.time; });
    std::vector<Sample> out;
    out.reserve(xs.size());
    int dup = 0, window = 0, bounds = 0;
    for (const auto& s : xs) {
        if (!out.empty() && out.back().time == s.time) {
            ++dup;  // keep first occurrence
            continue;
        }
        if (!within_window(s.time.local_date(), start, end)) {
            ++window;
            continue;
        }
        if (!(s.value > lo && s.value < hi)) {
            ++bounds;
            continue;
        }
        out.push_back(s);
    }
    rep.add(tag + "_duplicate_timestamp", dup);
    rep.add(tag + "_out_of_window", window);
    rep.add(tag + "_out_of_bounds", bounds);
    return out;
}

}  // namespace

SubjectBundle standardize_bundle(const SubjectBundle& raw, CleaningReport* report) {
    CleaningReport local;
    CleaningReport& rep = report ? *report : local;
    const Date& start = raw.meta.intervention_start;
    const Date& end = raw.meta.intervention_end;

    SubjectBundle b;
    b.meta = raw.meta;
    b.glucose.samples =
        clean_samples(raw.glucose.samples, start, end, kGlucoseMin, kGlucoseMax, "cgm", rep);
    b.hr.samples = clean_samples(raw.hr.samples, start, end, kHrMin, kHrMax, "hr", rep);

    {
        auto daily = raw.daily;
        std::stable_sort(daily.begin(), daily.end(),
                         [](const auto& a, const auto& b) { return a.date < b.date; });
        std::set<Date> seen;
        for (const auto& d : daily) {
            if (!seen.insert(d.date).second) {
                rep.add("activity_duplicate_date");
                continue;
            }
            if (!within_window(d.date, start, end)) {
                rep.add("activity_out_of_window");
                continue;
            }
            const double mins[] = {d.sedentary_min, d.lightly_min, d.moderately_min, d.very_min,
                                   d.fat_burn_min, d.cardio_min, d.peak_min, d.below_zone1_min,
                                   d.zone1_min, d.zone2_min, d.zone3_min};
            bool ok = true;
            for (double m : mins) ok = ok && in_range(m, 0, 1440);
            ok = ok && in_range(d.steps, 0, std::numeric_limits<double>::infinity());
            ok = ok && in_range(d.calories, 0, std::numeric_limits<double>::infinity());
            // The four activity levels partition the day; allow 1 min rounding slack.
            double level_sum = 0;
            bool any_level = false;
            for (double m : {d.sedentary_min, d.lightly_min, d.moderately_min, d.very_min}) {
                if (!is_missing(m)) {
                    level_sum += m;
                    any_level = true;
                }
            }
            if (any_level && level_sum > 1441.0) ok = false;
            if (!ok) {
                rep.add("activity_invariant");
                continue;
            }
            b.daily.push_back(d);
        }
    }

    {
        auto sleeps = raw.sleeps;
        std::stable_sort(sleeps.begin(), sleeps.end(), [](const auto& a, const auto& c) {
            return a.start.epoch_sec < c.start.epoch_sec;
        });
        for (const auto& e : sleeps) {
            bool ok = e.end.epoch_sec > e.start.epoch_sec;
            if (ok && !within_window(e.wake_date(), start, end)) {
                rep.add("sleep_out_of_window");
                continue;
            }
            double stage_sum = 0;
            for (double m : {e.asleep_min, e.awake_min}) {
                if (!is_missing(m)) stage_sum += m;
            }
            ok = ok && (stage_sum <= e.time_in_bed_min() + 1.0);
            for (double m : {e.asleep_min, e.awake_min, e.deep_min, e.light_min, e.rem_min}) {
                ok = ok && in_range(m, 0, 100000);
            }
            ok = ok && in_range(e.efficiency, 0, 100);
            for (double sc :
                 {e.score_overall, e.score_composition, e.score_revitalization, e.score_duration}) {
                ok = ok && in_range(sc, 0, 100);
            }
            ok = ok && in_range(e.restlessness, 0, 1);
            if (!ok) {
                rep.add("sleep_invariant");
                continue;
            }
            b.sleeps.push_back(e);
        }
    }

    {
        auto stress = raw.stress;
        std::stable_sort(stress.begin(), stress.end(),
                         [](const auto& a, const auto& b) { return a.date < b.date; });
        std::set<Date> seen;
        for (const auto& s : stress) {
            if (!seen.insert(s.date).second) {
                rep.add("stress_duplicate_date");
                continue;
            }
            if (!within_window(s.date, start, end)) {
                rep.add("stress_out_of_window");
                continue;
            }
            bool ok = true;
            for (double p :
                 {s.stress_score, s.sleep_points, s.responsiveness_points, s.exertion_points}) {
                ok = ok && in_range(p, 0, 100);
            }
            if (!ok) {
                rep.add("stress_invariant");
                continue;
            }
            b.stress.push_back(s);
        }
    }

    {
        auto ex = raw.exercises;
        std::stable_sort(ex.begin(), ex.end(), [](const auto& a, const auto& b) {
            return a.start.epoch_sec < b.start.epoch_sec;
        });
        for (const auto& s : ex) {
            if (!(s.duration_min > 0) || !in_range(s.avg_hr, kHrMin, kHrMax)) {
                rep.add("exercise_invariant");
                continue;
            }
            if (!within_window(s.start.local_date(), start, end)) {
                rep.add("exercise_out_of_window");
                continue;
            }
            b.exercises.push_back(s);
        }
    }

    {
        auto eda = raw.eda;
        std::stable_sort(eda.begin(), eda.end(), [](const auto& a, const auto& b) {
            return a.start.epoch_sec < b.start.epoch_sec;
        });
        for (const auto& s : eda) {
            const bool scl_ok =
                !s.scl_samples.empty() &&
                std::all_of(s.scl_samples.begin(), s.scl_samples.end(),
                            [](double v) { return v >= 0; });
            if (!scl_ok) {
                rep.add("eda_invariant");
                continue;
            }
            if (!within_window(s.start.local_date(), start, end)) {
                rep.add("eda_out_of_window");
                continue;
            }
            b.eda.push_back(s);
        }
    }

    {
        auto ecg = raw.ecg;
        std::stable_sort(ecg.begin(), ecg.end(), [](const auto& a, const auto& b) {
            return a.start.epoch_sec < b.start.epoch_sec;
        });
        for (const auto& s : ecg) {
            bool ok = s.waveform.size() >= 2;
            if (ok) {
                const double dt = s.waveform[1].first - s.waveform[0].first;
                ok = dt > 0;
                for (size_t i = 2; ok && i < s.waveform.size(); ++i) {
                    ok = std::fabs((s.waveform[i].first - s.waveform[i - 1].first) - dt) <= 1e-9;
                }
            }
            if (!ok) {
                rep.add("ecg_invariant");
                continue;
            }
            if (!within_window(s.start.local_date(), start, end)) {
                rep.add("ecg_out_of_window");
                continue;
            }
            b.ecg.push_back(s);
        }
    }

    return b;
}

Label label_subject(const SubjectMeta& meta) {
    if (!(meta.initial_weight_kg > 0) || !(meta.final_weight_kg > 0)) {
        throw DomainError("label_subject: weights must be positive");
    }
    const double loss = (meta.initial_weight_kg - meta.final_weight_kg) / meta.initial_weight_kg;
    return loss >= 0.02 ? Label::lost_ge_2pct : Label::lost_lt_2pct;
}

namespace {

void write_samples_csv(const std::string& path, const std::vector<Sample>& xs) {
    std::ostringstream out;
    out << "timestamp,value\n";
    for (const auto& s : xs) out << format_timestamp(s.time) << ',' << fmt_double(s.value) << '\n';
    write_text_file(path, out.str());
}

}  // namespace

void write_subject_dir(const std::string& cohort_dir, const SubjectBundle& b) {
    const std::string dir = cohort_dir + "/" + b.meta.subject_id;
    fs::create_directories(dir + "/eda");
    fs::create_directories(dir + "/ecg");

    write_samples_csv(dir + "/cgm.csv", b.glucose.samples);
    write_samples_csv(dir + "/hr.csv", b.hr.samples);

    {
        std::ostringstream out;
        out << "date,calories,steps,distance_km,sedentary_min,lightly_min,moderately_min,very_min,"
               "fat_burn_min,cardio_min,peak_min,below_zone1_min,zone1_min,zone2_min,zone3_min,"
               "vo2max,resting_hr\n";
        for (const auto& d : b.daily) {
            out << format_date(d.date) << ',' << opt_cell(d.calories) << ',' << opt_cell(d.steps)
                << ',' << opt_cell(d.distance_km) << ',' << opt_cell(d.sedentary_min) << ','
                << opt_cell(d.lightly_min) << ',' << opt_cell(d.moderately_min) << ','
                << opt_cell(d.very_min) << ',' << opt_cell(d.fat_burn_min) << ','
                << opt_cell(d.cardio_min) << ',' << opt_cell(d.peak_min) << ','
                << opt_cell(d.below_zone1_min) << ',' << opt_cell(d.zone1_min) << ','
                << opt_cell(d.zone2_min) << ',' << opt_cell(d.zone3_min) << ','
                << opt_cell(d.demographic_vo2max) << ',' << opt_cell(d.resting_hr) << '\n';
        }
        write_text_file(dir + "/activity.csv", out.str());
    }

    {
        std::ostringstream out;
        for (size_t i = 0; i < kSleepHeader.size(); ++i) {
            out << (i ? "," : "") << kSleepHeader[i];
        }
        out << '\n';
        for (const auto& e : b.sleeps) {
            const double fields[] = {e.asleep_min, e.awake_min, e.deep_min, e.light_min,
                                     e.rem_min, e.efficiency, e.awakenings, e.spo2_avg,
                                     e.spo2_lower, e.spo2_upper, e.nightly_temp_delta,
                                     e.br_full.mean, e.br_full.std_dev, e.br_full.signal_to_noise,
                                     e.br_deep.mean, e.br_deep.std_dev, e.br_deep.signal_to_noise,
                                     e.br_light.mean, e.br_light.std_dev,
                                     e.br_light.signal_to_noise, e.br_rem.mean, e.br_rem.std_dev,
                                     e.br_rem.signal_to_noise, e.restlessness, e.score_overall,
                                     e.score_composition, e.score_revitalization, e.score_duration,
                                     e.nightly_rmssd, e.nonrem_hr};
            out << format_timestamp(e.start) << ',' << format_timestamp(e.end);
            for (double f : fields) out << ',' << opt_cell(f);
            out << '\n';
        }
        write_text_file(dir + "/sleep.csv", out.str());
    }

    {
        std::ostringstream out;
        out << "date,stress_score,sleep_points,responsiveness_points,exertion_points\n";
        for (const auto& s : b.stress) {
            out << format_date(s.date) << ',' << opt_cell(s.stress_score) << ','
                << opt_cell(s.sleep_points) << ',' << opt_cell(s.responsiveness_points) << ','
                << opt_cell(s.exertion_points) << '\n';
        }
        write_text_file(dir + "/stress.csv", out.str());
    }

    {
        std::ostringstream out;
        out << "start,duration_min,avg_hr\n";
        for (const auto& s : b.exercises) {
            out << format_timestamp(s.start) << ',' << fmt_double(s.duration_min) << ','
                << opt_cell(s.avg_hr) << '\n';
        }
        write_text_file(dir + "/exercise.csv", out.str());
    }

    {
        std::ostringstream out;
        out << "session_id,start,hr_begin,hr_end,hrv_baseline_ms\n";
        for (const auto& s : b.eda) {
            out << s.session_id << ',' << format_timestamp(s.start) << ',' << opt_cell(s.hr_begin)
                << ',' << opt_cell(s.hr_end) << ',' << opt_cell(s.hrv_baseline_ms) << '\n';
            std::ostringstream samples;
            samples << "scl_us\n";
            for (double v : s.scl_samples) samples << fmt_double(v) << '\n';
            write_text_file(dir + "/eda/" + s.session_id + ".csv", samples.str());
        }
        write_text_file(dir + "/eda_sessions.csv", out.str());
    }

    {
        std::ostringstream out;
        out << "session_id,start,session_hr\n";
        for (const auto& s : b.ecg) {
            out << s.session_id << ',' << format_timestamp(s.start) << ','
                << opt_cell(s.session_hr) << '\n';
            std::ostringstream samples;
            samples << "t_sec,mv\n";
            for (const auto& [t, mv] : s.waveform) {
                samples << fmt_double(t) << ',' << fmt_double(mv) << '\n';
            }
            write_text_file(dir + "/ecg/" + s.session_id + ".csv", samples.str());
        }
        write_text_file(dir + "/ecg_sessions.csv", out.str());
    }
}

void write_cohort_dir(const std::string& cohort_dir, const std::vector<SubjectBundle>& bundles) {
    fs::create_directories(cohort_dir);
    std::ostringstream manifest;
    manifest << "subject_id,age,sex,height_cm,initial_weight_kg,final_weight_kg,start_date,"
                "end_date\n";
    for (const auto& b : bundles) {
        const auto& m = b.meta;
        manifest << m.subject_id << ',' << m.age << ',' << to_string(m.sex) << ','
                 << fmt_double(m.height_cm) << ',' << fmt_double(m.initial_weight_kg) << ','
                 << fmt_double(m.final_weight_kg) << ',' << format_date(m.intervention_start)
                 << ',' << format_date(m.intervention_end) << '\n';
    }
    write_text_file(cohort_dir + "/subjects.csv", manifest.str());
    for (const auto& b : bundles) write_subject_dir(cohort_dir, b);
}

}  // namespace wearlab::ingest
