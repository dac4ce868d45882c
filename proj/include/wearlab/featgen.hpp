#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "wearlab/ingest.hpp"

namespace wearlab::featgen {

inline constexpr int kFeatureCount = 284;

enum class DatasetId { ds4, ds6, ds7, ds8, ds9 };
enum class Daypart { all_day, morning, afternoon, evening, night };

const char* to_string(DatasetId d);
const char* to_string(Daypart p);

// Fixed dataset blocks: DS4 = 1-65, DS6 = 66-123, DS7 = 124-167,
// DS8 = 168-264, DS9 = 265-284.
DatasetId dataset_of(int feature_id);
std::pair<int, int> dataset_block(DatasetId d);  // inclusive id range

struct RegistryEntry {
    int id = 0;  // 1..284
    std::string name;
    DatasetId dataset = DatasetId::ds4;
    std::optional<Daypart> daypart;
};

class FeatureRegistry {
public:
    static const FeatureRegistry& instance();

    const std::vector<RegistryEntry>& entries() const { return entries_; }
    const RegistryEntry& entry(int feature_id) const { return entries_.at(feature_id - 1); }
    // Exact-name lookup; returns 0 when the name is unknown.
    int id_of(const std::string& name) const;

private:
    FeatureRegistry();
    std::vector<RegistryEntry> entries_;
};

struct FeatureVector {
    std::string subject_id;
    std::array<double, kFeatureCount> values{};  // kMissing where absent

    bool missing(int feature_id) const { return is_missing(values[feature_id - 1]); }
};

struct CohortMatrix {
    std::vector<FeatureVector> rows;
    std::vector<ingest::Label> labels;  // parallel to rows

    size_t n_subjects() const { return rows.size(); }
    double value(size_t row, int feature_id) const { return rows[row].values[feature_id - 1]; }
};

// --- Scalar building blocks.

struct DescriptiveStats {
    double mean = kMissing;
    double std_dev = kMissing;  // population (1/n)
    double variance = kMissing;
    double max = kMissing;
    double min = kMissing;
    double range = kMissing;
};

DescriptiveStats descriptive_stats(const std::vector<double>& xs);

// Five sub-series by local clock time: all day plus morning [06,12),
// afternoon [12,18), evening [18,24), night [00,06).
std::array<std::vector<double>, 5> partition_by_daypart(const std::vector<ingest::Sample>& xs);

struct GlucoseBands {
    double very_low = kMissing;  // < 54 mg/dL
    double low = kMissing;       // [54, 70)
    double target = kMissing;    // [70, 180]
    double high = kMissing;      // (180, 250]
    double very_high = kMissing; // > 250
};

GlucoseBands glucose_band_fractions(const std::vector<double>& readings);

double estimated_hba1c(double mean_glucose);           // percent
double glucose_cv(const std::vector<double>& readings); // percent, population std / mean
double rmssd(const std::vector<double>& intervals_ms); // ms

// --- Per-dataset extractors (inputs must be standardized bundles).

std::vector<double> extract_ds4(const ingest::SubjectBundle& b);  // 65 values
std::vector<double> extract_ds6(const ingest::SubjectBundle& b);  // 58 values
std::vector<double> extract_ds7(const ingest::SubjectBundle& b);  // 44 values
std::vector<double> extract_ds8(const ingest::SubjectBundle& b);  // 97 values
std::vector<double> extract_ds9(const ingest::SubjectBundle& b);  // 20 values

FeatureVector extract_all(const ingest::SubjectBundle& b);

CohortMatrix extract_cohort(const std::vector<ingest::SubjectBundle>& bundles);

// --- features.csv / registry.json round trip.
void write_features_csv(const std::string& path, const CohortMatrix& m);
CohortMatrix read_features_csv(const std::string& path);
void write_registry_json(const std::string& path);

}  // namespace wearlab::featgen
