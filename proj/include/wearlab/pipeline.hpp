#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wearlab/evalharness.hpp"
#include "wearlab/synthcohort.hpp"

namespace wearlab::pipeline {

// Mode marker stamped into selection.json: whole-cohort selection consults
// every label, so evaluation reselects per split unless leaky mode is set.
inline constexpr const char* kWholeCohortSelectionNote =
    "whole-cohort: uses all labels; evaluation reselects per split unless leaky mode";

struct PipelineConfig {
    std::string cohort_dir;
    std::string out_dir = "out";
    evalharness::Scenario scenario = evalharness::Scenario::combined;
    std::optional<featselect::SelectionConfig> selector;  // nullopt = all features
    learners::ModelSpec model;
    std::vector<uint64_t> seeds = {0, 1, 2, 3, 4};
    bool leaky_selection = false;
    int threads = 1;
    bool verbose = false;
    bool with_stats = true;
};

PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig config_from_file(const std::string& path);
nlohmann::ordered_json config_to_json(const PipelineConfig& config);

// Parses, standardizes, and extracts a cohort directory.
featgen::CohortMatrix load_and_extract(const std::string& cohort_dir,
                                       std::vector<ingest::SubjectMeta>* metas,
                                       ingest::CleaningReport* cleaning, int threads);

void write_stats_artifacts(const std::string& out_dir, const featgen::CohortMatrix& matrix,
                           const std::vector<ingest::SubjectMeta>& metas, int threads);

// Feature ids for the group summary table (the headline per-dataset metrics).
std::vector<int> summary_feature_ids();

// ingest -> extract -> stats -> select -> evaluate, writing every artifact
// into config.out_dir. Returns the evaluation report.
evalharness::EvalReport run_pipeline(const PipelineConfig& config, std::ostream& log);

}  // namespace wearlab::pipeline
