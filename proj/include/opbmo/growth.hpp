#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opbmo/symbol.hpp"

namespace opbmo {

enum class Ensemble { gaussian, column_embed };

/// Configuration for the dimensional-growth experiment: one record per
/// (n, seed) pair at fixed depth, norms optionally restricted to a subset of
/// the norm columns, output rendered as CSV or JSON.
struct ExperimentConfig {
    std::vector<int> dims{1, 2, 4, 8, 16};
    int depth = 3;
    int seeds = 50;
    Ensemble ensemble = Ensemble::gaussian;
    std::vector<std::string> norms;  // empty = all norm columns
    std::string output;              // empty = caller prints the rendering
    std::string format = "csv";      // csv | json
};

/// One experiment row. Ratio columns stay empty when an input is missing or
/// the denominator vanishes.
struct GrowthRecord {
    int n = 0;
    int d = 0;
    std::uint64_t seed = 0;
    std::optional<double> bmo_so;
    std::optional<double> bmo_para;
    std::optional<double> bmo_mult;
    std::optional<double> bmo_norm;
    std::optional<double> sbmo;
    std::optional<double> wbmo_lower;
    std::optional<double> sweep_so;
    std::optional<double> ratio_para_over_so;
    std::optional<double> ratio_sweep_over_so_sq;
    std::optional<double> mainteo_ratio;
};

/// Max or mean of each numeric column over one n's records.
struct GrowthSummary {
    int n = 0;
    int d = 0;
    std::string stat;  // "max" | "mean"
    GrowthRecord values;
};

struct GrowthArtifact {
    std::vector<GrowthRecord> records;
    std::vector<GrowthSummary> summaries;
    std::string rendered;
    std::vector<std::string> notes;  // logged trend observations, not asserted
};

/// Computes all records in deterministic (n, seed) order; parallel over
/// records, capped by OPBMO_THREADS.
std::vector<GrowthRecord> growth_records(const ExperimentConfig& cfg);

std::vector<GrowthSummary> growth_summaries(const std::vector<GrowthRecord>& records);

/// CSV with a header matching the record field names exactly, one row per
/// record, then max and mean summary rows per n (seed column "max"/"mean").
std::string render_growth_csv(const std::vector<GrowthRecord>& records,
                              const std::vector<GrowthSummary>& summaries);

std::string render_growth_json(const ExperimentConfig& cfg,
                               const std::vector<GrowthRecord>& records,
                               const std::vector<GrowthSummary>& summaries);

/// Runs the experiment and, when cfg.output is nonempty, writes the rendering
/// there. Reruns with identical config produce byte-identical renderings.
GrowthArtifact run_growth(const ExperimentConfig& cfg);

}  // namespace opbmo
