#include "opbmo/growth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "opbmo/errors.hpp"
#include "opbmo/norms.hpp"
#include "opbmo/parallel.hpp"
#include "opbmo/sweep.hpp"

namespace opbmo {

namespace {

const std::vector<std::string>& norm_columns() {
    static const std::vector<std::string> cols = {
        "bmo_so", "bmo_para", "bmo_mult", "bmo_norm", "sbmo", "wbmo_lower", "sweep_so"};
    return cols;
}

using Field = std::optional<double> GrowthRecord::*;

const std::vector<std::pair<std::string, Field>>& value_fields() {
    static const std::vector<std::pair<std::string, Field>> fields = {
        {"bmo_so", &GrowthRecord::bmo_so},
        {"bmo_para", &GrowthRecord::bmo_para},
        {"bmo_mult", &GrowthRecord::bmo_mult},
        {"bmo_norm", &GrowthRecord::bmo_norm},
        {"sbmo", &GrowthRecord::sbmo},
        {"wbmo_lower", &GrowthRecord::wbmo_lower},
        {"sweep_so", &GrowthRecord::sweep_so},
        {"ratio_para_over_so", &GrowthRecord::ratio_para_over_so},
        {"ratio_sweep_over_so_sq", &GrowthRecord::ratio_sweep_over_so_sq},
        {"mainteo_ratio", &GrowthRecord::mainteo_ratio},
    };
    return fields;
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.dims.empty()) throw std::invalid_argument("growth: dims must be nonempty");
    for (int n : cfg.dims)
        if (n < 1) throw std::invalid_argument("growth: dims must be positive");
    if (cfg.depth < 1) throw std::invalid_argument("growth: depth must be at least 1");
    if (cfg.seeds < 1) throw std::invalid_argument("growth: seeds must be at least 1");
    if (cfg.format != "csv" && cfg.format != "json")
        throw std::invalid_argument("growth: format must be csv or json");
    const auto& known = norm_columns();
    for (const std::string& name : cfg.norms)
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw std::invalid_argument("growth: unknown norm column: " + name);
}

GrowthRecord compute_record(const TreeConfig& cfg, std::uint64_t seed, Ensemble ensemble,
                            const std::set<std::string>& wanted) {
    GrowthRecord rec;
    rec.n = cfg.dim;
    rec.d = cfg.depth;
    rec.seed = seed;

    const HaarSymbol B = ensemble == Ensemble::gaussian
                             ? gaussian_symbol(cfg, seed)
                             : column_embed(gaussian_vector_symbol(cfg, seed));
    auto want = [&](const char* name) { return wanted.count(name) > 0; };

    if (want("bmo_so")) rec.bmo_so = bmo_so(B).value;
    if (want("bmo_para")) rec.bmo_para = bmo_para(B).value;
    if (want("bmo_mult")) rec.bmo_mult = bmo_mult(B).value;
    if (want("bmo_norm")) rec.bmo_norm = bmo_norm(B).value;
    if (want("sbmo")) rec.sbmo = sbmo(B).value;
    if (want("wbmo_lower")) rec.wbmo_lower = wbmo(B).value;
    if (want("sweep_so")) rec.sweep_so = bmo_so(sweep(B).haar).value;

    if (rec.bmo_para && rec.bmo_so && *rec.bmo_so > 0.0)
        rec.ratio_para_over_so = *rec.bmo_para / *rec.bmo_so;
    if (rec.sweep_so && rec.bmo_so && *rec.bmo_so > 0.0)
        rec.ratio_sweep_over_so_sq = *rec.sweep_so / (*rec.bmo_so * *rec.bmo_so);
    if (want("sbmo") && want("bmo_para")) rec.mainteo_ratio = mainteo_ratio(B);
    return rec;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void append_values_csv(std::ostringstream& out, const GrowthRecord& rec) {
    for (const auto& [name, field] : value_fields()) {
        out << ',';
        if (rec.*field) out << format_double(*(rec.*field));
    }
    out << '\n';
}

nlohmann::ordered_json record_json(const GrowthRecord& rec) {
    nlohmann::ordered_json row;
    row["n"] = rec.n;
    row["d"] = rec.d;
    row["seed"] = rec.seed;
    for (const auto& [name, field] : value_fields()) {
        if (rec.*field)
            row[name] = *(rec.*field);
        else
            row[name] = nullptr;
    }
    return row;
}

}  // namespace

std::vector<GrowthRecord> growth_records(const ExperimentConfig& cfg) {
    validate(cfg);
    std::set<std::string> wanted(cfg.norms.begin(), cfg.norms.end());
    if (wanted.empty()) wanted.insert(norm_columns().begin(), norm_columns().end());

    struct Job {
        int n;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (int n : cfg.dims) {
        check_config(TreeConfig{cfg.depth, n});
        for (int seed = 0; seed < cfg.seeds; ++seed)
            jobs.push_back({n, static_cast<std::uint64_t>(seed)});
    }

    std::vector<GrowthRecord> records(jobs.size());
    parallel_for(static_cast<int>(jobs.size()), [&](int i) {
        const Job& job = jobs[static_cast<std::size_t>(i)];
        records[static_cast<std::size_t>(i)] =
            compute_record(TreeConfig{cfg.depth, job.n}, job.seed, cfg.ensemble, wanted);
    });
    return records;
}

std::vector<GrowthSummary> growth_summaries(const std::vector<GrowthRecord>& records) {
    std::vector<GrowthSummary> out;
    std::vector<int> dims;
    for (const GrowthRecord& r : records)
        if (std::find(dims.begin(), dims.end(), r.n) == dims.end()) dims.push_back(r.n);

    for (int n : dims) {
        GrowthSummary mx, mn;
        mx.n = mn.n = n;
        mx.stat = "max";
        mn.stat = "mean";
        for (const GrowthRecord& r : records)
            if (r.n == n) mx.d = mn.d = r.d;
        mx.values.n = mn.values.n = n;
        mx.values.d = mn.values.d = mx.d;
        for (const auto& [name, field] : value_fields()) {
            double best = 0.0;
            double sum = 0.0;
            long count = 0;
            for (const GrowthRecord& r : records) {
                if (r.n != n || !(r.*field)) continue;
                const double v = *(r.*field);
                best = count == 0 ? v : std::max(best, v);
                sum += v;
                ++count;
            }
            if (count > 0) {
                mx.values.*field = best;
                mn.values.*field = sum / static_cast<double>(count);
            }
        }
        out.push_back(std::move(mx));
        out.push_back(std::move(mn));
    }
    return out;
}

std::string render_growth_csv(const std::vector<GrowthRecord>& records,
                              const std::vector<GrowthSummary>& summaries) {
    std::ostringstream out;
    out << "n,d,seed";
    for (const auto& [name, field] : value_fields()) out << ',' << name;
    out << '\n';
    for (const GrowthRecord& rec : records) {
        out << rec.n << ',' << rec.d << ',' << rec.seed;
        append_values_csv(out, rec);
    }
    for (const GrowthSummary& s : summaries) {
        out << s.n << ',' << s.d << ',' << s.stat;
        append_values_csv(out, s.values);
    }
    return out.str();
}

std::string render_growth_json(const ExperimentConfig& cfg,
                               const std::vector<GrowthRecord>& records,
                               const std::vector<GrowthSummary>& summaries) {
    nlohmann::ordered_json doc;
    doc["config"]["dims"] = cfg.dims;
    doc["config"]["depth"] = cfg.depth;
    doc["config"]["seeds"] = cfg.seeds;
    doc["config"]["ensemble"] = cfg.ensemble == Ensemble::gaussian ? "gaussian" : "column_embed";
    doc["records"] = nlohmann::ordered_json::array();
    for (const GrowthRecord& rec : records) doc["records"].push_back(record_json(rec));
    doc["summary"] = nlohmann::ordered_json::array();
    for (const GrowthSummary& s : summaries) {
        nlohmann::ordered_json row = record_json(s.values);
        row.erase("seed");
        row["stat"] = s.stat;
        doc["summary"].push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
}

GrowthArtifact run_growth(const ExperimentConfig& cfg) {
    GrowthArtifact art;
    art.records = growth_records(cfg);
    art.summaries = growth_summaries(art.records);
    art.rendered = cfg.format == "csv"
                       ? render_growth_csv(art.records, art.summaries)
                       : render_growth_json(cfg, art.records, art.summaries);

    for (const GrowthSummary& s : art.summaries) {
        if (s.stat == "max" && s.n == 1 && s.values.ratio_para_over_so) {
            std::ostringstream note;
            note << "n=1: max ratio_para_over_so = " << format_double(*s.values.ratio_para_over_so)
                 << " (a dimension-free constant is expected in the scalar regime)";
            art.notes.push_back(note.str());
        }
    }
    const GrowthSummary* prev = nullptr;
    for (const GrowthSummary& s : art.summaries) {
        if (s.stat != "max" || !s.values.ratio_sweep_over_so_sq) continue;
        if (prev && *prev->values.ratio_sweep_over_so_sq > *s.values.ratio_sweep_over_so_sq) {
            std::ostringstream note;
            note << "trend: max ratio_sweep_over_so_sq fell from n=" << prev->n << " to n=" << s.n
                 << " (recorded as a warning, not an error)";
            art.notes.push_back(note.str());
        }
        prev = &s;
    }

    if (!cfg.output.empty()) {
        std::ofstream out(cfg.output, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("growth: cannot open output file: " + cfg.output);
        out << art.rendered;
        out.flush();
        if (!out) throw IoError("growth: write failed: " + cfg.output);
    }
    return art;
}

}  // namespace opbmo
