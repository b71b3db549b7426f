#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "opbmo/growth.hpp"

using namespace opbmo;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.dims = {1, 2};
    cfg.depth = 2;
    cfg.seeds = 3;
    return cfg;
}

constexpr const char* kHeader =
    "n,d,seed,bmo_so,bmo_para,bmo_mult,bmo_norm,sbmo,wbmo_lower,sweep_so,"
    "ratio_para_over_so,ratio_sweep_over_so_sq,mainteo_ratio";

}  // namespace

TEST_CASE("config validation") {
    ExperimentConfig cfg = small_config();
    cfg.dims.clear();
    CHECK_THROWS_AS(growth_records(cfg), std::invalid_argument);

    cfg = small_config();
    cfg.dims = {0};
    CHECK_THROWS_AS(growth_records(cfg), std::invalid_argument);

    cfg = small_config();
    cfg.depth = 0;
    CHECK_THROWS_AS(growth_records(cfg), std::invalid_argument);

    cfg = small_config();
    cfg.seeds = 0;
    CHECK_THROWS_AS(growth_records(cfg), std::invalid_argument);

    cfg = small_config();
    cfg.format = "xml";
    CHECK_THROWS_AS(run_growth(cfg), std::invalid_argument);

    cfg = small_config();
    cfg.norms = {"no_such_norm"};
    CHECK_THROWS_AS(growth_records(cfg), std::invalid_argument);
}

TEST_CASE("records cover the grid deterministically") {
    const ExperimentConfig cfg = small_config();
    const auto a = growth_records(cfg);
    const auto b = growth_records(cfg);
    REQUIRE(a.size() == 6);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].n == b[k].n);
        CHECK(a[k].seed == b[k].seed);
        REQUIRE(a[k].sbmo.has_value());
        CHECK(*a[k].sbmo == *b[k].sbmo);
        CHECK(a[k].d == cfg.depth);
    }
    CHECK(a[0].n == 1);
    CHECK(a[3].n == 2);
}

TEST_CASE("norm subsets restrict the computed columns") {
    ExperimentConfig cfg = small_config();
    cfg.norms = {"sbmo"};
    const auto recs = growth_records(cfg);
    for (const auto& r : recs) {
        CHECK(r.sbmo.has_value());
        CHECK_FALSE(r.bmo_so.has_value());
        CHECK_FALSE(r.bmo_para.has_value());
        CHECK_FALSE(r.wbmo_lower.has_value());
        CHECK_FALSE(r.ratio_para_over_so.has_value());
        CHECK_FALSE(r.mainteo_ratio.has_value());
    }
}

TEST_CASE("full records populate the ratio columns") {
    const auto recs = growth_records(small_config());
    for (const auto& r : recs) {
        CHECK(r.bmo_so.has_value());
        CHECK(r.ratio_para_over_so.has_value());
        CHECK(r.ratio_sweep_over_so_sq.has_value());
        CHECK(r.mainteo_ratio.has_value());
        CHECK(*r.mainteo_ratio > 0.0);
    }
}

TEST_CASE("summaries take max and mean per dimension") {
    const auto recs = growth_records(small_config());
    const auto sums = growth_summaries(recs);
    REQUIRE(sums.size() == 4);
    CHECK(sums[0].n == 1);
    CHECK(sums[0].stat == "max");
    CHECK(sums[1].n == 1);
    CHECK(sums[1].stat == "mean");
    CHECK(sums[2].n == 2);

    double mx = 0.0, mean = 0.0;
    for (int k = 0; k < 3; ++k) {
        mx = std::max(mx, *recs[k].sbmo);
        mean += *recs[k].sbmo / 3.0;
    }
    CHECK(*sums[0].values.sbmo == doctest::Approx(mx).epsilon(1e-15));
    CHECK(*sums[1].values.sbmo == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("csv rendering carries the exact header and summary rows") {
    const auto recs = growth_records(small_config());
    const std::string csv = render_growth_csv(recs, growth_summaries(recs));

    std::istringstream lines(csv);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == kHeader);

    int rows = 0, summary_rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        if (line.find(",max,") != std::string::npos ||
            line.find(",mean,") != std::string::npos)
            ++summary_rows;
    }
    CHECK(rows == 6 + 4);
    CHECK(summary_rows == 4);
}

TEST_CASE("json rendering parses back with the full record set") {
    ExperimentConfig cfg = small_config();
    cfg.format = "json";
    const auto recs = growth_records(cfg);
    const std::string text = render_growth_json(cfg, recs, growth_summaries(recs));
    const auto doc = nlohmann::json::parse(text);
    CHECK(doc["config"]["depth"] == 2);
    REQUIRE(doc["records"].is_array());
    CHECK(doc["records"].size() == 6);
    CHECK(doc["records"][0]["n"] == 1);
    CHECK(doc["records"][0]["sbmo"].is_number());
    CHECK(doc["summary"].size() == 4);
}

TEST_CASE("experiment runs render byte-identically") {
    ExperimentConfig cfg = small_config();
    const GrowthArtifact a = run_growth(cfg);
    const GrowthArtifact b = run_growth(cfg);
    CHECK(a.rendered == b.rendered);
    CHECK_FALSE(a.rendered.empty());

    cfg.output = "growth_test_out.csv";
    run_growth(cfg);
    std::ifstream in(cfg.output, std::ios::binary);
    REQUIRE(in.good());
    std::string file_text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    CHECK(file_text == a.rendered);
    std::remove(cfg.output.c_str());
}
