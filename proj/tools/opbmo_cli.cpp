// Command-line front end: symbol I/O, norm reports, the identity suite,
// sweeps, sign averaging, and the dimensional-growth experiment.
//
// Exit codes: 0 success, 1 failed assert or numeric error, 2 usage or config
// error, 3 I/O error.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "opbmo/averaging.hpp"
#include "opbmo/errors.hpp"
#include "opbmo/growth.hpp"
#include "opbmo/io.hpp"
#include "opbmo/norms.hpp"
#include "opbmo/verify.hpp"

namespace {

using nlohmann::ordered_json;

ordered_json vec_json(const opbmo::Vec& v) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        rows.push_back({v(i).real(), v(i).imag()});
    return rows;
}

ordered_json witness_json(const opbmo::Witness& w) {
    ordered_json out;
    if (w.interval) {
        out["interval"]["level"] = w.interval->level;
        out["interval"]["pos"] = w.interval->pos;
    }
    if (w.e) out["e"] = vec_json(*w.e);
    if (w.f) out["f"] = vec_json(*w.f);
    return out;
}

int cmd_norms(const std::string& path) {
    opbmo::HaarSymbol B = opbmo::read_symbol_json(path);
    ordered_json doc;
    for (const opbmo::NormReport& r : opbmo::all_norms(B)) {
        ordered_json entry;
        entry["value"] = r.value;
        entry["exact"] = r.exact;
        entry["witness"] = witness_json(r.witness);
        doc[r.kind] = std::move(entry);
    }
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_verify(const opbmo::VerifyOptions& opt) {
    opbmo::VerifyReport rep = opbmo::run_verify(opt);
    std::cout << opbmo::verify_report_json(rep);
    return rep.all_pass ? 0 : 1;
}

int cmd_sweep(const std::string& path, int iterations, const std::string& output) {
    opbmo::HaarSymbol B = opbmo::read_symbol_json(path);
    opbmo::SweepResult S = opbmo::iterated_sweep(B, iterations);
    if (output.empty())
        std::cout << opbmo::symbol_to_json(S.haar);
    else
        opbmo::write_symbol_json(output, S.haar);
    return 0;
}

struct AverageFlags {
    std::string path;
    std::string mode = "exact";
    std::string kind = "norm";
    std::string check;
    int samples = 10000;
    std::uint64_t seed = 0;
};

int cmd_average(const AverageFlags& flags) {
    opbmo::HaarSymbol B = opbmo::read_symbol_json(flags.path);
    const opbmo::AverageMode mode = flags.mode == "exact" ? opbmo::AverageMode::exact
                                                          : opbmo::AverageMode::monte_carlo;
    const opbmo::AveragedKind kind = flags.kind == "norm" ? opbmo::AveragedKind::bmo_norm
                                                          : opbmo::AveragedKind::bmo_mult;
    const bool exact = mode == opbmo::AverageMode::exact;

    ordered_json doc;
    ordered_json asserts = ordered_json::array();
    auto push_assert = [&](const std::string& name, double residual, double tolerance) {
        ordered_json a;
        a["name"] = name;
        a["residual"] = residual;
        a["tolerance"] = tolerance;
        a["pass"] = std::isfinite(residual) && residual <= tolerance;
        asserts.push_back(std::move(a));
    };

    double estimate = 0.0;
    double stderr_est = 0.0;
    if (flags.check.empty()) {
        opbmo::AverageEstimate est =
            opbmo::averaged_norm_sq(B, kind, mode, flags.seed, flags.samples);
        estimate = est.value;
        stderr_est = est.stderr_est;
    } else if (flags.check == "sweep") {
        std::vector<double> cell_stderr;
        opbmo::StepSymbol avg =
            opbmo::sweep_from_average(B, mode, flags.seed, flags.samples, &cell_stderr);
        opbmo::StepSymbol direct = opbmo::sweep(B).step;
        double dev = 0.0;
        double scale = 0.0;
        double band = 0.0;
        for (std::size_t c = 0; c < direct.cells.size(); ++c) {
            dev = std::max(dev, (direct.cells[c] - avg.cells[c]).norm());
            scale = std::max(scale, direct.cells[c].norm());
            band = std::max(band, 4.0 * cell_stderr[c]);
        }
        estimate = opbmo::l2_energy(avg);
        stderr_est = band / 4.0;
        if (exact)
            push_assert("average_sweep_exact", dev / (1.0 + scale), 1e-12);
        else
            push_assert("average_sweep_mc_bracket", dev, band + 1e-12 * (1.0 + scale));
    } else if (flags.check == "pythagoras") {
        opbmo::Vec f(static_cast<Eigen::Index>(B.cols()) * B.cfg.cells());
        opbmo::GaussianStream g(
            opbmo::derive_seed(flags.seed, opbmo::stream_tag::test_fn));
        for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = g.complex_normal();
        f.head(B.cols()).setZero();
        f.normalize();
        opbmo::PythagorasReport pr = opbmo::pythagoras_check(B, f);
        estimate = pr.mult_residual;
        push_assert("pythagoras_mult", std::abs(pr.mult_residual), 1e-10);
        push_assert("pythagoras_lambda", std::abs(pr.lambda_residual), 1e-10);
        push_assert("cross_pi_gamma", std::abs(pr.cross_pi_gamma), 1e-10);
        push_assert("cross_gamma_delta", std::abs(pr.cross_gamma_delta), 1e-10);
        push_assert("cross_pi_delta", std::abs(pr.cross_pi_delta), 1e-10);
    } else if (flags.check == "avchar") {
        opbmo::AvcharReport ac = opbmo::avchar_report(B, mode, flags.seed, flags.samples);
        estimate = ac.average;
        const double slack = exact ? 1e-9 : 0.05;
        const double lo = std::max(0.0, (ac.lower - ac.average) / (1.0 + ac.average));
        const double hi = std::max(0.0, (ac.average - ac.upper) / (1.0 + ac.average));
        push_assert("average_character_bracket", std::max(lo, hi), slack);
    } else if (flags.check == "phinorm") {
        const double phi = opbmo::phi_norm(B);
        estimate = phi;
        push_assert("phi_route_agreement", std::abs(phi - opbmo::sbmo(B).value), 1e-8);
    } else {
        throw std::invalid_argument("average: unknown check: " + flags.check);
    }

    doc["estimate"] = estimate;
    doc["stderr"] = stderr_est;
    doc["mode"] = exact ? "exact" : "mc";
    doc["samples"] = exact ? 0 : flags.samples;
    doc["asserts"] = asserts;
    std::cout << doc.dump(2) << "\n";
    for (const auto& a : doc["asserts"])
        if (!a["pass"].get<bool>()) return 1;
    return 0;
}

int cmd_growth(const opbmo::ExperimentConfig& cfg) {
    opbmo::GrowthArtifact art = opbmo::run_growth(cfg);
    if (cfg.output.empty()) std::cout << art.rendered;
    for (const std::string& note : art.notes) std::cerr << note << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dyadic operator-valued BMO toolkit"};
    app.require_subcommand(1);

    std::string norms_path;
    CLI::App* norms = app.add_subcommand("norms", "Report all norms of a symbol file");
    norms->add_option("file", norms_path, "symbol JSON file")->required();

    opbmo::VerifyOptions vopt;
    CLI::App* verify = app.add_subcommand("verify", "Run the ensemble identity suite");
    verify->add_option("--dim", vopt.dims, "matrix dimensions (repeatable)");
    verify->add_option("--depth", vopt.depths, "tree depths (repeatable)");
    verify->add_option("--seeds", vopt.seeds, "seeds per (dim, depth)");
    verify->add_option("--tolerance", vopt.tolerance_scale,
                       "scale factor applied to every default tolerance");

    std::string sweep_path, sweep_output;
    int sweep_iterations = 1;
    CLI::App* sweep = app.add_subcommand("sweep", "Compute the (iterated) sweep of a symbol");
    sweep->add_option("file", sweep_path, "symbol JSON file")->required();
    sweep->add_option("--iterations", sweep_iterations, "number of sweep iterations");
    sweep->add_option("--output", sweep_output, "write the swept symbol here (default stdout)");

    AverageFlags aflags;
    CLI::App* average = app.add_subcommand("average", "Sign-pattern averages and checks");
    average->add_option("file", aflags.path, "symbol JSON file")->required();
    average->add_option("--mode", aflags.mode, "exact | mc")
        ->check(CLI::IsMember({"exact", "mc"}));
    average->add_option("--samples", aflags.samples, "Monte Carlo sample count");
    average->add_option("--seed", aflags.seed, "Monte Carlo seed");
    average->add_option("--kind", aflags.kind, "norm | mult (averaged squared norm)")
        ->check(CLI::IsMember({"norm", "mult"}));
    average->add_option("--check", aflags.check, "sweep | pythagoras | avchar | phinorm")
        ->check(CLI::IsMember({"sweep", "pythagoras", "avchar", "phinorm"}));

    opbmo::ExperimentConfig gcfg;
    std::string ensemble = "gaussian";
    CLI::App* growth = app.add_subcommand("growth", "Dimensional-growth experiment");
    growth->add_option("--dims", gcfg.dims, "matrix dimensions (repeatable)");
    growth->add_option("--depth", gcfg.depth, "tree depth");
    growth->add_option("--seeds", gcfg.seeds, "seeds per dimension");
    growth->add_option("--ensemble", ensemble, "gaussian | column_embed")
        ->check(CLI::IsMember({"gaussian", "column_embed"}));
    growth->add_option("--norms", gcfg.norms, "norm columns to compute (default all)");
    growth->add_option("--output", gcfg.output, "write the artifact here (default stdout)");
    growth->add_option("--format", gcfg.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*norms) return cmd_norms(norms_path);
        if (*verify) return cmd_verify(vopt);
        if (*sweep) return cmd_sweep(sweep_path, sweep_iterations, sweep_output);
        if (*average) return cmd_average(aflags);
        if (*growth) {
            gcfg.ensemble = ensemble == "gaussian" ? opbmo::Ensemble::gaussian
                                                   : opbmo::Ensemble::column_embed;
            return cmd_growth(gcfg);
        }
    } catch (const opbmo::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
