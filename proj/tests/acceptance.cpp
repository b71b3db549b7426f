// Scenario gates for the finite-resolution toolkit: twelve checks, one
// pass/fail line each. Usage: opbmo_acceptance <path-to-cli>.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "opbmo/averaging.hpp"
#include "opbmo/verify.hpp"

using namespace opbmo;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
    std::printf("[%2d] %-32s %s  %s\n", idx, name, pass ? "PASS" : "FAIL", detail.c_str());
    if (!pass) ++g_failures;
}

void run(int idx, const char* name, const std::function<std::pair<bool, std::string>()>& fn) {
    try {
        const auto [pass, detail] = fn();
        report(idx, name, pass, detail);
    } catch (const std::exception& e) {
        report(idx, name, false, std::string("exception: ") + e.what());
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* spec, ...) {
    char buf[512];
    va_list args;
    va_start(args, spec);
    std::vsnprintf(buf, sizeof buf, spec, args);
    va_end(args);
    return buf;
}

const std::vector<int> kDims{1, 2, 4};
const std::vector<int> kDepths{2, 3};

/// Haar-unitary coefficient conjugation for the invariance gate.
Mat random_unitary(int n, std::uint64_t seed) {
    GaussianStream g(derive_seed(seed, stream_tag::witness));
    Mat M(n, n);
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) M(r, c) = g.complex_normal();
    return Eigen::HouseholderQR<Mat>(M).householderQ();
}

Vec unit_test_vector(const TreeConfig& cfg, std::uint64_t seed) {
    GaussianStream g(derive_seed(seed, stream_tag::test_fn));
    Vec f(cfg.dim * cfg.cells());
    for (Eigen::Index k = 0; k < f.size(); ++k) f(k) = g.complex_normal();
    f.head(cfg.dim).setZero();
    return f.normalized();
}

// Shared between gates 1 and 2: one large ensemble run of the exact operator
// identities.
VerifyReport g_suite;
double g_suite_seconds = 0.0;

std::pair<bool, std::string> gate_core_identities() {
    VerifyOptions opt;
    opt.dims = kDims;
    opt.depths = {2, 3, 4};
    opt.seeds = 100;
    opt.with_norm_checks = false;
    opt.with_average_checks = false;

    const auto t0 = std::chrono::steady_clock::now();
    g_suite = run_verify(opt);
    g_suite_seconds = seconds_since(t0);

    const char* core[] = {"lambda_split",
                          "delta_adjoint_pairing",
                          "lambda_adjoint_symmetry",
                          "multiplication_split_meanzero",
                          "sweep_identity_meanzero",
                          "product_identity_meanzero"};
    double worst = 0.0;
    int found = 0;
    bool all_pass = g_suite.all_pass;
    for (const IdentityResult& r : g_suite.identities) {
        for (const char* c : core)
            if (r.name == c) {
                ++found;
                worst = std::max(worst, r.max_residual);
            }
    }
    const bool pass =
        all_pass && found == 6 && worst < 1e-9 && g_suite_seconds < 120.0;
    return {pass, fmt("%d symbols, core residual %.2e (<1e-9), suite %s, %.1fs (<120s)",
                      g_suite.symbols_checked, worst, all_pass ? "clean" : "DIRTY",
                      g_suite_seconds)};
}

std::pair<bool, std::string> gate_family_agreement() {
    double four_way = -1.0, coeff_bound = -1.0;
    for (const IdentityResult& r : g_suite.identities) {
        if (r.name == "paraproduct_family_agreement") four_way = r.max_residual;
        if (r.name == "coefficient_para_bound") coeff_bound = r.max_residual;
    }
    const bool pass = four_way >= 0.0 && four_way <= 1e-7 && coeff_bound >= 0.0 &&
                      coeff_bound <= 1e-9;
    return {pass, fmt("four-way rel dev %.2e (<=1e-7), coefficient bound excess %.2e (<=1e-9)",
                      four_way, coeff_bound)};
}

std::pair<bool, std::string> gate_averaging_norm_route() {
    double worst_phi = 0.0, worst_split = 0.0;
    for (int n : kDims)
        for (int d : kDepths)
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                const HaarSymbol B = gaussian_symbol({d, n}, seed);
                const double phi = phi_norm(B);
                worst_phi = std::max(worst_phi, std::abs(phi - sbmo(B).value));
                const double split = phi + phi_norm(adjoint_symbol(B));
                worst_split = std::max(worst_split, std::abs(split - bmo_so(B).value));
            }
    const bool pass = worst_phi < 1e-8 && worst_split < 1e-8;
    return {pass,
            fmt("|phi - sbmo| %.2e, |phi(B)+phi(B*) - so| %.2e (<1e-8)", worst_phi, worst_split)};
}

std::pair<bool, std::string> gate_sign_average_sweep() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst_exact = 0.0;
    for (int n : kDims)
        for (int d : kDepths)
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                const HaarSymbol B = gaussian_symbol({d, n}, seed);
                const StepSymbol avg = sweep_from_average(B, AverageMode::exact);
                const StepSymbol S = sweep(B).step;
                for (int c = 0; c < B.cfg.cells(); ++c) {
                    const double scale = 1.0 + S.cells[c].cwiseAbs().maxCoeff();
                    worst_exact = std::max(
                        worst_exact, (avg.cells[c] - S.cells[c]).cwiseAbs().maxCoeff() / scale);
                }
            }

    // Depth 4 exceeds the enumeration guard, so the sampled estimator covers
    // it, judged against its own per-cell error bars.
    const HaarSymbol B4 = gaussian_symbol({4, 2}, 1);
    std::vector<double> stderr_cells;
    const StepSymbol mc = sweep_from_average(B4, AverageMode::monte_carlo, 1, 4000, &stderr_cells);
    const StepSymbol S4 = sweep(B4).step;
    double worst_pull = 0.0;
    for (int c = 0; c < B4.cfg.cells(); ++c) {
        const double dev = (mc.cells[c] - S4.cells[c]).norm();
        worst_pull = std::max(worst_pull, dev / (4.0 * stderr_cells[c] + 1e-12));
    }
    const double elapsed = seconds_since(t0);
    const bool pass = worst_exact < 1e-12 && worst_pull <= 1.0 && elapsed < 60.0;
    return {pass, fmt("exact dev %.2e (<1e-12), sampled pull %.2f (<=1 of 4 sigma), %.1fs (<60s)",
                      worst_exact, worst_pull, elapsed)};
}

std::pair<bool, std::string> gate_energy_split() {
    double worst = 0.0;
    for (int n : kDims)
        for (int d : kDepths)
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                const TreeConfig cfg{d, n};
                const HaarSymbol B = gaussian_symbol(cfg, seed);
                const PythagorasReport rep = pythagoras_check(B, unit_test_vector(cfg, seed));
                for (double v : {rep.mult_residual, rep.lambda_residual, rep.cross_pi_gamma,
                                 rep.cross_gamma_delta, rep.cross_pi_delta})
                    worst = std::max(worst, std::abs(v));
            }
    return {worst < 1e-10, fmt("worst residual %.2e (<1e-10)", worst)};
}

std::pair<bool, std::string> gate_multiplier_average_bracket() {
    int bad = 0;
    double worst_low = 1e300, worst_high = 0.0;
    for (int n : kDims)
        for (int d : kDepths)
            for (std::uint64_t seed = 0; seed < 100; ++seed) {
                const HaarSymbol B = gaussian_symbol({d, n}, seed);
                const AvcharReport rep = avchar_report(B, AverageMode::exact);
                if (!rep.pass) ++bad;
                if (rep.lower > 0.0) worst_low = std::min(worst_low, rep.average / rep.lower);
                if (rep.upper > 0.0) worst_high = std::max(worst_high, rep.average / rep.upper);
            }
    return {bad == 0, fmt("600 symbols, avg/lower >= %.3f, avg/upper <= %.3f, %d violations", worst_low,
                          worst_high, bad)};
}

std::pair<bool, std::string> gate_bilinear_sweep_bounds() {
    double worst_sbmo = 0.0, worst_l1 = 0.0, worst_proj = 0.0;
    bool all_pass = true;
    for (int n : kDims)
        for (int d : kDepths)
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                const TreeConfig cfg{d, n};
                const HaarSymbol B = gaussian_symbol(cfg, seed);
                const HaarSymbol F = gaussian_symbol(cfg, derive_seed(seed, 0xACC7));
                const MaindeltaReport rep = maindelta_checks(B, F);
                all_pass = all_pass && rep.sbmo_pass && rep.l1_pass && rep.mult_pass;
                if (rep.sbmo_rhs > 0.0)
                    worst_sbmo = std::max(worst_sbmo, rep.sbmo_lhs / rep.sbmo_rhs);
                worst_l1 = std::max(worst_l1, rep.l1_max_ratio);
                for (const DyadicIndex& I :
                     {DyadicIndex{0, 0}, DyadicIndex{1, 1}, DyadicIndex{d - 1, (1 << (d - 1)) - 1}})
                    worst_proj = std::max(worst_proj, projected_sweep_check(B, F, I));
            }
    const bool pass =
        all_pass && worst_sbmo <= 1.0 + 1e-9 && worst_l1 <= 1.0 + 1e-9 && worst_proj < 1e-11;
    return {pass, fmt("unit-constant ratio %.6f, L1 ratio %.6f (<=1+1e-9), projection dev %.2e (<1e-11)",
                      worst_sbmo, worst_l1, worst_proj)};
}

std::pair<bool, std::string> gate_norm_order_invariance() {
    double worst_chain = 0.0, worst_inv = 0.0;
    for (int n : kDims)
        for (int d : kDepths)
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                const HaarSymbol B = gaussian_symbol({d, n}, seed);
                const double w = wbmo(B).value;
                const double s = sbmo(B).value;
                const double bn = bmo_norm(B).value;
                const double so = bmo_so(B).value;
                const double scale = 1.0 + s;
                worst_chain = std::max(worst_chain, (w - s) / scale);
                worst_chain = std::max(worst_chain, (s - bn) / scale);
                worst_chain = std::max(worst_chain, (s - so) / scale);

                const Mat U = random_unitary(n, seed);
                HaarSymbol C = B;
                C.mean = U.adjoint() * B.mean * U;
                for (auto& m : C.coeffs) m = U.adjoint() * m * U;
                const auto na = all_norms(B);
                const auto nb = all_norms(C);
                for (std::size_t k = 0; k < na.size(); ++k)
                    worst_inv = std::max(
                        worst_inv, std::abs(na[k].value - nb[k].value) / (1.0 + na[k].value));
            }
    const bool pass = worst_chain <= 1e-8 && worst_inv <= 1e-8;
    return {pass, fmt("chain excess %.2e, conjugation dev %.2e (<=1e-8)", worst_chain, worst_inv)};
}

std::pair<bool, std::string> gate_ratio_window() {
    const std::string path = "mainteo_distribution.csv";
    std::ofstream csv(path, std::ios::binary | std::ios::trunc);
    csv << "n,d,seed,mainteo_ratio\n";
    double lo = 1e300, hi = -1e300;
    int count = 0, outside = 0;
    for (int n : kDims)
        for (int d : kDepths)
            for (std::uint64_t seed = 0; seed < 50; ++seed) {
                const HaarSymbol B = gaussian_symbol({d, n}, seed);
                const auto r = mainteo_ratio(B);
                if (!r) continue;
                ++count;
                lo = std::min(lo, *r);
                hi = std::max(hi, *r);
                if (*r < 0.125 || *r > 8.0) ++outside;
                char row[128];
                std::snprintf(row, sizeof row, "%d,%d,%llu,%.17g\n", n, d,
                              static_cast<unsigned long long>(seed), *r);
                csv << row;
            }
    csv.close();
    const bool pass = count == 300 && outside == 0;
    return {pass, fmt("%d ratios in [%.3f, %.3f], window [1/8, 8], %d outside; %s", count, lo, hi,
                      outside, path.c_str())};
}

std::pair<bool, std::string> gate_bootstrap_constants() {
    struct Row {
        double rho_b, so, sb, rho_s, para;
    };
    std::vector<Row> rows;
    for (int n : kDims)
        for (int d : kDepths)
            for (std::uint64_t seed = 0; seed < 25; ++seed) {
                const HaarSymbol B = gaussian_symbol({d, n}, seed);
                Row r;
                r.rho_b = rho(B);
                r.so = bmo_so(B).value;
                r.sb = sbmo(B).value;
                r.rho_s = rho(sweep(B).haar);
                r.para = bmo_para(B).value;
                rows.push_back(r);
            }

    // Measured hypothesis constants: c1 bounds the so-norm by the iterated
    // root, c2 bounds the swept root by its square. The closure constant
    // C = c2 + sqrt(c2^2 + c1) then caps para/rho at 3C.
    double c1_so = 0.0, c1_sb = 0.0, c2 = 0.0;
    for (const Row& r : rows) {
        if (r.rho_b > 0.0) {
            c1_so = std::max(c1_so, r.so / r.rho_b);
            c1_sb = std::max(c1_sb, (r.sb / r.rho_b) * (r.sb / r.rho_b));
            c2 = std::max(c2, r.rho_s / (r.rho_b * r.rho_b));
        }
    }
    const double C = c2 + std::sqrt(c2 * c2 + c1_so);
    double worst_margin = 0.0;
    for (const Row& r : rows)
        if (r.rho_b > 0.0) worst_margin = std::max(worst_margin, r.para / (3.0 * C * r.rho_b));
    const bool pass = !rows.empty() && worst_margin <= 1.0 + 1e-9;
    return {pass, fmt("c1=%.3f (gram route %.3f), c2=%.3f, C=%.3f, max para/(3C rho)=%.3f (<=1)",
                      c1_so, c1_sb, c2, C, worst_margin)};
}

std::string g_cli_path;

std::pair<bool, std::string> gate_growth_replay() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string out1 = "acceptance_growth_1.csv";
    const std::string out2 = "acceptance_growth_2.csv";
    for (const std::string& out : {out1, out2}) {
        const std::string cmd = "\"" + g_cli_path + "\" growth --output " + out + " 2>> acceptance_growth_notes.txt";
        const int rc = std::system(cmd.c_str());
        if (rc != 0) return {false, fmt("cli exited with %d", rc)};
    }
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string a = slurp(out1);
    const std::string b = slurp(out2);
    const double elapsed = seconds_since(t0);
    const bool has_summaries =
        a.find(",max,") != std::string::npos && a.find(",mean,") != std::string::npos;
    const bool pass = !a.empty() && a == b && has_summaries && elapsed < 600.0;
    return {pass, fmt("two runs, %zu bytes, byte-identical %s, summary rows %s, %.1fs (<600s)",
                      a.size(), a == b ? "yes" : "NO", has_summaries ? "present" : "MISSING",
                      elapsed)};
}

std::pair<bool, std::string> gate_mutation_detection() {
    TreeConfig cfg{3, 2};
    const HaarSymbol B = gaussian_symbol(cfg, 2026);

    // Mutant 1: synthesis with the sign convention reversed. The roundtrip
    // through the honest analysis must blow up on it.
    StepSymbol flipped = zero_step(cfg, 2, 2);
    for (int c = 0; c < cfg.cells(); ++c) {
        Mat v = B.mean;
        for (const auto& I : enumerate_intervals(cfg))
            v -= haar_on_cell(cfg, I, c) * B.coeff(I);
        flipped.cells[c] = v;
    }
    const double honest1 = max_coeff_deviation(to_haar(to_step(B)), B);
    const double mutant1 = max_coeff_deviation(to_haar(flipped), B);

    // Mutant 2: sweep accumulated as B_I B_I* instead of B_I* B_I. The
    // factorization through the swept multiplier detects the reversal as soon
    // as coefficients stop commuting.
    const Mat pi = paraproduct_matrix(B).m;
    const Mat lhs = pi.adjoint() * pi;
    const Mat honest_rhs = lambda_matrix(sweep(B).haar).m + dbf_matrix(B, B).m;
    const Mat mutant_rhs =
        lambda_matrix(sweep(adjoint_symbol(B)).haar).m + dbf_matrix(B, B).m;
    OperatorMatrix diff{cfg, 2, 2, lhs - honest_rhs};
    const double honest2 = mean_zero_restrict(diff).cwiseAbs().maxCoeff();
    diff.m = lhs - mutant_rhs;
    const double mutant2 = mean_zero_restrict(diff).cwiseAbs().maxCoeff();

    // Mutant 3: diagonal part built as the adjoint of the same symbol's
    // paraproduct, dropping the symbol adjoint. Detected whenever some
    // coefficient is non-Hermitian.
    const double honest3 =
        (delta_matrix(B).m - paraproduct_matrix(adjoint_symbol(B)).m.adjoint()).cwiseAbs().maxCoeff();
    const double mutant3 =
        (delta_matrix(B).m - paraproduct_matrix(B).m.adjoint()).cwiseAbs().maxCoeff();

    const bool pass = honest1 < 1e-12 && mutant1 > 1e-3 && honest2 < 1e-10 && mutant2 > 1e-3 &&
                      honest3 < 1e-12 && mutant3 > 1e-3;
    return {pass, fmt("flipped synthesis %.1e/%.1e, reversed gram %.1e/%.1e, dropped adjoint "
                      "%.1e/%.1e (honest/mutant)",
                      honest1, mutant1, honest2, mutant2, honest3, mutant3)};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: %s <path-to-cli>\n", argv[0]);
        return 2;
    }
    g_cli_path = argv[1];

    run(1, "core operator identities", gate_core_identities);
    run(2, "multiplier family agreement", gate_family_agreement);
    run(3, "averaging norm route", gate_averaging_norm_route);
    run(4, "sign-average sweep", gate_sign_average_sweep);
    run(5, "energy split", gate_energy_split);
    run(6, "averaged multiplier bracket", gate_multiplier_average_bracket);
    run(7, "bilinear sweep bounds", gate_bilinear_sweep_bounds);
    run(8, "norm order and invariance", gate_norm_order_invariance);
    run(9, "ratio distribution window", gate_ratio_window);
    run(10, "bootstrap constants", gate_bootstrap_constants);
    run(11, "growth experiment replay", gate_growth_replay);
    run(12, "mutation detection", gate_mutation_detection);

    std::printf("%d/12 criteria passed\n", 12 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
