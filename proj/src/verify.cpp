#include "opbmo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "json.hpp"

#include "opbmo/norms.hpp"
#include "opbmo/operators.hpp"
#include "opbmo/parallel.hpp"
#include "opbmo/rng.hpp"

namespace opbmo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double pos(double x) { return x > 0.0 ? x : 0.0; }

// Ratio-style residual for a one-sided bound lhs <= rhs: zero when satisfied,
// the relative excess otherwise, infinite when the bound degenerates.
double excess(double lhs, double rhs) {
    if (rhs > 0.0) return pos(lhs / rhs - 1.0);
    return lhs > 0.0 ? kInf : 0.0;
}

// Every identity the suite can report, in report order, with its default
// tolerance. Residuals are scaled by the relevant input norms before being
// recorded, so the tolerances are dimensionless.
const std::vector<std::pair<const char*, double>>& identity_table() {
    static const std::vector<std::pair<const char*, double>> table = {
        {"lambda_split", 1e-10},
        {"delta_adjoint_pairing", 1e-10},
        {"lambda_adjoint_symmetry", 1e-10},
        {"multiplication_split_meanzero", 1e-10},
        {"sweep_identity_meanzero", 1e-10},
        {"product_identity_meanzero", 1e-10},
        {"sweep_mean_total", 1e-10},
        {"sweep_positivity", 1e-10},
        {"projected_sweep_agreement", 1e-10},
        {"sign_transform_isometry", 1e-12},
        {"sign_transform_para_intertwine", 1e-12},
        {"sign_transform_delta_intertwine", 1e-12},
        {"coefficient_para_bound", 1e-9},
        {"sbmo_para_lower_bound", 1e-9},
        {"defect_schwarz_bound", 1e-7},
        {"paraproduct_family_agreement", 1e-7},
        {"bilinear_sbmo_bound", 1e-9},
        {"bilinear_l1_bound", 1e-9},
        {"bilinear_mult_policy", 1e-9},
        {"multiplier_sup_bound", 1e-9},
        {"parseval_energy", 1e-11},
        {"haar_roundtrip", 1e-12},
        {"phi_route_agreement", 1e-8},
        {"so_norm_split", 1e-8},
        {"norm_chain_order", 1e-8},
        {"witness_reproduction", 1e-10},
        {"unitary_invariance", 1e-8},
        {"average_sweep_exact", 1e-12},
        {"pythagoras_meanzero", 1e-10},
        {"average_character_bracket", 1e-9},
        {"sweep_l1_chain", 1e-9},
        {"sweep_average_policy", 1e-9},
        {"sign_average_cancellation", 1e-12},
    };
    return table;
}

// Thread-safe worst-residual accumulator with a fixed report order.
class Suite {
public:
    explicit Suite(double scale) {
        for (const auto& [name, tol] : identity_table()) {
            Entry e;
            e.result.name = name;
            e.result.tolerance = tol * scale;
            index_.emplace(e.result.name, entries_.size());
            entries_.push_back(std::move(e));
        }
    }

    void note(const std::string& name, double residual) {
        std::lock_guard<std::mutex> lock(mu_);
        Entry& e = entries_.at(index_.at(name));
        if (e.count == 0 || !(residual <= e.result.max_residual))
            e.result.max_residual = residual;
        ++e.count;
    }

    void fail(const std::string& name) { note(name, kInf); }

    VerifyReport finish(int symbols) const {
        VerifyReport rep;
        rep.symbols_checked = symbols;
        rep.all_pass = true;
        for (const Entry& e : entries_) {
            if (e.count == 0) continue;
            IdentityResult r = e.result;
            r.pass = std::isfinite(r.max_residual) && r.max_residual <= r.tolerance;
            rep.all_pass = rep.all_pass && r.pass;
            rep.identities.push_back(std::move(r));
        }
        return rep;
    }

private:
    struct Entry {
        IdentityResult result;
        long count = 0;
    };

    mutable std::mutex mu_;
    std::vector<Entry> entries_;
    std::map<std::string, std::size_t> index_;
};

// Runs fn and charges any exception to the listed identities, so a throwing
// builder shows up as a named failure instead of aborting the whole suite.
template <typename Fn>
void probe(Suite& suite, std::initializer_list<const char*> names, Fn&& fn) {
    try {
        fn();
    } catch (const std::exception&) {
        for (const char* name : names) suite.fail(name);
    }
}

HaarSymbol primary_symbol(const TreeConfig& cfg, std::uint64_t seed) {
    if (seed % 5 == 4) return column_embed(gaussian_vector_symbol(cfg, derive_seed(seed, 0xB2)));
    return gaussian_symbol(cfg, derive_seed(seed, 0xB1));
}

HaarSymbol secondary_symbol(const TreeConfig& cfg, std::uint64_t seed) {
    if (seed % 4 == 3) return gaussian_vector_symbol(cfg, derive_seed(seed, 0xF2));
    return gaussian_symbol(cfg, derive_seed(seed, 0xF1));
}

Mat random_unitary(int n, std::uint64_t seed) {
    GaussianStream g(derive_seed(seed, stream_tag::witness));
    Mat a(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) a(i, j) = g.complex_normal();
    Eigen::HouseholderQR<Mat> qr(a);
    return qr.householderQ() * Mat::Identity(n, n);
}

HaarSymbol conjugate_symbol(const HaarSymbol& B, const Mat& u) {
    HaarSymbol out = B;
    out.mean = u.adjoint() * B.mean * u;
    for (Mat& c : out.coeffs) c = u.adjoint() * c * u;
    return out;
}

void exact_checks(Suite& suite, const TreeConfig& cfg, std::uint64_t seed) {
    const HaarSymbol B = primary_symbol(cfg, seed);
    const HaarSymbol F = secondary_symbol(cfg, seed);
    const std::vector<DyadicIndex> intervals = enumerate_intervals(cfg);

    OperatorMatrix P = paraproduct_matrix(B);
    OperatorMatrix Dm = delta_matrix(B);
    const double npi = operator_norm(P);
    const double ndl = operator_norm(Dm);

    probe(suite,
          {"lambda_split", "delta_adjoint_pairing", "lambda_adjoint_symmetry",
           "multiplication_split_meanzero", "paraproduct_family_agreement",
           "coefficient_para_bound", "sbmo_para_lower_bound", "multiplier_sup_bound",
           "sweep_identity_meanzero", "sweep_mean_total", "sweep_positivity"},
          [&] {
              OperatorMatrix L = lambda_matrix(B);
              const double nl = operator_norm(L);
              suite.note("lambda_split", operator_norm(Mat(L.m - P.m - Dm.m)) / (1.0 + nl));

              HaarSymbol Bs = adjoint_symbol(B);
              OperatorMatrix Ps = paraproduct_matrix(Bs);
              suite.note("delta_adjoint_pairing",
                         operator_norm(Mat(Dm.m - Ps.m.adjoint())) / (1.0 + ndl));

              OperatorMatrix Ls = lambda_matrix(Bs);
              suite.note("lambda_adjoint_symmetry",
                         operator_norm(Mat(Ls.m - L.m.adjoint())) / (1.0 + nl));

              OperatorMatrix M = multiplication_matrix(to_step(B));
              OperatorMatrix G = gamma_matrix(B);
              OperatorMatrix R = M;
              R.m = M.m - P.m - Dm.m - G.m;
              suite.note("multiplication_split_meanzero",
                         operator_norm(mean_zero_restrict(R)) / (1.0 + operator_norm(M)));

              const double e1 = npi;
              const double e2 = operator_norm(multiplier_matrix(family_coeff_haar(B)));
              const double e3 = operator_norm(multiplier_matrix(family_child_projections(B)));
              const double e4 = std::sqrt(operator_norm(multiplier_matrix(family_gram(B))));
              const double lo = std::min(std::min(e1, e2), std::min(e3, e4));
              const double hi = std::max(std::max(e1, e2), std::max(e3, e4));
              suite.note("paraproduct_family_agreement", (hi - lo) / (1.0 + lo));

              double coeff_worst = 0.0;
              for (const DyadicIndex& I : intervals) {
                  const double lhs = operator_norm(B.coeff(I));
                  coeff_worst = std::max(coeff_worst, excess(lhs, npi * std::sqrt(measure(I))));
              }
              suite.note("coefficient_para_bound", coeff_worst);

              suite.note("sbmo_para_lower_bound", excess(sbmo(B).value, 2.0 * npi));

              HaarSymbol B0 = B;
              B0.mean.setZero();
              StepSymbol flat = to_step(B0);
              double sup = 0.0;
              for (const Mat& cell : flat.cells) sup = std::max(sup, operator_norm(cell));
              suite.note("multiplier_sup_bound", excess(nl, 2.0 * sup));

              suite.note("sweep_identity_meanzero", verify_sweep_identity(B) / (1.0 + npi * npi));

              SweepResult S = sweep(B);
              Mat total = Mat::Zero(B.cols(), B.cols());
              for (const DyadicIndex& I : intervals)
                  total += B.coeff(I).adjoint() * B.coeff(I);
              suite.note("sweep_mean_total",
                         operator_norm(Mat(S.haar.mean - total)) / (1.0 + operator_norm(total)));

              double herm = 0.0;
              for (const Mat& cell : S.step.cells) {
                  const double scale = 1.0 + cell.norm();
                  herm = std::max(herm, operator_norm(Mat(cell - cell.adjoint())) / scale);
                  Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (cell + cell.adjoint())),
                                                        Eigen::EigenvaluesOnly);
                  if (es.info() == Eigen::Success)
                      herm = std::max(herm, pos(-es.eigenvalues().minCoeff()) / scale);
                  else
                      herm = kInf;
              }
              suite.note("sweep_positivity", herm);
          });

    probe(suite,
          {"product_identity_meanzero", "defect_schwarz_bound", "projected_sweep_agreement",
           "bilinear_sbmo_bound", "bilinear_l1_bound", "bilinear_mult_policy"},
          [&] {
              const double npf = operator_norm(paraproduct_matrix(F));
              suite.note("product_identity_meanzero",
                         verify_product_identity(B, F) / (1.0 + npi * npf));

              const double defect = operator_norm(dbf_matrix(B, F));
              suite.note("defect_schwarz_bound", excess(defect, sbmo(B).value * sbmo(F).value));

              double proj = 0.0;
              proj = std::max(proj, projected_sweep_check(B, F, DyadicIndex{0, 0}));
              if (cfg.depth >= 2)
                  proj = std::max(proj, projected_sweep_check(B, F, DyadicIndex{1, 1}));
              if (cfg.depth >= 3)
                  proj = std::max(proj, projected_sweep_check(
                                            B, F, DyadicIndex{cfg.depth - 1,
                                                              (1 << (cfg.depth - 1)) - 1}));
              suite.note("projected_sweep_agreement", proj / (1.0 + npi * npf));

              MaindeltaReport md = maindelta_checks(B, F);
              suite.note("bilinear_sbmo_bound", excess(md.sbmo_lhs, md.sbmo_rhs));
              suite.note("bilinear_l1_bound", pos(md.l1_max_ratio - 1.0));
              suite.note("bilinear_mult_policy", excess(md.mult_lhs, md.mult_rhs));
          });

    probe(suite,
          {"sign_transform_isometry", "sign_transform_para_intertwine",
           "sign_transform_delta_intertwine"},
          [&] {
              for (const SigmaSign& sg : sample_sigmas(cfg, derive_seed(seed, 0x5147), 2)) {
                  OperatorMatrix T = martingale_matrix(sg);
                  Mat eye = Mat::Identity(T.rows(), T.cols());
                  suite.note("sign_transform_isometry",
                             operator_norm(Mat(T.m.adjoint() * T.m - eye)));

                  HaarSymbol TB = transform_symbol(B, sg);
                  suite.note("sign_transform_para_intertwine",
                             operator_norm(Mat(paraproduct_matrix(TB).m - T.m * P.m)) /
                                 (1.0 + npi));
                  suite.note("sign_transform_delta_intertwine",
                             operator_norm(Mat(delta_matrix(TB).m - Dm.m * T.m)) / (1.0 + ndl));
              }
          });

    probe(suite, {"parseval_energy", "haar_roundtrip"}, [&] {
        StepSymbol flat = to_step(B);
        const double pe = parseval_energy(B);
        suite.note("parseval_energy", std::abs(l2_energy(flat) - pe) / (1.0 + pe));
        suite.note("haar_roundtrip",
                   max_coeff_deviation(to_haar(flat), B) / (1.0 + std::sqrt(pe)));
    });
}

void norm_checks(Suite& suite, const TreeConfig& cfg, std::uint64_t seed) {
    const HaarSymbol B = primary_symbol(cfg, seed);

    probe(suite, {"phi_route_agreement", "so_norm_split", "norm_chain_order"}, [&] {
        const double phi_b = phi_norm(B);
        NormReport rs = sbmo(B);
        suite.note("phi_route_agreement", std::abs(phi_b - rs.value));

        NormReport rso = bmo_so(B);
        suite.note("so_norm_split",
                   std::abs(phi_b + phi_norm(adjoint_symbol(B)) - rso.value));

        NormReport rb = bmo_norm(B);
        NormReport rw = wbmo(B);
        double chain = std::max(pos(rw.value - rs.value),
                                std::max(pos(rs.value - rb.value), pos(rs.value - rso.value)));
        suite.note("norm_chain_order", chain / (1.0 + rs.value));
    });

    probe(suite, {"witness_reproduction"}, [&] {
        double worst = 0.0;
        for (const NormReport& r : {bmo_norm(B), sbmo(B), wbmo(B), gram_sbmo(B)}) {
            const double again = witness_value(r.kind, B, r.witness);
            worst = std::max(worst, std::abs(again - r.value) / (1.0 + r.value));
        }
        suite.note("witness_reproduction", worst);
    });

    probe(suite, {"unitary_invariance"}, [&] {
        const Mat u = random_unitary(cfg.dim, derive_seed(seed, 0x5530));
        const HaarSymbol C = conjugate_symbol(B, u);
        double worst = 0.0;
        using NormFn = NormReport (*)(const HaarSymbol&);
        for (NormFn fn : {static_cast<NormFn>(bmo_norm), static_cast<NormFn>(sbmo),
                          static_cast<NormFn>(bmo_so), static_cast<NormFn>(wbmo),
                          static_cast<NormFn>(bmo_mult), static_cast<NormFn>(bmo_para)}) {
            const double a = fn(B).value;
            const double b = fn(C).value;
            worst = std::max(worst, std::abs(a - b) / (1.0 + a));
        }
        suite.note("unitary_invariance", worst);
    });
}

void average_checks(Suite& suite, const TreeConfig& cfg, std::uint64_t seed) {
    const HaarSymbol B = primary_symbol(cfg, seed);

    probe(suite, {"average_sweep_exact"}, [&] {
        StepSymbol direct = sweep(B).step;
        StepSymbol averaged = sweep_from_average(B, AverageMode::exact);
        double scale = 0.0;
        double dev = 0.0;
        for (std::size_t c = 0; c < direct.cells.size(); ++c) {
            scale = std::max(scale, direct.cells[c].norm());
            dev = std::max(dev, (direct.cells[c] - averaged.cells[c]).norm());
        }
        suite.note("average_sweep_exact", dev / (1.0 + scale));
    });

    probe(suite, {"pythagoras_meanzero"}, [&] {
        const int n = cfg.dim;
        Vec f(static_cast<Eigen::Index>(n) * cfg.cells());
        GaussianStream g(derive_seed(seed, stream_tag::test_fn));
        for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = g.complex_normal();
        f.head(n).setZero();
        f.normalize();
        PythagorasReport pr = pythagoras_check(B, f);
        double worst = std::max({std::abs(pr.mult_residual), std::abs(pr.lambda_residual),
                                 std::abs(pr.cross_pi_gamma), std::abs(pr.cross_gamma_delta),
                                 std::abs(pr.cross_pi_delta)});
        suite.note("pythagoras_meanzero", worst);
    });

    probe(suite, {"average_character_bracket"}, [&] {
        AvcharReport ac = avchar_report(B, AverageMode::exact);
        double bad = std::max(pos((ac.lower - ac.average) / (1.0 + ac.average)),
                              pos((ac.average - ac.upper) / (1.0 + ac.average)));
        suite.note("average_character_bracket", bad);
    });

    probe(suite, {"sweep_l1_chain", "sweep_average_policy"}, [&] {
        SweepAverageReport sr = sweep_average_report(B, AverageMode::exact);
        suite.note("sweep_l1_chain", pos(sr.l1_max_ratio - 1.0));
        suite.note("sweep_average_policy", pos(sr.policy_ratio / 8.0 - 1.0));
    });

    probe(suite, {"sign_average_cancellation"}, [&] {
        HaarSymbol acc = zero_haar(cfg, B.rows(), B.cols());
        const std::vector<SigmaSign> sigmas = enumerate_sigmas(cfg);
        for (const SigmaSign& sg : sigmas) {
            HaarSymbol t = transform_symbol(B, sg);
            for (std::size_t r = 0; r < acc.coeffs.size(); ++r) acc.coeffs[r] += t.coeffs[r];
        }
        double dev = 0.0;
        double scale = 0.0;
        for (std::size_t r = 0; r < acc.coeffs.size(); ++r) {
            dev = std::max(dev, acc.coeffs[r].norm() / static_cast<double>(sigmas.size()));
            scale = std::max(scale, B.coeffs[r].norm());
        }
        suite.note("sign_average_cancellation", dev / (1.0 + scale));
    });
}

struct Job {
    int dim = 0;
    int depth = 0;
    std::uint64_t seed = 0;
    enum class Kind { exact, norm, average } kind = Kind::exact;
};

}  // namespace

VerifyReport run_verify(const VerifyOptions& opt) {
    if (opt.dims.empty()) throw std::invalid_argument("verify: dims must be nonempty");
    if (opt.depths.empty()) throw std::invalid_argument("verify: depths must be nonempty");
    for (int n : opt.dims)
        if (n < 1) throw std::invalid_argument("verify: dims must be positive");
    if (opt.seeds < 1) throw std::invalid_argument("verify: seeds must be positive");
    if (!(opt.tolerance_scale >= 0.0) || !std::isfinite(opt.tolerance_scale))
        throw std::invalid_argument("verify: tolerance scale must be finite and nonnegative");

    std::vector<Job> jobs;
    int symbols = 0;
    for (int n : opt.dims) {
        for (int d : opt.depths) {
            check_config(TreeConfig{d, n});
            for (int seed = 0; seed < opt.seeds; ++seed) {
                jobs.push_back({n, d, static_cast<std::uint64_t>(seed), Job::Kind::exact});
                ++symbols;
            }
            if (opt.with_norm_checks) {
                const int cap = std::min(opt.norm_seeds, opt.seeds);
                for (int seed = 0; seed < cap; ++seed)
                    jobs.push_back({n, d, static_cast<std::uint64_t>(seed), Job::Kind::norm});
            }
            if (opt.with_average_checks && d <= 3) {
                const int cap = std::min(opt.average_seeds, opt.seeds);
                for (int seed = 0; seed < cap; ++seed)
                    jobs.push_back({n, d, static_cast<std::uint64_t>(seed), Job::Kind::average});
            }
        }
    }

    Suite suite(opt.tolerance_scale);
    parallel_for(static_cast<int>(jobs.size()), [&](int i) {
        const Job& job = jobs[static_cast<std::size_t>(i)];
        const TreeConfig cfg{job.depth, job.dim};
        switch (job.kind) {
            case Job::Kind::exact: exact_checks(suite, cfg, job.seed); break;
            case Job::Kind::norm: norm_checks(suite, cfg, job.seed); break;
            case Job::Kind::average: average_checks(suite, cfg, job.seed); break;
        }
    });
    return suite.finish(symbols);
}

std::string verify_report_json(const VerifyReport& rep) {
    nlohmann::ordered_json doc;
    doc["symbols_checked"] = rep.symbols_checked;
    doc["all_pass"] = rep.all_pass;
    doc["identities"] = nlohmann::ordered_json::array();
    for (const IdentityResult& r : rep.identities) {
        nlohmann::ordered_json row;
        row["name"] = r.name;
        row["max_residual"] = r.max_residual;
        row["tolerance"] = r.tolerance;
        row["pass"] = r.pass;
        doc["identities"].push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
}

}  // namespace opbmo
