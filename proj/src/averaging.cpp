#include "opbmo/averaging.hpp"

#include <Eigen/Eigenvalues>

#include "opbmo/errors.hpp"
#include "opbmo/rng.hpp"

namespace opbmo {

void check_sigma(const SigmaSign& sigma) {
    check_config(sigma.cfg);
    if (static_cast<int>(sigma.signs.size()) != sigma.cfg.coeff_count())
        throw std::invalid_argument("sign pattern needs one sign per interval");
    for (int s : sigma.signs)
        if (s != 1 && s != -1) throw std::invalid_argument("signs must be +-1");
}

std::vector<SigmaSign> enumerate_sigmas(const TreeConfig& cfg) {
    check_config(cfg);
    const int k = cfg.coeff_count();
    if (k > 20)
        throw std::invalid_argument("enumeration guard: " + std::to_string(k) +
                                    " signs exceed the exact-mode limit of 20; use Monte Carlo");
    std::vector<SigmaSign> out;
    out.reserve(std::size_t{1} << k);
    for (std::uint64_t p = 0; p < (std::uint64_t{1} << k); ++p) {
        SigmaSign s{cfg, std::vector<int>(k, 1)};
        for (int r = 0; r < k; ++r)
            if (p >> r & 1) s.signs[r] = -1;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<SigmaSign> sample_sigmas(const TreeConfig& cfg, std::uint64_t seed, int count) {
    check_config(cfg);
    if (count < 1) throw std::invalid_argument("sample_sigmas: count must be positive");
    GaussianStream g(derive_seed(seed, stream_tag::signs));
    std::vector<SigmaSign> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        SigmaSign s{cfg, std::vector<int>(cfg.coeff_count())};
        for (int& v : s.signs) v = g.sign();
        out.push_back(std::move(s));
    }
    return out;
}

HaarSymbol transform_symbol(const HaarSymbol& B, const SigmaSign& sigma) {
    check_haar(B);
    check_sigma(sigma);
    if (!(B.cfg == sigma.cfg)) throw std::invalid_argument("transform_symbol: tree mismatch");
    HaarSymbol out = B;
    out.mean.setZero();
    for (int r = 0; r < B.cfg.coeff_count(); ++r)
        out.coeffs[r] *= static_cast<double>(sigma.signs[r]);
    return out;
}

OperatorMatrix martingale_matrix(const SigmaSign& sigma) {
    check_sigma(sigma);
    const int n = sigma.cfg.dim;
    OperatorMatrix M{sigma.cfg, n, n, {}};
    M.m = Mat::Zero(M.rows(), M.cols());
    M.m.block(0, 0, n, n) = Mat::Identity(n, n);
    for (const auto& I : enumerate_intervals(sigma.cfg))
        M.m.block(block_of(I) * n, block_of(I) * n, n, n) =
            static_cast<double>(sigma.at(I)) * Mat::Identity(n, n);
    return M;
}

namespace {

std::vector<SigmaSign> pattern_set(const TreeConfig& cfg, AverageMode mode, std::uint64_t seed,
                                   int samples) {
    return mode == AverageMode::exact ? enumerate_sigmas(cfg) : sample_sigmas(cfg, seed, samples);
}

}  // namespace

StepSymbol sweep_from_average(const HaarSymbol& B, AverageMode mode, std::uint64_t seed,
                              int samples, std::vector<double>* cell_stderr) {
    check_haar(B);
    const auto sigmas = pattern_set(B.cfg, mode, seed, samples);
    const int cells = B.cfg.cells();
    StepSymbol mean = zero_step(B.cfg, B.cols(), B.cols());
    std::vector<StepSymbol> draws;
    if (cell_stderr) draws.reserve(sigmas.size());
    for (const auto& s : sigmas) {
        const StepSymbol t = to_step(transform_symbol(B, s));
        StepSymbol prod = zero_step(B.cfg, B.cols(), B.cols());
        for (int c = 0; c < cells; ++c) prod.cells[c] = t.cells[c].adjoint() * t.cells[c];
        for (int c = 0; c < cells; ++c) mean.cells[c] += prod.cells[c];
        if (cell_stderr) draws.push_back(std::move(prod));
    }
    const double m = static_cast<double>(sigmas.size());
    for (int c = 0; c < cells; ++c) mean.cells[c] /= m;
    if (cell_stderr) {
        cell_stderr->assign(cells, 0.0);
        if (mode == AverageMode::monte_carlo && sigmas.size() > 1) {
            for (int c = 0; c < cells; ++c) {
                double ss = 0.0;
                for (const auto& d : draws) ss += (d.cells[c] - mean.cells[c]).squaredNorm();
                (*cell_stderr)[c] = std::sqrt(ss / (m - 1.0)) / std::sqrt(m);
            }
        }
    }
    return mean;
}

AverageEstimate averaged_norm_sq(const HaarSymbol& B, AveragedKind kind, AverageMode mode,
                                 std::uint64_t seed, int samples) {
    check_haar(B);
    const auto sigmas = pattern_set(B.cfg, mode, seed, samples);
    std::vector<double> vals;
    vals.reserve(sigmas.size());
    for (const auto& s : sigmas) {
        const HaarSymbol Bs = transform_symbol(B, s);
        const double v = kind == AveragedKind::bmo_norm ? bmo_norm(Bs).value : bmo_mult(Bs).value;
        vals.push_back(v * v);
    }
    AverageEstimate est;
    est.mode = mode;
    est.samples = static_cast<long>(vals.size());
    double sum = 0.0;
    for (double v : vals) sum += v;
    est.value = sum / static_cast<double>(vals.size());
    if (mode == AverageMode::monte_carlo && vals.size() > 1) {
        double ss = 0.0;
        for (double v : vals) ss += (v - est.value) * (v - est.value);
        est.stderr_est = std::sqrt(ss / (static_cast<double>(vals.size()) - 1.0)) /
                         std::sqrt(static_cast<double>(vals.size()));
    }
    return est;
}

double phi_norm(const HaarSymbol& B) {
    check_haar(B);
    // (a) coefficient route: sup_I lambda_max((1/|I|) sum_{J in I} B_J* B_J)
    const double a = std::sqrt(gram_sbmo(B).value);
    // (b) quadrature route: per-interval blocks from the cells of P_I B
    double b2 = 0.0;
    for (const auto& I : enumerate_intervals(B.cfg)) {
        const StepSymbol P = to_step(project(B, I));
        Mat M = Mat::Zero(B.cols(), B.cols());
        const double w = B.cfg.cell_measure() * (1 << I.level);
        const int lo = first_cell(B.cfg, I);
        for (int c = lo; c < lo + cell_span(B.cfg, I); ++c)
            M += w * (P.cells[c].adjoint() * P.cells[c]);
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (M + M.adjoint()), Eigen::EigenvaluesOnly);
        b2 = std::max(b2, es.eigenvalues().maxCoeff());
    }
    const double b = std::sqrt(std::max(b2, 0.0));
    if (std::abs(a - b) > 1e-8 * (1.0 + a))
        throw NumericError("phi_norm: coefficient and quadrature routes disagree");
    return a;
}

PythagorasReport pythagoras_check(const HaarSymbol& B, const Vec& f) {
    check_haar(B);
    const int n = B.rows();
    if (f.size() != static_cast<Eigen::Index>(n) * B.cfg.cells())
        throw std::invalid_argument("pythagoras_check: vector dimension mismatch");
    if (f.head(n).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + f.norm()))
        throw std::invalid_argument("pythagoras_check: f must be mean-zero");

    PythagorasReport rep;
    double mult_sq = 0.0, lam_sq = 0.0, pi_sq = 0.0, del_sq = 0.0, gam_sq = 0.0;
    Cplx c_pg = 0.0, c_gd = 0.0, c_pd = 0.0;
    const auto sigmas = enumerate_sigmas(B.cfg);
    for (const auto& s : sigmas) {
        const HaarSymbol Bs = transform_symbol(B, s);
        const Vec pf = paraproduct_matrix(Bs).m * f;
        const Vec df = delta_matrix(Bs).m * f;
        const Vec gf = gamma_matrix(Bs).m * f;
        const Vec lf = lambda_matrix(Bs).m * f;
        const Vec mf = multiplication_matrix(to_step(Bs)).m * f;
        mult_sq += mf.squaredNorm();
        lam_sq += lf.squaredNorm();
        pi_sq += pf.squaredNorm();
        del_sq += df.squaredNorm();
        gam_sq += gf.squaredNorm();
        c_pg += pf.dot(gf);
        c_gd += gf.dot(df);
        c_pd += pf.dot(df);
    }
    const double m = static_cast<double>(sigmas.size());
    rep.mult_residual = std::abs(mult_sq - (pi_sq + del_sq + gam_sq)) / m;
    rep.lambda_residual = std::abs(lam_sq - (pi_sq + del_sq)) / m;
    rep.cross_pi_gamma = std::abs(c_pg) / m;
    rep.cross_gamma_delta = std::abs(c_gd) / m;
    rep.cross_pi_delta = std::abs(c_pd) / m;
    return rep;
}

SweepAverageReport sweep_average_report(const HaarSymbol& B, AverageMode mode, std::uint64_t seed,
                                        int samples) {
    check_haar(B);
    SweepAverageReport rep;
    rep.average_norm_sq = averaged_norm_sq(B, AveragedKind::bmo_norm, mode, seed, samples).value;
    const SweepResult S = sweep(B);

    if (rep.average_norm_sq > 0.0) {
        for (const auto& I : enumerate_intervals(B.cfg)) {
            const StepSymbol P = to_step(project(S.haar, I));
            double l1 = 0.0;
            for (int c = 0; c < B.cfg.cells(); ++c)
                l1 += B.cfg.cell_measure() * operator_norm(P.cells[c]);
            rep.l1_max_ratio =
                std::max(rep.l1_max_ratio, l1 / (2.0 * measure(I) * rep.average_norm_sq));
        }
        rep.l1_pass = rep.l1_max_ratio <= 1.0 + 1e-9;
        rep.policy_ratio = bmo_norm(S.haar).value / rep.average_norm_sq;
        rep.policy_pass = rep.policy_ratio <= 8.0;
    }
    return rep;
}

AvcharReport avchar_report(const HaarSymbol& B, AverageMode mode, std::uint64_t seed,
                           int samples) {
    check_haar(B);
    AvcharReport rep;
    rep.average = averaged_norm_sq(B, AveragedKind::bmo_mult, mode, seed, samples).value;
    const double pi = bmo_para(B).value;
    const double del = operator_norm(delta_matrix(B));
    const double s = pi + del;
    rep.lower = 0.25 * s * s;
    rep.upper = s * s;
    const double slack = mode == AverageMode::exact ? 1e-9 : 0.05;
    rep.pass = rep.average >= rep.lower * (1.0 - slack) - 1e-12 &&
               rep.average <= rep.upper * (1.0 + slack) + 1e-12;
    return rep;
}

}  // namespace opbmo
