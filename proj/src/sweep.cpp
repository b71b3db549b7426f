#include "opbmo/sweep.hpp"

#include "opbmo/errors.hpp"
#include "opbmo/rng.hpp"

namespace opbmo {

namespace {

/// Cell values of sum over selected J of B_J* F_J chi_J / |J|.
StepSymbol accumulate(const HaarSymbol& B, const HaarSymbol& F,
                      const std::vector<DyadicIndex>& intervals) {
    StepSymbol out = zero_step(B.cfg, B.cols(), F.cols());
    for (const auto& J : intervals) {
        const Mat term = (1 << J.level) * (B.coeff(J).adjoint() * F.coeff(J));
        const int lo = first_cell(B.cfg, J);
        for (int c = lo; c < lo + cell_span(B.cfg, J); ++c) out.cells[c] += term;
    }
    return out;
}

SweepResult wrap(StepSymbol step) {
    HaarSymbol haar = to_haar(step);
    return {std::move(step), std::move(haar)};
}

double max_cell_deviation(const StepSymbol& A, const StepSymbol& B) {
    double dev = 0.0;
    for (int c = 0; c < A.cfg.cells(); ++c)
        dev = std::max(dev, (A.cells[c] - B.cells[c]).cwiseAbs().maxCoeff());
    return dev;
}

}  // namespace

SweepResult sweep(const HaarSymbol& B) {
    check_haar(B);
    return wrap(accumulate(B, B, enumerate_intervals(B.cfg)));
}

SweepResult bilinear_delta(const HaarSymbol& B, const HaarSymbol& F) {
    check_haar(B);
    check_haar(F);
    if (!(B.cfg == F.cfg)) throw std::invalid_argument("bilinear_delta: tree mismatch");
    const auto all = enumerate_intervals(B.cfg);
    StepSymbol step = accumulate(B, F, all);
    // Delta(B,F)* = Delta(F,B), cell by cell
    const StepSymbol flipped = accumulate(F, B, all);
    const double scale = 1.0 + max_cell_deviation(step, zero_step(B.cfg, B.cols(), F.cols()));
    if (max_cell_deviation(adjoint_symbol(step), flipped) > 1e-12 * scale)
        throw NumericError("bilinear_delta: adjoint symmetry violated");
    return wrap(std::move(step));
}

double projected_sweep_check(const HaarSymbol& B, const HaarSymbol& F, const DyadicIndex& I) {
    check_haar(B);
    check_haar(F);
    check_index(B.cfg, I);
    std::vector<DyadicIndex> inside, strictly_inside;
    for (const auto& J : enumerate_intervals(B.cfg)) {
        if (!contains(I, J)) continue;
        inside.push_back(J);
        if (!(J == I)) strictly_inside.push_back(J);
    }
    const HaarSymbol e1 = project(bilinear_delta(B, F).haar, I);
    const HaarSymbol e2 = project(bilinear_delta(B, project(F, I)).haar, I);
    const HaarSymbol e3 = project(to_haar(accumulate(B, F, inside)), I);
    const HaarSymbol e4 = project(to_haar(accumulate(B, F, strictly_inside)), I);
    double dev = 0.0;
    for (const HaarSymbol* a : {&e1, &e2, &e3})
        for (const HaarSymbol* b : {&e2, &e3, &e4})
            dev = std::max(dev, max_coeff_deviation(*a, *b));
    return dev;
}

double verify_sweep_identity(const HaarSymbol& B) {
    check_haar(B);
    const OperatorMatrix pi = paraproduct_matrix(B);
    const SweepResult S = sweep(B);
    const OperatorMatrix lam = lambda_matrix(S.haar);
    const OperatorMatrix D = dbf_matrix(B, B);
    OperatorMatrix R = pi;
    R.m = pi.m.adjoint() * pi.m - lam.m - D.m;
    return operator_norm(mean_zero_restrict(R));
}

double verify_product_identity(const HaarSymbol& B, const HaarSymbol& F) {
    check_haar(B);
    check_haar(F);
    if (!(B.cfg == F.cfg)) throw std::invalid_argument("verify_product_identity: tree mismatch");
    const OperatorMatrix piB = paraproduct_matrix(B);
    const OperatorMatrix piF = paraproduct_matrix(F);
    const SweepResult G = bilinear_delta(B, F);
    const OperatorMatrix lam = lambda_matrix(G.haar);
    const OperatorMatrix D = dbf_matrix(B, F);

    const double dnorm = operator_norm(D);
    const double bound = sbmo(B).value * sbmo(F).value;
    if (dnorm > bound * (1.0 + 1e-7) + 1e-12)
        throw NumericError("verify_product_identity: diagonal part exceeds its sbmo bound");

    OperatorMatrix R = piB;
    R.m = piB.m.adjoint() * piF.m - lam.m - D.m;
    return operator_norm(mean_zero_restrict(R));
}

SweepResult iterated_sweep(const HaarSymbol& B, int m) {
    check_haar(B);
    if (m < 0) throw std::invalid_argument("iterated_sweep: negative iteration count");
    if (m == 0) return {to_step(B), B};
    SweepResult r = sweep(B);
    for (int k = 1; k < m; ++k) r = sweep(r.haar);
    return r;
}

double rho(const HaarSymbol& B, int N) {
    check_haar(B);
    const int cap = N < 0 ? B.cfg.depth : std::min(N, B.cfg.depth);
    double best = 0.0;
    HaarSymbol cur = B;
    for (int n = 0; n <= cap; ++n) {
        const double v = sbmo(cur).value;
        best = std::max(best, std::pow(v, 1.0 / static_cast<double>(1 << n)));
        if (n < cap) cur = sweep(cur).haar;
    }
    return best;
}

std::optional<double> mainteo_ratio(const HaarSymbol& B) {
    check_haar(B);
    const double para = bmo_para(B).value;
    if (para == 0.0) return std::nullopt;
    const double num = bmo_mult(sweep(B).haar).value + std::pow(sbmo(B).value, 2);
    return num / (para * para);
}

MaindeltaReport maindelta_checks(const HaarSymbol& B, const HaarSymbol& F) {
    check_haar(B);
    check_haar(F);
    if (!(B.cfg == F.cfg)) throw std::invalid_argument("maindelta_checks: tree mismatch");
    MaindeltaReport rep;
    const HaarSymbol G = bilinear_delta(B, F).haar;

    rep.sbmo_lhs = sbmo(G).value;
    rep.sbmo_rhs = bmo_para(B).value * sbmo(F).value;
    rep.sbmo_pass = rep.sbmo_lhs <= rep.sbmo_rhs * (1.0 + 1e-9) + 1e-12;

    rep.mult_lhs = bmo_mult(G).value;
    rep.mult_rhs = 8.0 * bmo_para(B).value * bmo_para(F).value;
    rep.mult_pass = rep.mult_lhs <= rep.mult_rhs * (1.0 + 1e-9) + 1e-12;

    const double sb = sbmo(B).value;
    const double sf = sbmo(F).value;
    if (sb > 0.0 && sf > 0.0) {
        const HaarSymbol Gn = bilinear_delta(scale(1.0 / sb, B), scale(1.0 / sf, F)).haar;
        const int ecols = Gn.cols();
        const int frows = Gn.rows();
        for (const auto& I : enumerate_intervals(B.cfg)) {
            const StepSymbol PG = to_step(project(Gn, I));

            std::vector<std::pair<Vec, Vec>> pairs;  // (e, f)
            for (int i = 0; i < std::min(ecols, 3); ++i)
                for (int j = 0; j < std::min(frows, 3); ++j) {
                    Vec e = Vec::Zero(ecols), f = Vec::Zero(frows);
                    e[i] = 1.0;
                    f[j] = 1.0;
                    pairs.emplace_back(e, f);
                }
            GaussianStream g(derive_seed(0x6d64656cULL + interval_rank(I), stream_tag::witness));
            for (int s = 0; s < 4; ++s) {
                Vec e(ecols), f(frows);
                for (int i = 0; i < ecols; ++i) e[i] = g.complex_normal();
                for (int i = 0; i < frows; ++i) f[i] = g.complex_normal();
                pairs.emplace_back(e.normalized(), f.normalized());
            }

            for (const auto& [e, f] : pairs) {
                double l1 = 0.0;
                for (int c = 0; c < B.cfg.cells(); ++c)
                    l1 += B.cfg.cell_measure() * std::abs((f.adjoint() * (PG.cells[c] * e))(0, 0));
                rep.l1_max_ratio = std::max(rep.l1_max_ratio, l1 / (2.0 * measure(I)));
            }
        }
        rep.l1_pass = rep.l1_max_ratio <= 1.0 + 1e-9;
    }
    return rep;
}

}  // namespace opbmo
