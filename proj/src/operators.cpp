#include "opbmo/operators.hpp"

#include <Eigen/Eigenvalues>

#include "opbmo/errors.hpp"
#include "opbmo/rng.hpp"

namespace opbmo {

namespace {

OperatorMatrix zero_operator(const TreeConfig& cfg, int row_block, int col_block) {
    check_config(cfg);
    if (row_block < 1 || col_block < 1)
        throw std::invalid_argument("operator block sizes must be positive");
    OperatorMatrix M{cfg, row_block, col_block, {}};
    M.m = Mat::Zero(M.rows(), M.cols());
    return M;
}

std::vector<DyadicIndex> strict_descendants(const TreeConfig& cfg, const DyadicIndex& J) {
    std::vector<DyadicIndex> out;
    for (int level = J.level + 1; level < cfg.depth; ++level) {
        const int shift = level - J.level;
        for (int pos = J.pos << shift; pos < (J.pos + 1) << shift; ++pos)
            out.push_back({level, pos});
    }
    return out;
}

std::vector<DyadicIndex> strict_ancestors(const DyadicIndex& J) {
    std::vector<DyadicIndex> out;
    DyadicIndex K = J;
    while (K.level > 0) {
        K = parent(K);
        out.push_back(K);
    }
    return out;
}

/// Haar-analyzes the step function G and writes it into block column bcol.
void put_column(OperatorMatrix& M, int bcol, const StepSymbol& G) {
    const HaarSymbol H = to_haar(G);
    const int rb = M.row_block;
    const int cb = M.col_block;
    M.m.block(0, bcol * cb, rb, cb) = H.mean;
    for (const auto& I : enumerate_intervals(M.cfg))
        M.m.block(block_of(I) * rb, bcol * cb, rb, cb) = H.coeff(I);
}

/// Cell values of sum over the given intervals of B_J* B_J chi_J / |J|.
StepSymbol gram_accumulation(const HaarSymbol& B, const std::vector<DyadicIndex>& intervals) {
    StepSymbol out = zero_step(B.cfg, B.cols(), B.cols());
    for (const auto& J : intervals) {
        const Mat term = (1 << J.level) * (B.coeff(J).adjoint() * B.coeff(J));
        const int lo = first_cell(B.cfg, J);
        for (int c = lo; c < lo + cell_span(B.cfg, J); ++c) out.cells[c] += term;
    }
    return out;
}

}  // namespace

void check_family(const MultiplierFamily& fam) {
    check_config(fam.cfg);
    if (static_cast<int>(fam.phi.size()) != fam.cfg.coeff_count())
        throw std::invalid_argument("multiplier family needs one function per interval");
    int rows = -1, cols = -1;
    auto check_shape = [&](const StepSymbol& s) {
        check_step(s);
        if (!(s.cfg == fam.cfg)) throw std::invalid_argument("multiplier family tree mismatch");
        if (rows < 0) { rows = s.rows(); cols = s.cols(); }
        if (s.rows() != rows || s.cols() != cols)
            throw std::invalid_argument("multiplier family has mixed shapes");
    };
    for (const auto& I : enumerate_intervals(fam.cfg)) {
        const StepSymbol& phi = fam.phi[interval_rank(I)];
        check_shape(phi);
        double inside = 0.0, outside = 0.0;
        const int lo = first_cell(fam.cfg, I);
        const int hi = lo + cell_span(fam.cfg, I);
        for (int c = 0; c < fam.cfg.cells(); ++c) {
            const double a = phi.cells[c].cwiseAbs().maxCoeff();
            double& side = (c >= lo && c < hi) ? inside : outside;
            side = std::max(side, a);
        }
        if (outside > 1e-12 * (1.0 + inside))
            throw std::invalid_argument("multiplier function escapes its interval at rank " +
                                        std::to_string(interval_rank(I)));
    }
    if (fam.constant_action) check_shape(*fam.constant_action);
}

OperatorMatrix paraproduct_matrix(const HaarSymbol& B) {
    check_haar(B);
    OperatorMatrix M = zero_operator(B.cfg, B.rows(), B.cols());
    const int rb = M.row_block, cb = M.col_block;
    for (const auto& I : enumerate_intervals(B.cfg)) {
        // m_I of the constant mode is the identity, so chi_T x -> sum B_I x h_I
        M.m.block(block_of(I) * rb, 0, rb, cb) = B.coeff(I);
        for (const auto& J : strict_ancestors(I))
            M.m.block(block_of(I) * rb, block_of(J) * cb, rb, cb) =
                haar_on_interval(J, I) * B.coeff(I);
    }
    return M;
}

OperatorMatrix delta_matrix(const HaarSymbol& B) {
    check_haar(B);
    OperatorMatrix M = zero_operator(B.cfg, B.rows(), B.cols());
    const int rb = M.row_block, cb = M.col_block;
    for (const auto& J : enumerate_intervals(B.cfg)) {
        // chi_J/|J| = chi_T + sum over ancestors K of h_K(J) h_K
        M.m.block(0, block_of(J) * cb, rb, cb) = B.coeff(J);
        for (const auto& K : strict_ancestors(J))
            M.m.block(block_of(K) * rb, block_of(J) * cb, rb, cb) =
                haar_on_interval(K, J) * B.coeff(J);
    }
    return M;
}

Mat interval_mean(const HaarSymbol& B, const DyadicIndex& I) {
    if (I.level < 0 || I.level > B.cfg.depth || I.pos < 0 || I.pos >= (1 << I.level))
        throw std::invalid_argument("interval_mean index out of range");
    Mat m = B.mean;
    for (const auto& K : strict_ancestors(I)) m += haar_on_interval(K, I) * B.coeff(K);
    return m;
}

OperatorMatrix gamma_matrix(const HaarSymbol& B) {
    check_haar(B);
    OperatorMatrix M = zero_operator(B.cfg, B.rows(), B.cols());
    const int rb = M.row_block, cb = M.col_block;
    for (const auto& I : enumerate_intervals(B.cfg))
        M.m.block(block_of(I) * rb, block_of(I) * cb, rb, cb) = interval_mean(B, I);
    return M;
}

OperatorMatrix multiplier_matrix(const MultiplierFamily& fam) {
    check_family(fam);
    const StepSymbol* shape = !fam.phi.empty()        ? &fam.phi.front()
                              : fam.constant_action ? &*fam.constant_action
                                                    : nullptr;
    if (!shape) throw std::invalid_argument("empty multiplier family");
    OperatorMatrix M = zero_operator(fam.cfg, shape->rows(), shape->cols());
    for (const auto& J : enumerate_intervals(fam.cfg)) {
        StepSymbol G = fam.phi[interval_rank(J)];
        for (int c = 0; c < fam.cfg.cells(); ++c) G.cells[c] *= haar_on_cell(fam.cfg, J, c);
        put_column(M, block_of(J), G);
    }
    if (fam.constant_action) put_column(M, const_block(), *fam.constant_action);
    return M;
}

MultiplierFamily family_coeff_haar(const HaarSymbol& B) {
    check_haar(B);
    MultiplierFamily fam{B.cfg, {}, std::nullopt};
    for (const auto& I : enumerate_intervals(B.cfg)) {
        StepSymbol phi = zero_step(B.cfg, B.cols(), B.rows());
        const Mat A = B.coeff(I).adjoint();
        for (int c = 0; c < B.cfg.cells(); ++c) phi.cells[c] = haar_on_cell(B.cfg, I, c) * A;
        fam.phi.push_back(std::move(phi));
    }
    return fam;
}

MultiplierFamily family_child_projections(const HaarSymbol& B) {
    check_haar(B);
    MultiplierFamily fam{B.cfg, {}, std::nullopt};
    for (const auto& I : enumerate_intervals(B.cfg)) {
        StepSymbol phi = zero_step(B.cfg, B.rows(), B.cols());
        if (I.level + 1 < B.cfg.depth) {
            const StepSymbol l = to_step(project(B, left_child(I)));
            const StepSymbol r = to_step(project(B, right_child(I)));
            for (int c = 0; c < B.cfg.cells(); ++c) phi.cells[c] = l.cells[c] + r.cells[c];
        }
        fam.phi.push_back(std::move(phi));
    }
    if (B.cfg.depth > 0) fam.constant_action = to_step(project(B, {0, 0}));
    else fam.constant_action = zero_step(B.cfg, B.rows(), B.cols());
    return fam;
}

MultiplierFamily family_gram(const HaarSymbol& B) {
    check_haar(B);
    MultiplierFamily fam{B.cfg, {}, std::nullopt};
    for (const auto& I : enumerate_intervals(B.cfg))
        fam.phi.push_back(gram_accumulation(B, strict_descendants(B.cfg, I)));
    fam.constant_action = gram_accumulation(B, enumerate_intervals(B.cfg));
    return fam;
}

MultiplierFamily family_lambda(const HaarSymbol& B) {
    check_haar(B);
    MultiplierFamily fam{B.cfg, {}, std::nullopt};
    for (const auto& I : enumerate_intervals(B.cfg))
        fam.phi.push_back(to_step(project(B, I)));
    if (B.cfg.depth > 0) fam.constant_action = to_step(project(B, {0, 0}));
    else fam.constant_action = zero_step(B.cfg, B.rows(), B.cols());
    return fam;
}

OperatorMatrix lambda_matrix(const HaarSymbol& B) { return multiplier_matrix(family_lambda(B)); }

OperatorMatrix multiplication_matrix(const StepSymbol& B) {
    check_step(B);
    OperatorMatrix M = zero_operator(B.cfg, B.rows(), B.cols());
    StepSymbol G = B;  // constant input mode: t -> B(t)
    put_column(M, const_block(), G);
    for (const auto& J : enumerate_intervals(B.cfg)) {
        for (int c = 0; c < B.cfg.cells(); ++c) G.cells[c] = haar_on_cell(B.cfg, J, c) * B.cells[c];
        put_column(M, block_of(J), G);
    }
    return M;
}

OperatorMatrix dbf_matrix(const HaarSymbol& B, const HaarSymbol& F) {
    check_haar(B);
    check_haar(F);
    if (!(B.cfg == F.cfg) || B.rows() != F.rows())
        throw std::invalid_argument("dbf_matrix needs symbols over one tree with matching row dimension");
    OperatorMatrix M = zero_operator(B.cfg, B.cols(), F.cols());
    const int rb = M.row_block, cb = M.col_block;
    for (const auto& I : enumerate_intervals(B.cfg)) {
        Mat block = Mat::Zero(rb, cb);
        for (const auto& J : strict_descendants(B.cfg, I))
            block += B.coeff(J).adjoint() * F.coeff(J);
        M.m.block(block_of(I) * rb, block_of(I) * cb, rb, cb) = (1 << I.level) * block;
    }
    return M;
}

Mat mean_zero_restrict(const OperatorMatrix& M) {
    Mat out = M.m;
    out.leftCols(M.col_block).setZero();
    return out;
}

namespace {

Mat gram_of_smaller_side(const Mat& M) {
    return M.rows() >= M.cols() ? Mat(M.adjoint() * M) : Mat(M * M.adjoint());
}

double max_abs_row_sum(const Mat& H) {
    double r = 0.0;
    for (Eigen::Index i = 0; i < H.rows(); ++i) r = std::max(r, H.row(i).cwiseAbs().sum());
    return r;
}

}  // namespace

NormBracket power_norm_bracket(const Mat& M) {
    const Mat H = gram_of_smaller_side(M);
    const Eigen::Index n = H.rows();
    if (n == 0) return {0.0, 0.0, 0.0};

    GaussianStream g(derive_seed(0x706f776572ULL, stream_tag::power_it));
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = g.complex_normal();
    v.normalize();

    double theta = 0.0;
    for (int it = 0; it < 20000; ++it) {
        const Vec w = H * v;
        const double next = std::real(v.dot(w));
        const double nw = w.norm();
        if (nw == 0.0) { theta = 0.0; break; }
        v = w / nw;
        if (it > 0 && std::abs(next - theta) <= 1e-8 * std::max(1.0, next)) {
            theta = next;
            break;
        }
        theta = next;
    }
    theta = std::max(theta, 0.0);

    // Row-sum norm bounds the top eigenvalue of a Hermitian PSD matrix, and
    // squaring sharpens it: lambda_max(H)^2 = lambda_max(H^2).
    double upper_eig = max_abs_row_sum(H);
    const Mat H2 = H * H;
    upper_eig = std::min(upper_eig, std::sqrt(max_abs_row_sum(H2)));
    upper_eig = std::min(upper_eig, std::sqrt(std::sqrt(max_abs_row_sum(H2 * H2))));

    NormBracket b;
    b.lower = std::sqrt(theta);
    b.upper = std::max(std::sqrt(std::max(upper_eig, 0.0)), b.lower);
    b.value = b.lower;
    return b;
}

double operator_norm(const Mat& M) {
    if (M.size() == 0) return 0.0;
    if (!M.allFinite()) throw NumericError("operator_norm: matrix has non-finite entries");
    if (std::max(M.rows(), M.cols()) <= 4096) {
        const Mat H = gram_of_smaller_side(M);
        Eigen::SelfAdjointEigenSolver<Mat> es(H, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw NumericError("operator_norm: eigensolver failed");
        return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
    }
    return power_norm_bracket(M).value;
}

double operator_norm(const OperatorMatrix& M) { return operator_norm(M.m); }

}  // namespace opbmo
