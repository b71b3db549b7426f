#include "opbmo/symbol.hpp"

namespace opbmo {

void check_step(const StepSymbol& B) {
    check_config(B.cfg);
    if (static_cast<int>(B.cells.size()) != B.cfg.cells())
        throw std::invalid_argument("step symbol needs exactly 2^d cells");
    const int r = B.rows(), c = B.cols();
    for (const Mat& m : B.cells)
        if (m.rows() != r || m.cols() != c)
            throw std::invalid_argument("step symbol cells must share one shape");
}

void check_haar(const HaarSymbol& B) {
    check_config(B.cfg);
    if (static_cast<int>(B.coeffs.size()) != B.cfg.coeff_count())
        throw std::invalid_argument("haar symbol needs exactly 2^d-1 coefficients");
    const int r = B.rows(), c = B.cols();
    for (const Mat& m : B.coeffs)
        if (m.rows() != r || m.cols() != c)
            throw std::invalid_argument("haar symbol coefficients must share one shape");
}

StepSymbol zero_step(const TreeConfig& cfg, int rows, int cols) {
    check_config(cfg);
    StepSymbol B{cfg, std::vector<Mat>(cfg.cells(), Mat::Zero(rows, cols))};
    return B;
}

HaarSymbol zero_haar(const TreeConfig& cfg, int rows, int cols) {
    check_config(cfg);
    HaarSymbol B{cfg, Mat::Zero(rows, cols),
                 std::vector<Mat>(cfg.coeff_count(), Mat::Zero(rows, cols))};
    return B;
}

HaarSymbol to_haar(const StepSymbol& B) {
    check_step(B);
    const TreeConfig& cfg = B.cfg;
    HaarSymbol H = zero_haar(cfg, B.rows(), B.cols());

    // Bottom-up conditional averages: level d holds the cells themselves,
    // each coarser average is the mean of its two children.
    std::vector<Mat> avg = B.cells;
    for (int level = cfg.depth - 1; level >= 0; --level) {
        std::vector<Mat> up(1 << level);
        for (int pos = 0; pos < (1 << level); ++pos)
            up[pos] = 0.5 * (avg[2 * pos] + avg[2 * pos + 1]);
        // B_I = |I|^{1/2}/2 * (m_{I+} - m_{I-}), left half positive
        const double w = 0.5 * std::sqrt(measure(DyadicIndex{level, 0}));
        for (int pos = 0; pos < (1 << level); ++pos)
            H.coeffs[interval_rank({level, pos})] = w * (avg[2 * pos] - avg[2 * pos + 1]);
        avg = std::move(up);
    }
    H.mean = avg[0];
    return H;
}

StepSymbol to_step(const HaarSymbol& H) {
    check_haar(H);
    const TreeConfig& cfg = H.cfg;
    StepSymbol B = zero_step(cfg, H.rows(), H.cols());

    // Top-down accumulation of mean + sum of B_I h_I along each cell's
    // ancestor chain.
    std::vector<Mat> acc(1, H.mean);
    for (int level = 0; level < cfg.depth; ++level) {
        std::vector<Mat> next(1 << (level + 1));
        for (int pos = 0; pos < (1 << level); ++pos) {
            const double amp = 1.0 / std::sqrt(measure(DyadicIndex{level, 0}));
            const Mat& c = H.coeffs[interval_rank({level, pos})];
            next[2 * pos] = acc[pos] + amp * c;
            next[2 * pos + 1] = acc[pos] - amp * c;
        }
        acc = std::move(next);
    }
    B.cells = std::move(acc);
    return B;
}

Mat mean_on(const StepSymbol& B, int level, int pos) {
    check_step(B);
    if (level < 0 || level > B.cfg.depth)
        throw std::invalid_argument("mean_on level must lie in [0, depth]");
    if (pos < 0 || pos >= (1 << level))
        throw std::invalid_argument("mean_on position out of range");
    const int span = 1 << (B.cfg.depth - level);
    const int lo = pos * span;
    Mat acc = Mat::Zero(B.rows(), B.cols());
    for (int c = lo; c < lo + span; ++c) acc += B.cells[c];
    return acc / static_cast<double>(span);
}

Mat mean_on(const StepSymbol& B, const DyadicIndex& I) { return mean_on(B, I.level, I.pos); }

HaarSymbol project(const HaarSymbol& B, const DyadicIndex& I) {
    check_haar(B);
    check_index(B.cfg, I);
    HaarSymbol P = zero_haar(B.cfg, B.rows(), B.cols());
    for (const DyadicIndex& J : enumerate_intervals(B.cfg))
        if (contains(I, J)) P.coeffs[interval_rank(J)] = B.coeffs[interval_rank(J)];
    return P;
}

HaarSymbol truncate(const HaarSymbol& B, int k) {
    check_haar(B);
    if (k < 0 || k > B.cfg.depth)
        throw std::invalid_argument("truncate level must lie in [0, depth]");
    HaarSymbol E = zero_haar(B.cfg, B.rows(), B.cols());
    for (const DyadicIndex& J : enumerate_intervals(B.cfg))
        if (J.level < k) E.coeffs[interval_rank(J)] = B.coeffs[interval_rank(J)];
    return E;
}

StepSymbol adjoint_symbol(const StepSymbol& B) {
    check_step(B);
    StepSymbol A = B;
    for (Mat& m : A.cells) m = m.adjoint().eval();
    return A;
}

HaarSymbol adjoint_symbol(const HaarSymbol& B) {
    check_haar(B);
    HaarSymbol A = B;
    A.mean = B.mean.adjoint();
    for (Mat& m : A.coeffs) m = m.adjoint().eval();
    return A;
}

HaarSymbol column_embed(const HaarSymbol& b) {
    check_haar(b);
    if (b.cols() != 1 || b.rows() != b.cfg.dim)
        throw std::invalid_argument("column_embed expects an n x 1 vector symbol");
    const int n = b.cfg.dim;
    HaarSymbol B = zero_haar(b.cfg, n, n);
    B.mean.col(0) = b.mean.col(0);
    for (std::size_t i = 0; i < b.coeffs.size(); ++i) B.coeffs[i].col(0) = b.coeffs[i].col(0);
    return B;
}

HaarSymbol lincomb(Cplx a, const HaarSymbol& B, Cplx c, const HaarSymbol& F) {
    check_haar(B);
    check_haar(F);
    if (B.cfg != F.cfg || B.rows() != F.rows() || B.cols() != F.cols())
        throw std::invalid_argument("lincomb needs matching configs and shapes");
    HaarSymbol R = B;
    R.mean = a * B.mean + c * F.mean;
    for (std::size_t i = 0; i < R.coeffs.size(); ++i)
        R.coeffs[i] = a * B.coeffs[i] + c * F.coeffs[i];
    return R;
}

HaarSymbol scale(Cplx a, const HaarSymbol& B) {
    check_haar(B);
    HaarSymbol R = B;
    R.mean = a * B.mean;
    for (Mat& m : R.coeffs) m = a * m;
    return R;
}

double l2_energy(const StepSymbol& B) {
    check_step(B);
    double acc = 0.0;
    for (const Mat& m : B.cells) acc += m.squaredNorm();
    return acc * B.cfg.cell_measure();
}

double parseval_energy(const HaarSymbol& B) {
    check_haar(B);
    double acc = B.mean.squaredNorm();
    for (const Mat& m : B.coeffs) acc += m.squaredNorm();
    return acc;
}

double max_coeff_deviation(const HaarSymbol& A, const HaarSymbol& B) {
    check_haar(A);
    check_haar(B);
    if (A.cfg != B.cfg || A.rows() != B.rows() || A.cols() != B.cols())
        throw std::invalid_argument("deviation needs matching configs and shapes");
    double dev = (A.mean - B.mean).cwiseAbs().maxCoeff();
    for (std::size_t i = 0; i < A.coeffs.size(); ++i) {
        const double d = (A.coeffs[i] - B.coeffs[i]).cwiseAbs().maxCoeff();
        dev = std::max(dev, d);
    }
    return dev;
}

namespace {

HaarSymbol gaussian_with_shape(const TreeConfig& cfg, std::uint64_t seed, int rows, int cols) {
    check_config(cfg);
    GaussianStream g(derive_seed(seed, stream_tag::symbol));
    HaarSymbol B = zero_haar(cfg, rows, cols);
    for (Mat& m : B.coeffs)
        for (int c = 0; c < cols; ++c)
            for (int r = 0; r < rows; ++r) m(r, c) = g.complex_normal();
    return B;
}

}  // namespace

HaarSymbol gaussian_symbol(const TreeConfig& cfg, std::uint64_t seed) {
    return gaussian_with_shape(cfg, seed, cfg.dim, cfg.dim);
}

HaarSymbol gaussian_vector_symbol(const TreeConfig& cfg, std::uint64_t seed) {
    return gaussian_with_shape(cfg, seed, cfg.dim, 1);
}

}  // namespace opbmo
