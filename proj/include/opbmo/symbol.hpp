#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "opbmo/dyadic.hpp"
#include "opbmo/rng.hpp"

namespace opbmo {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Symbol represented by its values on the 2^d cells. Cell shape is n x n for
/// operator-valued symbols, n x 1 for vector-valued ones, 1 x 1 for scalars.
struct StepSymbol {
    TreeConfig cfg;
    std::vector<Mat> cells;

    int rows() const { return cells.empty() ? 0 : static_cast<int>(cells.front().rows()); }
    int cols() const { return cells.empty() ? 0 : static_cast<int>(cells.front().cols()); }
};

/// Symbol represented by its mean m_T B plus Haar coefficients B_I at levels
/// 0..d-1, stored in breadth-first interval order.
struct HaarSymbol {
    TreeConfig cfg;
    Mat mean;
    std::vector<Mat> coeffs;

    int rows() const { return static_cast<int>(mean.rows()); }
    int cols() const { return static_cast<int>(mean.cols()); }

    const Mat& coeff(const DyadicIndex& I) const { return coeffs.at(interval_rank(I)); }
    Mat& coeff(const DyadicIndex& I) { return coeffs.at(interval_rank(I)); }

    bool is_operator_valued() const { return rows() == cfg.dim && cols() == cfg.dim; }
};

void check_step(const StepSymbol& B);
void check_haar(const HaarSymbol& B);

/// Zero symbols of the given shape.
StepSymbol zero_step(const TreeConfig& cfg, int rows, int cols);
HaarSymbol zero_haar(const TreeConfig& cfg, int rows, int cols);

/// Haar analysis: mean plus B_I = integral of B h_I, via bottom-up averages.
HaarSymbol to_haar(const StepSymbol& B);

/// Haar synthesis: B(t) = mean + sum_I B_I h_I(t).
StepSymbol to_step(const HaarSymbol& H);

/// Average of B over the dyadic interval at (level, pos); level may equal the
/// depth, in which case this is a single cell value.
Mat mean_on(const StepSymbol& B, int level, int pos);
Mat mean_on(const StepSymbol& B, const DyadicIndex& I);

/// P_I B: keeps coefficients at J inside I, drops the mean.
HaarSymbol project(const HaarSymbol& B, const DyadicIndex& I);

/// E_k B: keeps coefficients at levels < k, drops the mean.
HaarSymbol truncate(const HaarSymbol& B, int k);

StepSymbol adjoint_symbol(const StepSymbol& B);
HaarSymbol adjoint_symbol(const HaarSymbol& B);

/// Embed a vector-valued symbol b as the operator symbol with b(t) as first
/// column and zeros elsewhere: B(t)e = <e, e_1> b(t).
HaarSymbol column_embed(const HaarSymbol& b);

/// Coefficient-wise linear combination a*B + c*F (means included).
HaarSymbol lincomb(Cplx a, const HaarSymbol& B, Cplx c, const HaarSymbol& F);
HaarSymbol scale(Cplx a, const HaarSymbol& B);

/// Frobenius L^2 energy of the step symbol: integral of ||B(t)||_F^2.
double l2_energy(const StepSymbol& B);

/// ||mean||_F^2 + sum_I ||B_I||_F^2, the coefficient side of Parseval.
double parseval_energy(const HaarSymbol& B);

/// Largest coefficient-wise deviation between two same-shape Haar symbols.
double max_coeff_deviation(const HaarSymbol& A, const HaarSymbol& B);

/// Mean-zero symbol with i.i.d. standard complex Gaussian coefficient entries
/// drawn from the seeded stream (interval order breadth-first, entries
/// column-major within each coefficient).
HaarSymbol gaussian_symbol(const TreeConfig& cfg, std::uint64_t seed);

/// Same draw order, n x 1 coefficients.
HaarSymbol gaussian_vector_symbol(const TreeConfig& cfg, std::uint64_t seed);

}  // namespace opbmo
