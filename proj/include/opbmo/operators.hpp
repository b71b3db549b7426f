#pragma once

#include <optional>

#include "opbmo/symbol.hpp"

namespace opbmo {

/// Dense matrix of an operator on the discretized L^2(T, C^n). Basis blocks:
/// index 0 is the constant function chi_T, block 1+interval_rank(I) is the
/// Haar mode h_I in breadth-first order. Every builder shares this ordering.
/// Input and output coefficient spaces may have different dimensions
/// (rectangular symbols), hence separate block sizes.
struct OperatorMatrix {
    TreeConfig cfg;
    int row_block = 1;
    int col_block = 1;
    Mat m;

    int blocks() const { return cfg.cells(); }
    int rows() const { return row_block * blocks(); }
    int cols() const { return col_block * blocks(); }
};

inline int const_block() { return 0; }
inline int block_of(const DyadicIndex& I) { return 1 + interval_rank(I); }

/// Haar multiplier data: one function per interval, supported on it. The
/// optional constant_action closes the family over the constant basis mode
/// (output t -> constant_action(t)x for input chi_T x); without it the
/// constant mode maps to 0.
struct MultiplierFamily {
    TreeConfig cfg;
    std::vector<StepSymbol> phi;  // interval_rank order
    std::optional<StepSymbol> constant_action;
};

void check_family(const MultiplierFamily& fam);

/// pi_B: f -> sum_I B_I (m_I f) h_I. m_I f includes the mean of f, so the
/// constant mode acts as chi_T x -> sum_I B_I x h_I.
OperatorMatrix paraproduct_matrix(const HaarSymbol& B);

/// Delta_B: f -> sum_I B_I(f_I) chi_I/|I|. Adjoint partner of the
/// paraproduct: Delta_B = (pi_{B*})*.
OperatorMatrix delta_matrix(const HaarSymbol& B);

/// gamma_B: f -> sum_I (m_I B)(f_I) h_I; zero on the constant mode.
OperatorMatrix gamma_matrix(const HaarSymbol& B);

/// Lambda_B, built through its Haar-multiplier description with the family
/// P_I B (plus the constant-mode closure P_T B). Coincides with
/// paraproduct + delta; the equality is exercised by the verification suite.
OperatorMatrix lambda_matrix(const HaarSymbol& B);

/// M_B: pointwise multiplication by the step symbol, conjugated into Haar
/// coordinates.
OperatorMatrix multiplication_matrix(const StepSymbol& B);

/// D_{B,F}: block-diagonal, h_I x -> h_I (1/|I|) sum_{J strictly inside I}
/// B_J* F_J x; zero on the constant mode.
OperatorMatrix dbf_matrix(const HaarSymbol& B, const HaarSymbol& F);

OperatorMatrix multiplier_matrix(const MultiplierFamily& fam);

/// The three multiplier families of the paraproduct-norm equalities, each
/// carrying its natural constant-mode closure so the equalities are exact at
/// finite depth (the closure is the boundary term the truncation exposes).
MultiplierFamily family_coeff_haar(const HaarSymbol& B);    // Phi_I = B_I* h_I
MultiplierFamily family_child_projections(const HaarSymbol& B);  // Phi_I = P_{I+}B + P_{I-}B
MultiplierFamily family_gram(const HaarSymbol& B);          // Phi_I = sum_{J in I} B_J*B_J chi_J/|J|
MultiplierFamily family_lambda(const HaarSymbol& B);        // Phi_I = P_I B

struct SigmaSign;  // averaging module

/// T_sigma: sign flip per Haar block, identity on the constant mode.
OperatorMatrix martingale_matrix(const SigmaSign& sigma);

/// m_I B evaluated from the Haar expansion (mean plus ancestor terms).
Mat interval_mean(const HaarSymbol& B, const DyadicIndex& I);

/// Copy of M with the constant-mode input columns zeroed: M restricted to the
/// mean-zero subspace on the input side.
Mat mean_zero_restrict(const OperatorMatrix& M);

/// Largest singular value. Dense Hermitian eigensolve of the Gram matrix up
/// to dimension 4096; certified power-iteration bracket beyond.
double operator_norm(const Mat& M);
double operator_norm(const OperatorMatrix& M);

struct NormBracket {
    double lower = 0.0;  // rigorous: Rayleigh quotient of the final iterate
    double upper = 0.0;  // rigorous: Hermitian row-sum bound after squaring
    double value = 0.0;  // converged power-iteration estimate
};

/// Randomized power iteration on the Gram matrix, Rayleigh tolerance 1e-8,
/// with a certified two-sided bracket around the true norm.
NormBracket power_norm_bracket(const Mat& M);

}  // namespace opbmo
