#pragma once

#include <optional>

#include "opbmo/norms.hpp"

namespace opbmo {

/// A sweep-type object as both a step function and its Haar expansion. The
/// sweep of a depth-d symbol is constant on the half-cells of level d-1, so
/// its own coefficients occupy levels <= d-2.
struct SweepResult {
    StepSymbol step;
    HaarSymbol haar;
};

/// S_B = sum_I B_I* B_I chi_I / |I|; Hermitian nonnegative cell-wise.
SweepResult sweep(const HaarSymbol& B);

/// The sesquilinear extension: sum_I B_I* F_I chi_I / |I|. Conjugate-linear
/// in B. Checks Delta(B,F)* = Delta(F,B) internally.
SweepResult bilinear_delta(const HaarSymbol& B, const HaarSymbol& F);

/// Builds P_I Delta(B,F) four ways (full, through P_I F, restricted
/// accumulation over J inside I, and strictly inside I) and returns the
/// largest pairwise coefficient deviation.
double projected_sweep_check(const HaarSymbol& B, const HaarSymbol& F, const DyadicIndex& I);

/// Residual of pi_B* pi_B = Lambda_{S_B} + D_B on the mean-zero subspace.
double verify_sweep_identity(const HaarSymbol& B);

/// Residual of pi_B* pi_F = Lambda_{Delta(B,F)} + D_{B,F} on the mean-zero
/// subspace. Also checks ||D_{B,F}|| <= sbmo(B) sbmo(F) (slack 1e-7).
double verify_product_identity(const HaarSymbol& B, const HaarSymbol& F);

/// m-fold sweep; m = 0 returns B itself. Support shrinks one level per
/// iteration, so iterates vanish once m exceeds the depth.
SweepResult iterated_sweep(const HaarSymbol& B, int m);

/// rho(B) = max over 0 <= n <= min(N, depth) of sbmo(S^(n) B)^(1/2^n).
/// N < 0 means the default cap at the tree depth.
double rho(const HaarSymbol& B, int N = -1);

/// (bmo_mult(S_B) + sbmo(B)^2) / bmo_para(B)^2; empty for the zero symbol.
std::optional<double> mainteo_ratio(const HaarSymbol& B);

/// Checks on the bilinear sweep bounds. The sbmo bound carries constant 1
/// (its proof chain is exact at finite depth); the L1 bound carries the
/// proof constant 2 against sampled unit directions; the multiplier bound
/// uses the policy constant 8.
struct MaindeltaReport {
    double sbmo_lhs = 0.0, sbmo_rhs = 0.0;
    bool sbmo_pass = true;
    double l1_max_ratio = 0.0;  // max over I and directions of L1 / (2|I|)
    bool l1_pass = true;
    double mult_lhs = 0.0, mult_rhs = 0.0;
    bool mult_pass = true;
};

MaindeltaReport maindelta_checks(const HaarSymbol& B, const HaarSymbol& F);

}  // namespace opbmo
