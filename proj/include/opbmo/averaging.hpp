#pragma once

#include <cstdint>

#include "opbmo/sweep.hpp"

namespace opbmo {

/// One sign pattern: a +-1 per dyadic interval, in interval-rank order.
struct SigmaSign {
    TreeConfig cfg;
    std::vector<int> signs;

    int at(const DyadicIndex& I) const { return signs.at(interval_rank(I)); }
};

void check_sigma(const SigmaSign& sigma);

/// All 2^(2^d - 1) patterns in a fixed order (pattern p sets sign -1 at rank
/// r iff bit r of p is set). Guarded: needs 2^d - 1 <= 20 signs.
std::vector<SigmaSign> enumerate_sigmas(const TreeConfig& cfg);

/// i.i.d. uniform sign patterns from a seed-derived stream.
std::vector<SigmaSign> sample_sigmas(const TreeConfig& cfg, std::uint64_t seed, int count);

/// T_sigma B = sum_I sigma_I B_I h_I. The mean is dropped: the transform
/// acts on the mean-zero class.
HaarSymbol transform_symbol(const HaarSymbol& B, const SigmaSign& sigma);

enum class AverageMode { exact, monte_carlo };

struct AverageEstimate {
    double value = 0.0;
    AverageMode mode = AverageMode::exact;
    long samples = 0;
    double stderr_est = 0.0;  // sample sd / sqrt(samples); 0 when exact
};

/// Average of (T_sigma B)*(t) (T_sigma B)(t) over sign patterns; reproduces
/// the sweep exactly in exact mode. cell_stderr, when given, receives a
/// per-cell Frobenius standard error (zeros in exact mode).
StepSymbol sweep_from_average(const HaarSymbol& B, AverageMode mode, std::uint64_t seed = 0,
                              int samples = 10000, std::vector<double>* cell_stderr = nullptr);

enum class AveragedKind { bmo_norm, bmo_mult };

/// E_sigma[ norm(T_sigma B)^2 ] for the chosen norm kind.
AverageEstimate averaged_norm_sq(const HaarSymbol& B, AveragedKind kind, AverageMode mode,
                                 std::uint64_t seed = 0, int samples = 10000);

/// Norm of the averaging operator Phi_B, computed two independent ways
/// (coefficient Gram form and cell quadrature of the projections) and checked
/// against each other within 1e-8. Equals sbmo(B).
double phi_norm(const HaarSymbol& B);

/// Energy decompositions under sign averaging, applied to a fixed mean-zero
/// vector f: the multiplication operator splits into paraproduct, adjoint
/// paraproduct, and diagonal parts, and the multiplier into the first two.
/// The three cross terms vanish under the average.
struct PythagorasReport {
    double mult_residual = 0.0;
    double lambda_residual = 0.0;
    double cross_pi_gamma = 0.0;
    double cross_gamma_delta = 0.0;
    double cross_pi_delta = 0.0;
};

PythagorasReport pythagoras_check(const HaarSymbol& B, const Vec& f);

/// Sweep-versus-average comparison: the exact L1 chain
/// ||P_I S_B||_L1 <= 2|I| E_sigma[bmo_norm(T_sigma B)^2] per interval, plus
/// the logged ratio bmo_norm(S_B) / average with one-sided policy bracket 8.
struct SweepAverageReport {
    double average_norm_sq = 0.0;
    double l1_max_ratio = 0.0;  // max_I lhs / (2|I| * average); must be <= 1
    bool l1_pass = true;
    double policy_ratio = 0.0;  // bmo_norm(S_B) / average
    bool policy_pass = true;
};

SweepAverageReport sweep_average_report(const HaarSymbol& B, AverageMode mode,
                                        std::uint64_t seed = 0, int samples = 10000);

/// Two-sided bracket for the averaged multiplier norm:
/// (1/4)(||pi_B|| + ||Delta_B||)^2 <= E_sigma[||Lambda_{T_sigma B}||^2]
/// <= (||pi_B|| + ||Delta_B||)^2, exact in enumeration mode.
struct AvcharReport {
    double average = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool pass = true;
};

AvcharReport avchar_report(const HaarSymbol& B, AverageMode mode, std::uint64_t seed = 0,
                           int samples = 10000);

}  // namespace opbmo
