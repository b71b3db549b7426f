#pragma once

#include <initializer_list>
#include <vector>

#include "opbmo/symbol.hpp"

namespace opbmo::testutil {

/// Scalar depth-d symbol from a mean and per-interval coefficient values in
/// breadth-first order.
inline HaarSymbol scalar_symbol(int depth, double mean, std::initializer_list<double> coeffs) {
    TreeConfig cfg{depth, 1};
    HaarSymbol B = zero_haar(cfg, 1, 1);
    B.mean(0, 0) = mean;
    int r = 0;
    for (double c : coeffs) B.coeffs.at(r++)(0, 0) = c;
    return B;
}

/// Operator symbol with a single nonzero coefficient A at interval I.
inline HaarSymbol one_coeff_symbol(const TreeConfig& cfg, const DyadicIndex& I, const Mat& A) {
    HaarSymbol B = zero_haar(cfg, static_cast<int>(A.rows()), static_cast<int>(A.cols()));
    B.coeff(I) = A;
    return B;
}

inline double mat_dev(const Mat& A, const Mat& B) {
    return (A - B).cwiseAbs().maxCoeff();
}

inline Mat diag2(double a, double b) {
    Mat M = Mat::Zero(2, 2);
    M(0, 0) = a;
    M(1, 1) = b;
    return M;
}

}  // namespace opbmo::testutil
