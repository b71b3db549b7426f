#include <cmath>

#include "doctest.h"
#include "opbmo/averaging.hpp"
#include "opbmo/operators.hpp"
#include "test_util.hpp"

using namespace opbmo;
using namespace opbmo::testutil;

TEST_CASE("basis block layout") {
    CHECK(const_block() == 0);
    CHECK(block_of({0, 0}) == 1);
    CHECK(block_of({1, 0}) == 2);
    CHECK(block_of({1, 1}) == 3);
}

TEST_CASE("depth-1 scalar operators by hand") {
    // B = h_T: paraproduct sends chi_T to h_T, the diagonal part sends h_T to
    // chi_T, and multiplication swaps the two basis functions.
    const HaarSymbol B = scalar_symbol(1, 0.0, {1.0});

    const OperatorMatrix pi = paraproduct_matrix(B);
    REQUIRE(pi.m.rows() == 2);
    Mat pi_expect = Mat::Zero(2, 2);
    pi_expect(1, 0) = 1.0;
    CHECK(mat_dev(pi.m, pi_expect) < 1e-14);

    const OperatorMatrix dl = delta_matrix(B);
    Mat dl_expect = Mat::Zero(2, 2);
    dl_expect(0, 1) = 1.0;
    CHECK(mat_dev(dl.m, dl_expect) < 1e-14);

    CHECK(gamma_matrix(B).m.cwiseAbs().maxCoeff() < 1e-14);

    const OperatorMatrix mu = multiplication_matrix(to_step(B));
    Mat mu_expect = Mat::Zero(2, 2);
    mu_expect(0, 1) = 1.0;
    mu_expect(1, 0) = 1.0;
    CHECK(mat_dev(mu.m, mu_expect) < 1e-14);

    // Nonzero mean feeds only the diagonal gamma part.
    const HaarSymbol Bm = scalar_symbol(1, 5.0, {1.0});
    Mat ga_expect = Mat::Zero(2, 2);
    ga_expect(1, 1) = 5.0;
    CHECK(mat_dev(gamma_matrix(Bm).m, ga_expect) < 1e-14);
    CHECK(mat_dev(multiplication_matrix(to_step(Bm)).m, mu_expect + 5.0 * Mat::Identity(2, 2)) <
          1e-14);
}

TEST_CASE("multiplication by the left-half indicator") {
    // chi_{[0,1/2)} = (chi_T + h_T)/2, so every matrix entry is 1/2.
    TreeConfig cfg{1, 1};
    StepSymbol ind = zero_step(cfg, 1, 1);
    ind.cells[0](0, 0) = 1.0;
    const OperatorMatrix mu = multiplication_matrix(ind);
    CHECK(mat_dev(mu.m, 0.5 * Mat::Ones(2, 2)) < 1e-14);
}

TEST_CASE("depth-2 single-coefficient example") {
    // B = 2 h_{(1,0)}: all four operator pieces have small closed forms in
    // the ordered basis chi, h_(0,0), h_(1,0), h_(1,1).
    TreeConfig cfg{2, 1};
    Mat c = Mat::Zero(1, 1);
    c(0, 0) = 2.0;
    const HaarSymbol B = one_coeff_symbol(cfg, {1, 0}, c);

    Mat pi_expect = Mat::Zero(4, 4);
    pi_expect(2, 0) = 2.0;
    pi_expect(2, 1) = 2.0;
    CHECK(mat_dev(paraproduct_matrix(B).m, pi_expect) < 1e-14);

    Mat dl_expect = Mat::Zero(4, 4);
    dl_expect(0, 2) = 2.0;
    dl_expect(1, 2) = 2.0;
    CHECK(mat_dev(delta_matrix(B).m, dl_expect) < 1e-14);

    // D_B holds the strict-descendant Gram sum 1/|I| |B_(1,0)|^2 = 4 at the
    // root block and nothing elsewhere.
    Mat d_expect = Mat::Zero(4, 4);
    d_expect(1, 1) = 4.0;
    CHECK(mat_dev(dbf_matrix(B, B).m, d_expect) < 1e-14);

    // pi* pi = Lambda_{S_B} + D_B on mean-zero inputs; the constant input
    // column carries the mean of the sweep and is excluded.
    const Mat lhs = paraproduct_matrix(B).m.adjoint() * paraproduct_matrix(B).m;
    HaarSymbol S = zero_haar(cfg, 1, 1);
    S.mean(0, 0) = 4.0;
    S.coeff({0, 0})(0, 0) = 4.0;
    OperatorMatrix rhs = lambda_matrix(S);
    rhs.m += dbf_matrix(B, B).m;
    OperatorMatrix diff = rhs;
    diff.m = lhs - rhs.m;
    CHECK(mean_zero_restrict(diff).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(mat_dev(diff.m.col(0), 4.0 * Mat::Identity(4, 4).col(0)) < 1e-13);
}

TEST_CASE("delta is the adjoint of the adjoint-symbol paraproduct") {
    TreeConfig cfg{3, 2};
    const HaarSymbol B = gaussian_symbol(cfg, 31);
    const Mat lhs = delta_matrix(B).m;
    const Mat rhs = paraproduct_matrix(adjoint_symbol(B)).m.adjoint();
    CHECK(mat_dev(lhs, rhs) < 1e-13);
}

TEST_CASE("interval means from the expansion match step averages") {
    TreeConfig cfg{3, 2};
    const HaarSymbol B = gaussian_symbol(cfg, 37);
    const StepSymbol s = to_step(B);
    for (const auto& I : enumerate_intervals(cfg))
        CHECK(mat_dev(interval_mean(B, I), mean_on(s, I)) < 1e-13);
}

TEST_CASE("family validation rejects support violations") {
    TreeConfig cfg{2, 1};
    const HaarSymbol B = gaussian_symbol(cfg, 41);
    MultiplierFamily fam = family_lambda(B);
    CHECK_NOTHROW(check_family(fam));
    // Interval (1,0) covers cells 0 and 1; a value on cell 2 is off-support.
    fam.phi[interval_rank({1, 0})].cells[2](0, 0) = 1.0;
    CHECK_THROWS_AS(check_family(fam), std::invalid_argument);
}

TEST_CASE("multiplier matrix from an explicit family") {
    // The multiplier sends f to the sum of Phi_I f_I h_I over intervals.
    TreeConfig cfg{1, 1};
    StepSymbol chi = zero_step(cfg, 1, 1);
    chi.cells[0](0, 0) = 1.0;
    chi.cells[1](0, 0) = 1.0;

    // Phi_T = h_T turns h_T into h_T^2 = chi_T.
    MultiplierFamily fam;
    fam.cfg = cfg;
    StepSymbol phi = zero_step(cfg, 1, 1);
    phi.cells[0](0, 0) = 1.0;
    phi.cells[1](0, 0) = -1.0;
    fam.phi.push_back(phi);
    Mat expect = Mat::Zero(2, 2);
    expect(0, 1) = 1.0;
    CHECK(mat_dev(multiplier_matrix(fam).m, expect) < 1e-14);

    // Phi_T = chi_T fixes h_T; the constant action chi_T then completes the
    // identity on the whole space.
    fam.phi[0] = chi;
    fam.constant_action = chi;
    CHECK(mat_dev(multiplier_matrix(fam).m, Mat::Identity(2, 2)) < 1e-14);
}

TEST_CASE("operator norm on closed-form matrices") {
    CHECK(operator_norm(Mat::Identity(5, 5)) == doctest::Approx(1.0));
    CHECK(operator_norm(diag2(3.0, 4.0)) == doctest::Approx(4.0));

    Vec u(2), v(2);
    u << 1.0, 2.0;
    v << 2.0, 1.0;
    CHECK(operator_norm(Mat(u * v.adjoint())) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("power iteration bracket encloses the dense norm") {
    GaussianStream g(99);
    Mat M(30, 30);
    for (int c = 0; c < 30; ++c)
        for (int r = 0; r < 30; ++r) M(r, c) = g.complex_normal();
    const double dense = operator_norm(M);
    const NormBracket b = power_norm_bracket(M);
    CHECK(b.lower <= dense * (1.0 + 1e-10));
    CHECK(dense <= b.upper * (1.0 + 1e-10));
    CHECK(b.value == doctest::Approx(dense).epsilon(1e-6));
}

TEST_CASE("sign transforms as block-diagonal matrices") {
    TreeConfig cfg{2, 2};
    SigmaSign sigma{cfg, {-1, 1, -1}};
    const OperatorMatrix T = martingale_matrix(sigma);
    REQUIRE(T.m.rows() == 8);
    Vec d(8);
    d << 1, 1, -1, -1, 1, 1, -1, -1;
    CHECK(mat_dev(T.m, Mat(d.asDiagonal())) < 1e-15);
}

TEST_CASE("mean-zero restriction zeroes the constant input columns") {
    TreeConfig cfg{1, 2};
    OperatorMatrix M{cfg, 2, 2, Mat::Ones(4, 4)};
    const Mat R = mean_zero_restrict(M);
    CHECK(R.leftCols(2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(mat_dev(R.rightCols(2), Mat::Ones(4, 2)) == 0.0);
}
