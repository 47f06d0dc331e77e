#include <cmath>
#include <numbers>

#include "doctest.h"

#include "curos/errors.hpp"
#include "curos/linalg.hpp"

using namespace curos;

TEST_CASE("thin_qr reproduces A with orthonormal Q and non-negative R diagonal") {
    Matrix A(4, 2);
    A << 1, 2, -3, 0.5, 2, 2, 0, -1;
    const auto qr = linalg::thin_qr(A);
    CHECK(qr.Q.rows() == 4);
    CHECK(qr.Q.cols() == 2);
    CHECK((qr.Q * qr.R - A).norm() < 1e-14);
    CHECK(linalg::orthonormality_defect(qr.Q) < 1e-14);
    CHECK(qr.R(1, 0) == 0.0);
    CHECK(qr.R(0, 0) >= 0.0);
    CHECK(qr.R(1, 1) >= 0.0);
    // First column norm: sqrt(1 + 9 + 4).
    CHECK(qr.R(0, 0) == doctest::Approx(std::sqrt(14.0)).epsilon(1e-14));
}

TEST_CASE("thin_qr keeps Q orthonormal for rank-deficient input") {
    Matrix A(3, 2);
    A << 1, 2, 2, 4, 3, 6;
    const auto qr = linalg::thin_qr(A);
    CHECK(linalg::orthonormality_defect(qr.Q) < 1e-14);
    CHECK((qr.Q * qr.R - A).norm() < 1e-13);
}

TEST_CASE("svd of a permuted diagonal matrix") {
    Matrix A = Matrix::Zero(3, 3);
    A(0, 1) = 2.0;
    A(1, 2) = -5.0;
    A(2, 0) = 1.0;
    const Vector sv = linalg::singular_values(A);
    CHECK(sv(0) == doctest::Approx(5.0));
    CHECK(sv(1) == doctest::Approx(2.0));
    CHECK(sv(2) == doctest::Approx(1.0));
    const auto t = linalg::svd_truncated(A, 2);
    CHECK(t.U.cols() == 2);
    CHECK(t.V.cols() == 2);
    // Best rank-2 approximation drops the sigma = 1 term.
    CHECK((A - t.U * t.sigma.asDiagonal() * t.V.transpose()).norm() == doctest::Approx(1.0));
    CHECK_THROWS_AS(linalg::svd_truncated(A, 4), ArgumentError);
    CHECK_THROWS_AS(linalg::svd_truncated(A, -1), ArgumentError);
}

TEST_CASE("pinv of a hand-computed matrix") {
    // [1 2; 3 4]^{-1} = [-2 1; 1.5 -0.5]
    Matrix A(2, 2);
    A << 1, 2, 3, 4;
    Matrix expect(2, 2);
    expect << -2, 1, 1.5, -0.5;
    CHECK((linalg::pinv(A) - expect).norm() < 1e-13);

    // Column vector: v^+ = v^T / |v|^2.
    Matrix v(3, 1);
    v << 1, 2, 2;
    CHECK((linalg::pinv(v) - v.transpose() / 9.0).norm() < 1e-15);

    // Rank-one matrix with default tolerance drops the null direction.
    Matrix R(2, 2);
    R << 1, 1, 1, 1;
    Matrix Rp = Matrix::Constant(2, 2, 0.25);
    CHECK((linalg::pinv(R) - Rp).norm() < 1e-14);
}

TEST_CASE("spectral_norm and smallest_singular_value") {
    Matrix A(3, 2);
    A << 3, 0, 0, 4, 0, 0;
    CHECK(linalg::spectral_norm(A) == doctest::Approx(4.0));
    CHECK(linalg::smallest_singular_value(A) == doctest::Approx(3.0));
    CHECK(linalg::smallest_singular_value(Matrix(A.transpose())) == 0.0);
    CHECK(linalg::spectral_norm(Matrix()) == 0.0);
    CHECK(linalg::spectral_norm(Matrix::Zero(2, 2)) == 0.0);
}

TEST_CASE("expm_skew of a plane rotation generator") {
    const double th = 0.7;
    Matrix W(2, 2);
    W << 0, -th, th, 0;
    Matrix R(2, 2);
    R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    CHECK((linalg::expm_skew(W) - R).norm() < 1e-14);

    Matrix N(2, 2);
    N << 0, 1, 1, 0;
    CHECK_THROWS_AS(linalg::expm_skew(N), ArgumentError);
}

TEST_CASE("selectors") {
    Matrix A(3, 3);
    A << 1, 2, 3, 4, 5, 6, 7, 8, 9;
    const IndexSet p({2, 0}, 3), s({1}, 3);
    Matrix rows(2, 3);
    rows << 7, 8, 9, 1, 2, 3;
    CHECK(linalg::select_rows(A, p) == rows);
    CHECK(linalg::select_cols(A, s) == Matrix(A.col(1)));
    Matrix cross(2, 1);
    cross << 8, 2;
    CHECK(linalg::select(A, p, s) == cross);
    const Matrix P = linalg::selector(p);
    CHECK(P.rows() == 3);
    CHECK(P.cols() == 2);
    CHECK(P.transpose() * A == rows);
}
