#pragma once

// Problem generators: toy matrices with prescribed spectra, the stochastic
// Burgers / Allen-Cahn / KdV equations (finite differences, Monte Carlo, KL
// random fields) and the conduction-radiation heat system.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "curos/linalg.hpp"
#include "curos/low_rank.hpp"
#include "curos/stencil_oracle.hpp"

namespace curos::models {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// ---------------------------------------------------------------- toy

enum class Decay { fast, slow };

struct ToySpec {
    Index n = 100;
    Decay decay = Decay::fast;
    std::uint64_t seed = 1;
};

// d_i = 2^-i (fast) or i^-3 (slow), i = 1..n.
Vector toy_decay(Index n, Decay decay);

// A = exp(W1) e D exp(W2)^T with W = (W~ - W~^T)/2, W~ uniform on [0, 1).
// The singular values are e d_i.
Matrix toy_matrix(const ToySpec& spec);

// ---------------------------------------------------------------- KL

struct KlModes {
    Vector lambda; // descending
    Matrix psi;    // n x d, orthonormal columns
};

Matrix se_kernel(const Vector& x, double ell);

// Leading d eigenpairs of the squared-exponential kernel matrix on the grid x.
// Each eigenvector is signed so that its largest-magnitude entry is positive.
KlModes se_kernel_kl(const Vector& x, double ell, Index d);

// ---------------------------------------------------------------- SPDEs

enum class SpdeKind { burgers, allen_cahn, kdv };

SpdeKind parse_spde_kind(const std::string& name);
std::string to_string(SpdeKind kind);

struct SpdeSpec {
    SpdeKind kind = SpdeKind::burgers;
    Index n = 101;
    Index s = 64;
    Index d = 4;
    double coeff = 2.5e-3; // nu (Burgers, Allen-Cahn) or gamma (KdV)
    double dt = 1e-3;
    double t_final = 1.0;
    double sigma = 1e-3;
    double ell = 0.0; // <= 0: 0.1 x domain length
    std::uint64_t seed = 1;

    // Reduced sizes that run in seconds.
    static SpdeSpec desk(SpdeKind kind);
    // Problem sizes of the reference study.
    static SpdeSpec reference(SpdeKind kind);

    double domain_length() const;
    double length_scale() const { return ell > 0.0 ? ell : 0.1 * domain_length(); }
    void validate() const;
};

// State: v(x_i, t; xi_j) in row i, column j.
//   Burgers     x in [0, 1], both end points are grid nodes. Row 0 follows
//               the stochastic Dirichlet data, row n-1 stays at its initial
//               value 0.
//   Allen-Cahn  periodic on [0, 2 pi), x_i = 2 pi i / n.
//   KdV         periodic on [0, 10),   x_i = 10 i / n.
class SpdeModel : public StencilOracle {
public:
    explicit SpdeModel(const SpdeSpec& spec);

    const SpdeSpec& spec() const noexcept { return spec_; }
    const Vector& grid() const noexcept { return x_; }
    double spacing() const noexcept { return h_; }
    const KlModes& kl() const noexcept { return kl_; }
    const Matrix& xi() const noexcept { return xi_; } // d x s, standard normal

    Matrix initial_full() const;
    LowRankState initial_state(Index r0) const { return LowRankState::from_matrix(initial_full(), r0); }

    // Burgers left boundary value and its time derivative for sample j.
    double boundary_value(double t, Index j) const;
    double boundary_rate(double t, Index j) const;

    Index stencil_width() const override;
    void stencil(Index i, std::vector<Index>& out) const override;

protected:
    double kernel(Index i, Index j, double t, std::span<const double> v) const override;

private:
    Index wrap(Index i) const;

    SpdeSpec spec_;
    Vector x_;
    double h_ = 0.0;
    KlModes kl_;
    Matrix xi_;
    Vector field_weights_; // sqrt(lambda) for Burgers, lambda otherwise
};

// ---------------------------------------------------------------- heat

// Diagonal scaling: c = sum(M) / sum(diag(M)), returns c diag(M).
Vector lump_mass(const Matrix& M);
Vector lump_mass(const SparseRows& M);

struct HeatSystem {
    Vector mass;     // lumped interior mass, > 0
    SparseRows K;    // K_ii
    SparseRows KB;   // K_iB
    Vector g;        // 1 on radiating interior nodes, else 0
    Matrix interior_xy; // n_i x 2 (may be empty for ingested systems)
    Matrix boundary_xy; // n_b x 2
    double eps_rad = 0.2;
    double sigma_sb = 5.67e-8;
    double T_inf = 273.0;

    Index interior_size() const noexcept { return K.rows(); }
    Index boundary_size() const noexcept { return KB.cols(); }
    void validate() const;
};

struct SyntheticHeatSpec {
    double h = 0.05;
    double x_min = -1.0, x_max = 1.0;
    double y_min = -0.75, y_max = 0.5;
    double hole_x = 0.5, hole_y = -0.25, hole_radius = 0.25;
    double k = 50.0;
    double rho = 7850.0;
    double c_p = 500.0;
};

// Structured-grid system on a rectangle with a circular hole. Grid nodes
// inside the hole are removed; interior nodes with a removed neighbour form
// the radiating cylinder surface. K is k times the negative 5-point graph
// Laplacian over the remaining nodes; the consistent mass has rho c_p h^2 / 2
// on the diagonal and rho c_p h^2 / 8 per neighbour and is lumped.
HeatSystem synthetic_heat_system(const SyntheticHeatSpec& spec = {});

// Reads M_ii, K_ii, K_iB (Matrix Market), g_i and boundary coordinates
// (whitespace-separated text, x y per line).
HeatSystem load_heat_system(const std::string& mass_mtx, const std::string& stiffness_mtx,
                            const std::string& coupling_mtx, const std::string& g_txt,
                            const std::string& boundary_xy_txt);

// Corner parameters per sample (4 x s, uniform on [273, 373]).
Matrix heat_corner_samples(Index s, std::uint64_t seed, double lo = 273.0, double hi = 373.0);

// Boundary temperatures that vary linearly along each edge of the bounding
// box of boundary_xy. Corner rows: (x_max, y_min), (x_max, y_max),
// (x_min, y_max), (x_min, y_min).
Matrix heat_boundary_temperatures(const Matrix& boundary_xy, const Matrix& corners);
// Bilinear corner interpolation over the bounding box of boundary_xy,
// evaluated at the rows of xy.
Matrix heat_bilinear_field(const Matrix& boundary_xy, const Matrix& xy, const Matrix& corners);

// dT/dt = M^{-1} (K T + K_iB T_B - eps sigma g (T^4 - T_inf^4)).
class HeatModel : public StencilOracle {
public:
    // An empty T0 starts every node at T_inf.
    HeatModel(HeatSystem sys, const Matrix& T_B, Matrix T0 = {});

    const HeatSystem& system() const noexcept { return sys_; }
    const Matrix& boundary_temperatures() const noexcept { return T_B_; }

    Matrix initial_full() const;
    LowRankState initial_state(Index r0) const;

    Index stencil_width() const override { return width_; }
    void stencil(Index i, std::vector<Index>& out) const override;

protected:
    double kernel(Index i, Index j, double t, std::span<const double> v) const override;

private:
    HeatSystem sys_;
    Matrix T_B_;
    Matrix T0_;
    Matrix forcing_; // K_iB T_B
    Index width_ = 0;
};

// Time scale rho c_p / k of the heat study.
inline double heat_time_scale(const SyntheticHeatSpec& spec = {}) { return spec.rho * spec.c_p / spec.k; }

} // namespace curos::models
