#include <cmath>
#include <map>

#include "curos/errors.hpp"
#include "curos/matrix_market.hpp"
#include "curos/models.hpp"
#include "curos/rng.hpp"

namespace curos::models {

namespace {

Vector lump_from(const Vector& diag, double total) {
    const double dsum = diag.sum();
    if (dsum == 0.0) throw DegeneracyError("lump_mass: diagonal sums to zero");
    return (total / dsum) * diag;
}

} // namespace

Vector lump_mass(const Matrix& M) {
    if (M.rows() != M.cols() || M.rows() == 0) throw ArgumentError("lump_mass: matrix must be square and non-empty");
    if ((M - M.transpose()).norm() > 1e-12 * M.norm()) throw ArgumentError("lump_mass: matrix is not symmetric");
    return lump_from(M.diagonal(), M.sum());
}

Vector lump_mass(const SparseRows& M) {
    if (M.rows() != M.cols() || M.rows() == 0) throw ArgumentError("lump_mass: matrix must be square and non-empty");
    const SparseRows Mt = M.transpose();
    if ((M - Mt).norm() > 1e-12 * M.norm()) throw ArgumentError("lump_mass: matrix is not symmetric");
    return lump_from(Vector(M.diagonal()), M.sum());
}

void HeatSystem::validate() const {
    const Index ni = K.rows();
    if (K.cols() != ni || ni == 0) throw ArgumentError("HeatSystem: K_ii must be square and non-empty");
    if (mass.size() != ni || KB.rows() != ni || g.size() != ni)
        throw ArgumentError("HeatSystem: mass, K_iB and g must match the interior size");
    if (boundary_xy.size() > 0 && (boundary_xy.rows() != KB.cols() || boundary_xy.cols() != 2))
        throw ArgumentError("HeatSystem: boundary coordinates must be n_b x 2");
    for (Index i = 0; i < ni; ++i) {
        if (!(mass(i) > 0.0)) throw DegeneracyError("HeatSystem: non-positive lumped mass at node " + std::to_string(i));
        if (g(i) != 0.0 && g(i) != 1.0) throw ArgumentError("HeatSystem: g must be a 0/1 indicator");
    }
    if (!(eps_rad >= 0.0) || !(sigma_sb >= 0.0) || !(T_inf >= 0.0))
        throw ArgumentError("HeatSystem: radiation constants must be non-negative");
}

HeatSystem synthetic_heat_system(const SyntheticHeatSpec& spec) {
    if (!(spec.h > 0.0) || !(spec.x_max > spec.x_min) || !(spec.y_max > spec.y_min) || !(spec.k > 0.0) ||
        !(spec.rho > 0.0) || !(spec.c_p > 0.0) || !(spec.hole_radius >= 0.0))
        throw ArgumentError("synthetic_heat_system: invalid geometry or material");
    const Index nx = static_cast<Index>(std::llround((spec.x_max - spec.x_min) / spec.h)) + 1;
    const Index ny = static_cast<Index>(std::llround((spec.y_max - spec.y_min) / spec.h)) + 1;
    if (nx < 3 || ny < 3) throw ArgumentError("synthetic_heat_system: grid needs at least 3 x 3 nodes");

    enum Kind : char { interior, boundary, removed };
    std::vector<char> kind(static_cast<std::size_t>(nx * ny));
    std::vector<Index> id(static_cast<std::size_t>(nx * ny), -1);
    auto at = [&](Index ix, Index iy) { return static_cast<std::size_t>(iy * nx + ix); };
    auto xy = [&](Index ix, Index iy) {
        return std::pair{spec.x_min + spec.h * static_cast<double>(ix), spec.y_min + spec.h * static_cast<double>(iy)};
    };

    Index ni = 0, nb = 0;
    std::vector<std::pair<double, double>> ixy, bxy;
    for (Index iy = 0; iy < ny; ++iy)
        for (Index ix = 0; ix < nx; ++ix) {
            const auto [x, y] = xy(ix, iy);
            const double dist = std::hypot(x - spec.hole_x, y - spec.hole_y);
            char& k = kind[at(ix, iy)];
            if (ix == 0 || iy == 0 || ix == nx - 1 || iy == ny - 1) {
                k = boundary;
                id[at(ix, iy)] = nb++;
                bxy.emplace_back(x, y);
            } else if (dist < spec.hole_radius - 1e-9 * spec.h) {
                k = removed;
            } else {
                k = interior;
                id[at(ix, iy)] = ni++;
                ixy.emplace_back(x, y);
            }
        }

    const double m_diag = spec.rho * spec.c_p * spec.h * spec.h / 2.0;
    const double m_off = spec.rho * spec.c_p * spec.h * spec.h / 8.0;
    std::vector<Eigen::Triplet<double>> kt, bt, mt;
    HeatSystem sys;
    sys.g = Vector::Zero(ni);
    const Index dx[4] = {1, -1, 0, 0};
    const Index dy[4] = {0, 0, 1, -1};
    for (Index iy = 1; iy < ny - 1; ++iy)
        for (Index ix = 1; ix < nx - 1; ++ix) {
            if (kind[at(ix, iy)] != interior) continue;
            const Index i = id[at(ix, iy)];
            double deg = 0.0;
            for (int q = 0; q < 4; ++q) {
                const std::size_t nbr = at(ix + dx[q], iy + dy[q]);
                if (kind[nbr] == removed) {
                    sys.g(i) = 1.0;
                } else if (kind[nbr] == boundary) {
                    bt.emplace_back(i, id[nbr], spec.k);
                    deg += 1.0;
                } else {
                    kt.emplace_back(i, id[nbr], spec.k);
                    mt.emplace_back(i, id[nbr], m_off);
                    deg += 1.0;
                }
            }
            kt.emplace_back(i, i, -spec.k * deg);
            mt.emplace_back(i, i, m_diag);
        }

    sys.K.resize(ni, ni);
    sys.K.setFromTriplets(kt.begin(), kt.end());
    sys.KB.resize(ni, nb);
    sys.KB.setFromTriplets(bt.begin(), bt.end());
    SparseRows M(ni, ni);
    M.setFromTriplets(mt.begin(), mt.end());
    sys.mass = lump_mass(M);
    sys.interior_xy.resize(ni, 2);
    for (Index i = 0; i < ni; ++i) sys.interior_xy.row(i) << ixy[static_cast<std::size_t>(i)].first, ixy[static_cast<std::size_t>(i)].second;
    sys.boundary_xy.resize(nb, 2);
    for (Index b = 0; b < nb; ++b) sys.boundary_xy.row(b) << bxy[static_cast<std::size_t>(b)].first, bxy[static_cast<std::size_t>(b)].second;
    sys.validate();
    return sys;
}

HeatSystem load_heat_system(const std::string& mass_mtx, const std::string& stiffness_mtx,
                            const std::string& coupling_mtx, const std::string& g_txt,
                            const std::string& boundary_xy_txt) {
    HeatSystem sys;
    sys.mass = lump_mass(io::read_matrix_market(mass_mtx));
    sys.K = io::read_matrix_market(stiffness_mtx);
    sys.KB = io::read_matrix_market(coupling_mtx);
    sys.g = io::read_text_matrix(g_txt, 1).col(0);
    sys.boundary_xy = io::read_text_matrix(boundary_xy_txt, 2);
    sys.validate();
    return sys;
}

Matrix heat_corner_samples(Index s, std::uint64_t seed, double lo, double hi) {
    if (s < 1 || !(hi >= lo)) throw ArgumentError("heat_corner_samples: need s >= 1 and lo <= hi");
    Rng rng(seed);
    Matrix C(4, s);
    for (Index j = 0; j < s; ++j)
        for (Index c = 0; c < 4; ++c) C(c, j) = lo + (hi - lo) * rng.uniform();
    return C;
}

Matrix heat_bilinear_field(const Matrix& boundary_xy, const Matrix& xy, const Matrix& corners) {
    if (boundary_xy.cols() != 2 || boundary_xy.rows() == 0 || xy.cols() != 2 || corners.rows() != 4)
        throw ArgumentError("heat_bilinear_field: need n x 2 coordinates and 4 x s corners");
    const double x0 = boundary_xy.col(0).minCoeff(), x1 = boundary_xy.col(0).maxCoeff();
    const double y0 = boundary_xy.col(1).minCoeff(), y1 = boundary_xy.col(1).maxCoeff();
    if (!(x1 > x0) || !(y1 > y0)) throw ArgumentError("heat_bilinear_field: degenerate bounding box");
    Matrix T(xy.rows(), corners.cols());
    for (Index b = 0; b < xy.rows(); ++b) {
        // Bilinear in the corner values; linear along every edge of the box.
        const double a = (xy(b, 0) - x0) / (x1 - x0);
        const double c = (xy(b, 1) - y0) / (y1 - y0);
        T.row(b) = a * (1 - c) * corners.row(0) + a * c * corners.row(1) + (1 - a) * c * corners.row(2) +
                   (1 - a) * (1 - c) * corners.row(3);
    }
    return T;
}

Matrix heat_boundary_temperatures(const Matrix& boundary_xy, const Matrix& corners) {
    return heat_bilinear_field(boundary_xy, boundary_xy, corners);
}

HeatModel::HeatModel(HeatSystem sys, const Matrix& T_B, Matrix T0)
    : StencilOracle(sys.K.rows(), T_B.cols()), sys_(std::move(sys)), T_B_(T_B), T0_(std::move(T0)) {
    sys_.validate();
    if (T_B_.rows() != sys_.boundary_size() || T_B_.cols() < 1)
        throw ArgumentError("HeatModel: boundary temperatures must be n_b x s");
    if (T0_.size() > 0 && (T0_.rows() != rows() || T0_.cols() != cols()))
        throw ArgumentError("HeatModel: initial temperatures must be n_i x s");
    forcing_ = sys_.KB * T_B_;
    for (Index i = 0; i < sys_.K.rows(); ++i) {
        Index w = 1;
        for (SparseRows::InnerIterator it(sys_.K, i); it; ++it)
            if (it.col() != i) ++w;
        width_ = std::max(width_, w);
    }
}

Matrix HeatModel::initial_full() const {
    if (T0_.size() > 0) return T0_;
    return Matrix::Constant(rows(), cols(), sys_.T_inf);
}

LowRankState HeatModel::initial_state(Index r0) const { return LowRankState::from_matrix(initial_full(), r0); }

void HeatModel::stencil(Index i, std::vector<Index>& out) const {
    out.clear();
    out.push_back(i);
    for (SparseRows::InnerIterator it(sys_.K, i); it; ++it)
        if (it.col() != i) out.push_back(it.col());
}

double HeatModel::kernel(Index i, Index j, double, std::span<const double> v) const {
    // v follows stencil(i): own value first, then off-diagonal columns in
    // storage order.
    double acc = forcing_(i, j);
    std::size_t k = 1;
    for (SparseRows::InnerIterator it(sys_.K, i); it; ++it) {
        if (it.col() == i)
            acc += it.value() * v[0];
        else
            acc += it.value() * v[k++];
    }
    if (sys_.g(i) != 0.0) {
        const double T2 = v[0] * v[0];
        const double Ti2 = sys_.T_inf * sys_.T_inf;
        acc -= sys_.eps_rad * sys_.sigma_sb * sys_.g(i) * (T2 * T2 - Ti2 * Ti2);
    }
    return acc / sys_.mass(i);
}

} // namespace curos::models
