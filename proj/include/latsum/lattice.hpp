#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>

#include "diophantine.hpp"
#include "errors.hpp"
#include "numeric.hpp"

namespace latsum {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

constexpr int kMaxDim = 8;
inline double& point_cap()
{
    static double cap = 1e8;
    return cap;
}

class GenericLattice {
public:
    GenericLattice() = default;
    explicit GenericLattice(Mat basis) : basis_(std::move(basis))
    {
        if (basis_.rows() != basis_.cols() || basis_.rows() < 1 || basis_.rows() > kMaxDim)
            throw std::invalid_argument("lattice basis must be square with 1 <= d <= 8");
        det_ = basis_.determinant();
        if (!(std::abs(det_) > 0.0))
            throw std::invalid_argument("lattice basis is singular");
    }

    int dim() const { return int(basis_.rows()); }
    const Mat& basis() const { return basis_; }
    double determinant() const { return det_; }

    GenericLattice dual() const { return GenericLattice(basis_.inverse().transpose()); }

    GenericLattice transformed(const Mat& A) const { return GenericLattice(A * basis_); }
    GenericLattice scaled(const Vec& diag) const { return GenericLattice(diag.asDiagonal() * basis_); }

private:
    Mat basis_;
    double det_ = 1.0;
};

inline GenericLattice integer_lattice(int d) { return GenericLattice(Mat::Identity(d, d)); }

// Columns b_j = -e_j (j < d) and b_d = (theta, 1), so that the point with
// coefficients m is (theta m_d - m_1, ..., theta m_d - m_{d-1}, m_d).
inline Mat theta_primal_basis(const ThetaVector& theta)
{
    int d = theta.d();
    Mat B = Mat::Zero(d, d);
    for (int j = 0; j < d - 1; ++j) {
        B(j, j) = -1.0;
        B(j, d - 1) = theta[j];
    }
    B(d - 1, d - 1) = 1.0;
    return B;
}

// Points (n_1, ..., n_{d-1}, n_d - theta.Y).
inline Mat theta_dual_basis(const ThetaVector& theta)
{
    int d = theta.d();
    Mat B = Mat::Identity(d, d);
    for (int j = 0; j < d - 1; ++j)
        B(d - 1, j) = -theta[j];
    return B;
}

struct ThetaLattice {
    enum class Role { primal, dual };
    ThetaVector theta;
    Role role = Role::primal;

    GenericLattice generic() const
    {
        return GenericLattice(role == Role::primal ? theta_primal_basis(theta) : theta_dual_basis(theta));
    }
};

// A random lattice of determinant one: Gaussian entries, rescaled, then
// stretched by a random diagonal of total exponent zero.
template <class Rng>
GenericLattice random_unimodular(int d, Rng& rng, double skew = 1.5)
{
    std::normal_distribution<double> n01(0.0, 1.0);
    std::uniform_real_distribution<double> u(-skew, skew);
    for (;;) {
        Mat B(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                B(i, j) = n01(rng);
        double det = B.determinant();
        if (std::abs(det) < 1e-3)
            continue;
        if (det < 0)
            B.col(0) *= -1.0;
        B /= std::pow(std::abs(det), 1.0 / d);
        Vec s(d);
        double mean = 0.0;
        for (int i = 0; i < d; ++i) {
            s(i) = u(rng);
            mean += s(i) / d;
        }
        for (int i = 0; i < d; ++i)
            s(i) = std::exp2(s(i) - mean);
        B = s.asDiagonal() * B;
        return GenericLattice(B);
    }
}

// ---------------------------------------------------------------------------
// LLL reduction (delta = 0.99) with the unimodular transform, B_red = B * U

struct Reduction {
    Mat basis;
    Mat unimodular; // integer entries
};

inline Reduction lll_reduce(const Mat& B0, double delta = 0.99)
{
    int d = int(B0.cols());
    Mat B = B0;
    Mat U = Mat::Identity(d, d);
    Mat Bs(B.rows(), d);
    Mat mu = Mat::Zero(d, d);
    Vec norms(d);
    auto gram_schmidt = [&] {
        for (int i = 0; i < d; ++i) {
            Bs.col(i) = B.col(i);
            for (int j = 0; j < i; ++j) {
                mu(i, j) = B.col(i).dot(Bs.col(j)) / norms(j);
                Bs.col(i) -= mu(i, j) * Bs.col(j);
            }
            norms(i) = Bs.col(i).squaredNorm();
        }
    };
    gram_schmidt();
    int k = 1;
    int guard = 0;
    while (k < d) {
        if (++guard > 100000)
            break;
        for (int j = k - 1; j >= 0; --j) {
            double r = std::nearbyint(mu(k, j));
            if (r != 0.0) {
                B.col(k) -= r * B.col(j);
                U.col(k) -= r * U.col(j);
                gram_schmidt();
            }
        }
        if (norms(k) >= (delta - mu(k, k - 1) * mu(k, k - 1)) * norms(k - 1)) {
            ++k;
        } else {
            B.col(k).swap(B.col(k - 1));
            U.col(k).swap(U.col(k - 1));
            gram_schmidt();
            k = std::max(k - 1, 1);
        }
    }
    return {B, U};
}

// ---------------------------------------------------------------------------
// box enumeration

namespace enum_detail {

struct Plan {
    int d = 0;
    Mat B;         // reduced basis in original coordinates
    Mat U;         // reduced -> input integer coordinates
    Mat R;         // triangular factor of the scaled reduced basis
    Vec t;         // scaled center in the rotated frame
    double r2 = 0; // squared ball radius in scaled units
    double estimate = 0;
};

// In scaled coordinates the box is [-1,1]^d; every point inside lies in a
// translate of the reduced fundamental cell meeting the box, so the count is at
// most the volume of the box widened by the cell's half-extent.
inline double box_count_estimate(const Mat& reduced_scaled)
{
    double v = 1.0;
    for (int j = 0; j < reduced_scaled.rows(); ++j)
        v *= 2.0 + reduced_scaled.row(j).cwiseAbs().sum();
    return v / std::abs(reduced_scaled.determinant());
}

inline Plan make_plan(const GenericLattice& L, const Vec& center, const Vec& h)
{
    Plan p;
    p.d = L.dim();
    Vec w(p.d);
    for (int j = 0; j < p.d; ++j)
        w(j) = 1.0 / std::max(h(j), 1e-9 * (1.0 + std::abs(center(j))));
    Mat M = w.asDiagonal() * L.basis();
    Reduction red = lll_reduce(M);
    p.estimate = box_count_estimate(red.basis);
    p.U = red.unimodular;
    p.B = L.basis() * p.U;
    Eigen::HouseholderQR<Mat> qr(red.basis);
    Mat Q = qr.householderQ();
    p.R = qr.matrixQR().triangularView<Eigen::Upper>();
    p.t = Q.transpose() * (w.asDiagonal() * center);
    p.r2 = p.d * (1.0 + 1e-9);
    return p;
}

} // namespace enum_detail

// Calls visit(x, k) for every lattice point x = B k with |x - center|_inf <= h
// componentwise (closed box). x and k point at d entries. The visiting order
// is fixed by the input, not by scheduling.
template <class Visit>
void for_each_point_in_box(const GenericLattice& L, const Vec& center, const Vec& h, Visit&& visit)
{
    int d = L.dim();
    if (center.size() != d || h.size() != d)
        throw std::invalid_argument("box dimension mismatch");
    enum_detail::Plan p = enum_detail::make_plan(L, center, h);
    if (p.estimate > point_cap())
        throw ResourceError("lattice enumeration too large", point_cap(), p.estimate);
    std::array<double, kMaxDim> tol{};
    for (int j = 0; j < d; ++j)
        tol[j] = h(j) + 1e-12 * (1.0 + std::abs(center(j)) + h(j));

    std::array<std::int64_t, kMaxDim> kr{};  // reduced coordinates
    std::array<double, kMaxDim> partial{};   // squared distance accumulated above level
    std::array<double, kMaxDim * (kMaxDim + 1)> xs{}; // x partial sums per level
    std::array<double, kMaxDim * (kMaxDim + 1)> ks{}; // input-coordinate partial sums
    std::array<double, kMaxDim> x{};
    std::array<std::int64_t, kMaxDim> k{};
    double visited = 0.0;

    auto rec = [&](auto&& self, int i) -> void {
        double s = p.t(i);
        for (int j = i + 1; j < d; ++j)
            s -= p.R(i, j) * double(kr[j]);
        double c = s / p.R(i, i);
        double rem = p.r2 - (i + 1 < d ? partial[i + 1] : 0.0);
        if (rem < 0)
            return;
        double span = std::sqrt(rem) / std::abs(p.R(i, i));
        std::int64_t lo = std::int64_t(std::ceil(c - span)), hi = std::int64_t(std::floor(c + span));
        double* xin = &xs[(i + 1) * kMaxDim];
        double* kin = &ks[(i + 1) * kMaxDim];
        double* xout = &xs[i * kMaxDim];
        double* kout = &ks[i * kMaxDim];
        for (std::int64_t ki = lo; ki <= hi; ++ki) {
            kr[i] = ki;
            double dz = p.R(i, i) * (double(ki) - c);
            partial[i] = (i + 1 < d ? partial[i + 1] : 0.0) + dz * dz;
            for (int r = 0; r < d; ++r) {
                xout[r] = xin[r] + p.B(r, i) * double(ki);
                kout[r] = kin[r] + p.U(r, i) * double(ki);
            }
            if (i > 0) {
                self(self, i - 1);
                continue;
            }
            if (++visited > 8.0 * point_cap() + 1e5)
                throw ResourceError("lattice enumeration visited too many nodes", point_cap(), visited);
            bool inside = true;
            for (int r = 0; r < d && inside; ++r) {
                x[r] = xout[r];
                inside = std::abs(x[r] - center(r)) <= tol[r];
            }
            if (!inside)
                continue;
            for (int r = 0; r < d; ++r)
                k[r] = std::int64_t(std::llround(kout[r]));
            visit(x.data(), k.data());
        }
    };
    for (int r = 0; r < d; ++r)
        xs[d * kMaxDim + r] = ks[d * kMaxDim + r] = 0.0;
    rec(rec, d - 1);
}

struct LatticePoint {
    Vec x;
    std::vector<std::int64_t> k;
};

inline std::vector<LatticePoint> enumerate_points(const GenericLattice& L, double radius, const Vec& center)
{
    if (!(radius >= 0.0))
        throw DomainError("enumerate_points: radius must be non-negative");
    int d = L.dim();
    std::vector<LatticePoint> out;
    for_each_point_in_box(L, center, Vec::Constant(d, radius), [&](const double* x, const std::int64_t* k) {
        out.push_back({Eigen::Map<const Vec>(x, d), std::vector<std::int64_t>(k, k + d)});
    });
    std::sort(out.begin(), out.end(), [](const LatticePoint& a, const LatticePoint& b) { return a.k < b.k; });
    return out;
}

inline std::vector<LatticePoint> enumerate_points(const ThetaLattice& L, double radius, const Vec& center)
{
    return enumerate_points(L.generic(), radius, center);
}

inline std::int64_t count_points(const GenericLattice& L, double t, const Vec& u)
{
    if (!(t >= 0.0))
        throw DomainError("count_points: t must be non-negative");
    std::int64_t n = 0;
    for_each_point_in_box(L, u, Vec::Constant(L.dim(), t), [&](const double*, const std::int64_t*) { ++n; });
    return n;
}

// ---------------------------------------------------------------------------
// successive minima in the sup norm

struct SuccessiveMinima {
    std::vector<double> values;
    std::vector<Vec> witnesses;
};

inline SuccessiveMinima successive_minima(const GenericLattice& L)
{
    int d = L.dim();
    if (d > 5)
        throw ResourceError("successive minima limited to d <= 5", 5, d);
    for (double r = 1.0;; r *= 2.0) {
        std::vector<std::pair<double, Vec>> cand;
        for_each_point_in_box(L, Vec::Zero(d), Vec::Constant(d, r), [&](const double* x, const std::int64_t* k) {
            bool zero = true;
            for (int j = 0; j < d; ++j)
                zero = zero && k[j] == 0;
            if (zero)
                return;
            Vec v = Eigen::Map<const Vec>(x, d);
            cand.emplace_back(v.cwiseAbs().maxCoeff(), v);
        });
        std::stable_sort(cand.begin(), cand.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        SuccessiveMinima sm;
        std::vector<Vec> ortho;
        for (const auto& [n, v] : cand) {
            Vec w = v;
            for (const Vec& o : ortho)
                w -= w.dot(o) * o;
            if (w.norm() <= 1e-9 * v.norm())
                continue;
            ortho.push_back(w.normalized());
            sm.values.push_back(n);
            sm.witnesses.push_back(v);
            if (int(sm.values.size()) == d)
                return sm;
        }
    }
}

// Smallest nonzero sup norm, by growing boxes.
inline double first_minimum(const GenericLattice& L)
{
    int d = L.dim();
    for (double r = 0.25;; r *= 2.0) {
        double best = std::numeric_limits<double>::infinity();
        for_each_point_in_box(L, Vec::Zero(d), Vec::Constant(d, r), [&](const double* x, const std::int64_t* k) {
            bool zero = true;
            double n = 0.0;
            for (int j = 0; j < d; ++j) {
                zero = zero && k[j] == 0;
                n = std::max(n, std::abs(x[j]));
            }
            if (!zero)
                best = std::min(best, n);
        });
        if (best <= r)
            return best;
    }
}

struct MahlerReport {
    std::vector<double> products; // lambda_j(L) * lambda_{d-j+1}(dual)
    double lower = 0.0, upper = 0.0;
    double minkowski_product = 0.0;
    bool ok = false;
};

inline double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i)
        f *= i;
    return f;
}

inline MahlerReport mahler_check(const GenericLattice& L)
{
    int d = L.dim();
    SuccessiveMinima a = successive_minima(L);
    SuccessiveMinima b = successive_minima(L.dual());
    MahlerReport rep;
    rep.lower = 1.0 / d;
    rep.upper = factorial(d) * factorial(d);
    rep.ok = true;
    rep.minkowski_product = 1.0;
    for (int j = 0; j < d; ++j) {
        rep.minkowski_product *= a.values[j];
        double p = a.values[j] * b.values[d - 1 - j];
        rep.products.push_back(p);
        rep.ok = rep.ok && p >= rep.lower * (1 - 1e-12) && p <= rep.upper * (1 + 1e-12);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// elementary sums  f_A(nu, L, u) = sum_x (1 + nu |x - u|_inf)^{-A}

struct ElementarySum {
    double value = 0.0;      // box sum plus the continuum tail estimate
    double box_sum = 0.0;
    double radius = 0.0;
    double tail_estimate = 0.0;
    double tail_bound = 0.0; // rigorous bound on everything outside the box
    std::int64_t points = 0;
};

inline ElementarySum elementary_sum(const GenericLattice& L, double A, double nu, const Vec& u, double eps_trunc,
                                    double point_budget = 4e6)
{
    int d = L.dim();
    if (!(A > d))
        throw DomainError("divergent elementary sum (A must exceed d)");
    if (!(nu > 0.0))
        throw DomainError("elementary_sum: nu must be positive");
    double det = std::abs(L.determinant());
    double rho = lll_reduce(L.basis()).basis.cwiseAbs().colwise().maxCoeff().sum();

    boost::math::quadrature::exp_sinh<double> integrator;
    auto rigorous = [&](double R) {
        auto f = [&](double s) {
            double t = R + s;
            return std::pow(2.0 * (t + rho), d) / det * A * nu * std::pow(1.0 + nu * t, -A - 1.0);
        };
        return integrator.integrate(f);
    };

    double R = 1.0 / nu;
    while (rigorous(R) > eps_trunc && std::pow(4.0 * R, d) / det <= point_budget)
        R *= 2.0;

    ElementarySum out;
    out.radius = R;
    std::vector<double> norms;
    for_each_point_in_box(L, u, Vec::Constant(d, R), [&](const double* x, const std::int64_t*) {
        double n = 0.0;
        for (int j = 0; j < d; ++j)
            n = std::max(n, std::abs(x[j] - u(j)));
        norms.push_back(n);
    });
    std::sort(norms.begin(), norms.end());
    NeumaierSum s;
    for (double n : norms)
        s.add(std::pow(1.0 + nu * n, -A));
    out.box_sum = s.value();
    out.points = std::int64_t(norms.size());
    out.tail_bound = rigorous(R);

    // smallest norm outside the box, from a slightly larger enumeration shell
    double outer = std::numeric_limits<double>::infinity();
    double R2 = R + std::max(rho, 1e-3 * R);
    for_each_point_in_box(L, u, Vec::Constant(d, R2), [&](const double* x, const std::int64_t*) {
        double n = 0.0;
        for (int j = 0; j < d; ++j)
            n = std::max(n, std::abs(x[j] - u(j)));
        if (n > R + 1e-12 * (1 + R))
            outer = std::min(outer, n);
    });
    double inner = norms.empty() ? 0.0 : norms.back();
    double Reff = std::isfinite(outer) ? 0.5 * (inner + outer) : R;
    auto density = [&](double s) {
        double t = Reff + s;
        return d * std::pow(2.0, d) * std::pow(t, d - 1) / det * std::pow(1.0 + nu * t, -A);
    };
    out.tail_estimate = integrator.integrate(density);
    out.value = out.box_sum + out.tail_estimate;
    return out;
}

} // namespace latsum
