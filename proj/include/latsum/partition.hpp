#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "dyadic.hpp"
#include "numeric.hpp"

namespace latsum {

namespace partition_detail {

inline double bump_raw(double x)
{
    double t = 1.0 - 4.0 * x * x;
    return t > 0.0 ? std::exp(-1.0 / t) : 0.0;
}

// Cumulative integral of the normalized bump on a uniform grid over
// [-1/2, 1/2]; cell integrals use 30-point Gauss-Legendre.
struct OmegaTable {
    static constexpr int N = 2048;
    double C = 0.0;
    double h = 1.0 / N;
    std::vector<double> cum; // Omega at -1/2 + i h

    OmegaTable()
    {
        std::vector<double> cell(N);
        for (int i = 0; i < N; ++i)
            cell[i] = gl_integrate(bump_raw, -0.5 + i * h, -0.5 + (i + 1) * h, 1);
        NeumaierSum total;
        for (double c : cell)
            total.add(c);
        C = 1.0 / total.value();
        cum.assign(N + 1, 0.0);
        NeumaierSum run;
        for (int i = 0; i < N; ++i) {
            run.add(cell[i] * C);
            cum[i + 1] = run.value();
        }
    }
};

inline const OmegaTable& omega_table()
{
    static const OmegaTable t;
    return t;
}

} // namespace partition_detail

inline double omega_normalization() { return partition_detail::omega_table().C; }

inline double omega(double x) { return omega_normalization() * partition_detail::bump_raw(x); }

// Omega(r) = int_{-1/2}^{r} omega, by grid value plus one quadrature panel.
// For r > 0 the symmetric complement keeps the small tail accurate.
inline double omega_cdf(double r)
{
    if (r <= -0.5)
        return 0.0;
    if (r >= 0.5)
        return 1.0;
    if (r > 0.0)
        return 1.0 - omega_cdf(-r);
    const auto& t = partition_detail::omega_table();
    int i = std::min(int((r + 0.5) / t.h), t.N - 1);
    double x0 = -0.5 + i * t.h;
    if (r <= x0)
        return t.cum[i];
    return t.cum[i] + gl_integrate(omega, x0, r, 1);
}

// Cubic Hermite interpolation of omega_cdf on the same grid.
inline double omega_cdf_interp(double r)
{
    if (r <= -0.5)
        return 0.0;
    if (r >= 0.5)
        return 1.0;
    if (r > 0.0)
        return 1.0 - omega_cdf_interp(-r);
    const auto& t = partition_detail::omega_table();
    int i = std::min(int((r + 0.5) / t.h), t.N - 1);
    double x0 = -0.5 + i * t.h;
    double s = (r - x0) / t.h;
    double y0 = t.cum[i], y1 = t.cum[i + 1];
    double m0 = omega(x0) * t.h, m1 = omega(x0 + t.h) * t.h;
    double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * m1;
}

// Smoothed indicators of [-1, 0] and [0, inf).
inline double chi0_conv_omega(double x) { return omega_cdf(x + 1.0) - omega_cdf(x); }
inline double chi_inf_conv_omega(double x) { return omega_cdf(x); }

inline double xi0(double x)
{
    if (x == 0.0)
        return 0.0;
    double ax = std::abs(x);
    return omega_cdf(std::log2(4.0 * ax)) - omega_cdf(std::log2(2.0 * ax));
}

inline double xi_inf(double x)
{
    if (x == 0.0)
        return 0.0;
    return omega_cdf(std::log2(2.0 * std::abs(x)));
}

inline double xi0_fast(double x)
{
    if (x == 0.0)
        return 0.0;
    double ax = std::abs(x);
    return omega_cdf_interp(std::log2(4.0 * ax)) - omega_cdf_interp(std::log2(2.0 * ax));
}

inline double xi_inf_fast(double x)
{
    if (x == 0.0)
        return 0.0;
    return omega_cdf_interp(std::log2(2.0 * std::abs(x)));
}

// Support of xi0 is 2^{-2.5} <= |x| <= 2^{-0.5}; xi_inf vanishes below 2^{-1.5}
// and equals one above 2^{-0.5}.
constexpr double kXi0Lo = 0.17677669529663688110021109052621; // 2^{-2.5}
constexpr double kXi0Hi = 0.70710678118654752440084436210485; // 2^{-0.5}
constexpr double kXiInfLo = 0.35355339059327376220042218105242; // 2^{-1.5}

inline double xi_J(const DyadicIndex& idx, const std::vector<double>& X)
{
    double p = 1.0;
    for (std::size_t j = 0; j < X.size(); ++j) {
        if (idx.in_J(int(j)))
            p *= xi0(std::ldexp(X[j], idx.L[j] + 1));
        else
            p *= xi_inf(2.0 * X[j]);
        if (p == 0.0)
            break;
    }
    return p;
}

struct PartitionSum {
    double sum = 0.0;
    int nonzero = 0;
    int evaluated = 0;
};

// Exponents l >= 0 for which xi0(2^{l+1} x) can be nonzero.
inline std::pair<int, int> xi0_exponent_range(double x)
{
    double lx = std::log2(std::abs(x));
    int lo = std::max(0, int(std::floor(-3.5 - lx)));
    int hi = std::max(-1, int(std::ceil(-1.5 - lx)));
    return {lo, hi};
}

// sum_{l >= 0} xi0(2^{l+1} x) + xi_inf(2x)
inline PartitionSum partition_sum_1d(double x)
{
    PartitionSum r;
    NeumaierSum s;
    auto [lo, hi] = xi0_exponent_range(x);
    for (int l = lo; l <= hi; ++l) {
        double v = xi0(std::ldexp(x, l + 1));
        ++r.evaluated;
        r.nonzero += v != 0.0;
        s.add(v);
    }
    double v = xi_inf(2.0 * x);
    ++r.evaluated;
    r.nonzero += v != 0.0;
    s.add(v);
    r.sum = s.value();
    return r;
}

// sum over J and L of xi_J(L, X), enumerating every index whose factors can
// be nonzero at X.
inline PartitionSum partition_sum(const std::vector<double>& X)
{
    int n = int(X.size());
    PartitionSum r;
    NeumaierSum s;
    std::vector<std::pair<int, int>> ranges(n);
    for (int j = 0; j < n; ++j)
        ranges[j] = xi0_exponent_range(X[j]);
    for (std::uint32_t J = 0; J < (1u << n); ++J) {
        DyadicIndex idx{J, std::vector<int>(n, 0)};
        auto rec = [&](auto&& self, int j) -> void {
            if (j == n) {
                double v = xi_J(idx, X);
                ++r.evaluated;
                r.nonzero += v != 0.0;
                s.add(v);
                return;
            }
            if (!idx.in_J(j)) {
                self(self, j + 1);
                return;
            }
            for (int l = ranges[j].first; l <= ranges[j].second; ++l) {
                idx.L[j] = l;
                self(self, j + 1);
            }
            idx.L[j] = 0;
        };
        rec(rec, 0);
    }
    r.sum = s.value();
    return r;
}

} // namespace latsum
