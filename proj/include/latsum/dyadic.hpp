#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "diophantine.hpp"
#include "errors.hpp"
#include "lattice.hpp"

namespace latsum {

// J is a bit mask over the first d-1 coordinates. Coordinates in J carry a
// dyadic exponent l_j >= 0; the others have l_j = 0 and are constrained only
// by the outer scale.
struct DyadicIndex {
    std::uint32_t J = 0;
    std::vector<int> L;

    bool in_J(int j) const { return (J >> j) & 1u; }
    int l1() const
    {
        int s = 0;
        for (int l : L)
            s += l;
        return s;
    }
    std::string label() const
    {
        std::string s = "J={";
        bool first = true;
        for (std::size_t j = 0; j < L.size(); ++j)
            if (in_J(int(j))) {
                s += (first ? "" : ",") + std::to_string(j + 1);
                first = false;
            }
        s += "} L=(";
        for (std::size_t j = 0; j < L.size(); ++j)
            s += (j ? "," : "") + std::to_string(L[j]);
        return s + ")";
    }
};

inline void validate_index(const DyadicIndex& idx, int d)
{
    if (int(idx.L.size()) != d - 1)
        throw std::invalid_argument("dyadic index has wrong length");
    if (d - 1 < 32 && (idx.J >> (d - 1)) != 0)
        throw std::invalid_argument("J contains coordinates beyond d-1");
    for (int j = 0; j < d - 1; ++j) {
        if (idx.L[j] < 0)
            throw std::invalid_argument("dyadic exponents must be non-negative");
        if (!idx.in_J(j) && idx.L[j] != 0)
            throw std::invalid_argument("exponent outside J must vanish");
    }
}

// All (J, L) with |L|_1 <= cap, J in increasing mask order, L lexicographic.
inline std::vector<DyadicIndex> enumerate_indices(int d, int l1_cap)
{
    std::vector<DyadicIndex> out;
    int n = d - 1;
    for (std::uint32_t J = 0; J < (1u << n); ++J) {
        std::vector<int> L(n, 0);
        auto rec = [&](auto&& self, int j, int budget) -> void {
            if (j == n) {
                out.push_back({J, L});
                return;
            }
            if (!((J >> j) & 1u)) {
                L[j] = 0;
                self(self, j + 1, budget);
                return;
            }
            for (int l = 0; l <= budget; ++l) {
                L[j] = l;
                self(self, j + 1, budget - l);
            }
            L[j] = 0;
        };
        rec(rec, 0, l1_cap);
    }
    return out;
}

inline double dyadic_eps(int l) { return std::ldexp(1.0, -l - 1); }

namespace dyadic_detail {

inline bool satisfies(const ThetaVector& theta, const std::vector<int>& L, std::int64_t m, std::uint32_t mask)
{
    for (int j = 0; j < theta.d() - 1; ++j) {
        if (!((mask >> j) & 1u))
            continue;
        if (frac_dist(theta.components[j], m) > dyadic_eps(L[j]))
            return false;
    }
    return true;
}

inline std::int64_t scan(const ThetaVector& theta, const std::vector<int>& L, std::uint32_t mask,
                         std::int64_t cap)
{
    for (std::int64_t m = 1; m <= cap; ++m)
        if (satisfies(theta, L, m, mask))
            return m;
    throw SearchCapError(cap);
}

} // namespace dyadic_detail

// Least m >= 1 with <theta_j m> <= 2^{-l_j-1} for every j.
inline std::int64_t dyadic_minimum(const ThetaVector& theta, const std::vector<int>& L,
                                   std::int64_t search_cap = 10000000)
{
    int d = theta.d();
    if (int(L.size()) != d - 1)
        throw std::invalid_argument("exponent vector has wrong length");
    if (search_cap < 1)
        throw DomainError("search_cap must be >= 1");
    for (int l : L)
        if (l < 0)
            throw std::invalid_argument("dyadic exponents must be non-negative");
    std::uint32_t all = (1u << (d - 1)) - 1u;
    if (d != 2)
        return dyadic_detail::scan(theta, L, all, search_cap);

    // The first m meeting the bound beats every smaller m, so it is a best
    // approximation of the second kind, hence a convergent denominator.
    const DD& t = theta.components[0];
    double eps = dyadic_eps(L[0]);
    if (frac_dist(t, 1) <= eps)
        return 1;
    std::vector<Convergent> cv;
    for (int n = 8;; n *= 2) {
        try {
            cv = continued_fraction_convergents(t, n);
        } catch (const PrecisionError&) {
            return dyadic_detail::scan(theta, L, all, search_cap);
        }
        for (const Convergent& c : cv) {
            if (c.q > search_cap)
                throw SearchCapError(search_cap);
            if (c.q >= 1 && frac_dist(t, c.q) <= eps)
                return c.q;
        }
    }
}

// Least m >= 1 meeting the bound on the coordinates in J only.
inline std::int64_t dyadic_minimum_J(const ThetaVector& theta, const DyadicIndex& index,
                                     std::int64_t search_cap = 10000000)
{
    validate_index(index, theta.d());
    return dyadic_detail::scan(theta, index.L, index.J, search_cap);
}

// ---------------------------------------------------------------------------
// equalizer

struct EqualizedFrame {
    std::int64_t mu = 1;
    Vec m_vec;        // (2^{-l_1-1}, ..., 2^{-l_{d-1}-1}, mu)
    double nu = 1.0;  // (prod m_vec)^{1/d}
    std::vector<double> alpha; // D = diag(2^alpha), sum alpha = 0
    int nu_pow_exponent = 0;   // nu^d = mu * 2^{nu_pow_exponent}

    double nu_pow_d() const { return std::ldexp(double(mu), nu_pow_exponent); }
    Vec D() const
    {
        Vec v(alpha.size());
        for (std::size_t j = 0; j < alpha.size(); ++j)
            v(j) = std::exp2(alpha[j]);
        return v;
    }
};

inline EqualizedFrame frame_from_mu(const std::vector<int>& L, std::int64_t mu)
{
    int d = int(L.size()) + 1;
    EqualizedFrame f;
    f.mu = mu;
    f.m_vec = Vec(d);
    int l1 = 0;
    for (int j = 0; j < d - 1; ++j) {
        f.m_vec(j) = dyadic_eps(L[j]);
        l1 += L[j];
    }
    f.m_vec(d - 1) = double(mu);
    f.nu_pow_exponent = 1 - d - l1;
    double log2nu = (std::log2(double(mu)) + f.nu_pow_exponent) / d;
    f.nu = std::exp2(log2nu);
    f.alpha.resize(d);
    for (int j = 0; j < d - 1; ++j)
        f.alpha[j] = log2nu + L[j] + 1;
    f.alpha[d - 1] = log2nu - std::log2(double(mu));
    return f;
}

inline EqualizedFrame equalized_frame(const ThetaVector& theta, const std::vector<int>& L,
                                      std::int64_t search_cap = 10000000)
{
    return frame_from_mu(L, dyadic_minimum(theta, L, search_cap));
}

struct Prop31Report {
    std::int64_t mu = 0;
    double nu = 0.0;
    double c1 = 0.0, c2 = 0.0;
    double mu_rhs = 0.0;     // c1 * 2^{|L|_1/(kappa+1)}
    double nu_d = 0.0;
    double nu_d_rhs = 0.0;   // c2 * 2^{-kappa |L|_1/(kappa+1)}
    double lambda1 = 0.0;    // first minimum of D Lambda_theta
    bool mu_bound_ok = false;
    bool nu_bound_ok = false;
    bool lambda_ok = false;
};

inline Prop31Report check_prop31(const ThetaVector& theta, double kappa, double c_kappa, const std::vector<int>& L,
                                 std::int64_t search_cap = 10000000, bool with_lambda = true)
{
    int d = theta.d();
    EqualizedFrame f = equalized_frame(theta, L, search_cap);
    int l1 = 0;
    for (int l : L)
        l1 += l;
    Prop31Report r;
    r.mu = f.mu;
    r.nu = f.nu;
    r.c1 = std::pow(c_kappa * std::ldexp(1.0, d - 1), 1.0 / (1.0 + kappa));
    r.c2 = std::pow(c_kappa * std::exp2(-(d - 1) * kappa), 1.0 / (1.0 + kappa));
    r.mu_rhs = r.c1 * std::exp2(l1 / (kappa + 1.0));
    r.nu_d = f.nu_pow_d();
    r.nu_d_rhs = r.c2 * std::exp2(-kappa * l1 / (kappa + 1.0));
    r.mu_bound_ok = double(r.mu) >= r.mu_rhs * (1 - 1e-12);
    r.nu_bound_ok = r.nu_d >= r.nu_d_rhs * (1 - 1e-12);
    if (with_lambda) {
        GenericLattice DL = GenericLattice(theta_primal_basis(theta)).scaled(f.D());
        r.lambda1 = first_minimum(DL);
        r.lambda_ok = std::abs(r.lambda1 - r.nu) <= 1e-9;
    }
    return r;
}

} // namespace latsum
