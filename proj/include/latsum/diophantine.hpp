#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "numeric.hpp"

namespace latsum {

struct ThetaVector {
    std::vector<DD> components;
    std::string name;

    int d() const { return int(components.size()) + 1; }
    double operator[](std::size_t j) const { return components[j].to_double(); }
    std::vector<double> doubles() const
    {
        std::vector<double> v;
        for (const DD& c : components)
            v.push_back(c.to_double());
        return v;
    }
};

struct ApproximabilityCertificate {
    ThetaVector theta;
    double kappa = 0.0;
    std::int64_t scan_limit = 0;
    double c_hat = 0.0;
    std::int64_t argmin_m = 0;
};

inline double distance_to_integers(double x)
{
    if (!std::isfinite(x))
        throw DomainError("distance_to_integers: non-finite input");
    return std::abs(x - std::nearbyint(x));
}

inline double distance_to_integers(DD x)
{
    if (!std::isfinite(x.hi))
        throw DomainError("distance_to_integers: non-finite input");
    return dd_abs(x - dd_round(x)).to_double();
}

// <theta m> carried in double-double so that the result keeps its relative
// accuracy even when it is of order 1/m.
inline double frac_dist(DD theta, std::int64_t m)
{
    return distance_to_integers(theta * DD(double(m)));
}

// Signed offset theta*m - round(theta*m), in [-1/2, 1/2].
inline double frac_offset(DD theta, std::int64_t m)
{
    DD t = theta * DD(double(m));
    return (t - dd_round(t)).to_double();
}

inline double mult_quality(const ThetaVector& theta, std::int64_t m, double kappa)
{
    if (m <= 0)
        throw DomainError("mult_quality: m must be a positive integer");
    if (kappa < 0.0)
        throw DomainError("mult_quality: kappa must be non-negative");
    double q = double(m);
    for (const DD& t : theta.components)
        q *= frac_dist(t, m);
    return q * std::pow(double(m), kappa);
}

inline ApproximabilityCertificate certify_kappa(const ThetaVector& theta, double kappa, std::int64_t M)
{
    if (M < 1)
        throw DomainError("certify_kappa: M must be >= 1");
    if (kappa < 0.0)
        throw DomainError("certify_kappa: kappa must be non-negative");

    const std::int64_t shard = 1 << 16;
    std::size_t nshards = std::size_t((M + shard - 1) / shard);
    std::vector<std::pair<double, std::int64_t>> best(nshards);
    parallel_for(nshards, [&](std::size_t s) {
        std::int64_t lo = 1 + std::int64_t(s) * shard;
        std::int64_t hi = std::min(M, lo + shard - 1);
        double b = std::numeric_limits<double>::infinity();
        std::int64_t arg = lo;
        for (std::int64_t m = lo; m <= hi; ++m) {
            double q = mult_quality(theta, m, kappa);
            if (q < b) {
                b = q;
                arg = m;
            }
        }
        best[s] = {b, arg};
    });
    ApproximabilityCertificate cert{theta, kappa, M, best[0].first, best[0].second};
    for (std::size_t s = 1; s < nshards; ++s) {
        if (best[s].first < cert.c_hat) {
            cert.c_hat = best[s].first;
            cert.argmin_m = best[s].second;
        }
    }
    return cert;
}

struct Convergent {
    std::int64_t p;
    std::int64_t q;
    bool operator==(const Convergent&) const = default;
};

namespace cf_detail {

// Regular continued fraction driven by exact residuals e_k = x q_k - p_k, so
// the partial quotients never inherit error from repeated reciprocals.
template <class Real, class Residual, class Floor>
std::vector<Convergent> convergents(Real x, int count, double ulp, Residual residual, Floor floor_of)
{
    if (count < 1)
        throw DomainError("continued_fraction_convergents: count must be >= 1");
    std::vector<Convergent> out;
    std::int64_t a0 = floor_of(x);
    std::int64_t p_prev = 1, q_prev = 0, p = a0, q = 1;
    out.push_back({p, q});
    double e_prev = -1.0; // x*0 - 1
    double e = residual(x, p, q);
    double scale = std::max(1.0, std::abs(double(a0)) + 1.0);
    while (int(out.size()) < count) {
        if (std::abs(e) <= 4.0 * ulp * scale * double(q))
            throw PrecisionError("value is indistinguishable from " + std::to_string(p) + "/" +
                                 std::to_string(q) + " at working precision");
        double y = -e_prev / e;
        if (!(y < 9.0e15))
            throw PrecisionError("partial quotient overflow");
        std::int64_t a = std::int64_t(std::floor(y));
        std::int64_t pn = a * p + p_prev, qn = a * q + q_prev;
        if (qn > (std::int64_t(1) << 52))
            throw PrecisionError("convergent denominators exceed working precision");
        p_prev = p;
        q_prev = q;
        p = pn;
        q = qn;
        e_prev = e;
        e = residual(x, p, q);
        out.push_back({p, q});
    }
    return out;
}

} // namespace cf_detail

inline std::vector<Convergent> continued_fraction_convergents(double x, int count)
{
    if (!std::isfinite(x))
        throw DomainError("continued_fraction_convergents: non-finite input");
    return cf_detail::convergents(
        x, count, std::numeric_limits<double>::epsilon(),
        [](double v, std::int64_t p, std::int64_t q) { return std::fma(v, double(q), -double(p)); },
        [](double v) { return std::int64_t(std::floor(v)); });
}

inline std::vector<Convergent> continued_fraction_convergents(DD x, int count)
{
    return cf_detail::convergents(
        x, count, 1.0e-32,
        [](DD v, std::int64_t p, std::int64_t q) { return (v * DD(double(q)) - DD(double(p))).to_double(); },
        [](DD v) { return std::int64_t(dd_floor(v).to_double()); });
}

// True when x lies within 1e-26 of a fraction with denominator <= qmax.
inline bool looks_rational(DD x, std::int64_t qmax = 1000000)
{
    DD f = x - dd_floor(x);
    std::int64_t p_prev = 1, q_prev = 0, p = 0, q = 1;
    DD r = f;
    for (int k = 0; k < 128; ++k) {
        if (dd_abs(f * DD(double(q)) - DD(double(p))).to_double() <= 1e-26 * double(q))
            return true;
        if (r.hi == 0.0)
            return true;
        DD z = DD(1.0) / r;
        DD a = dd_floor(z);
        r = z - a;
        if (a.hi > double(qmax))
            return false;
        std::int64_t ai = std::int64_t(a.hi);
        std::int64_t pn = ai * p + p_prev, qn = ai * q + q_prev;
        if (qn > qmax)
            return false;
        p_prev = p;
        q_prev = q;
        p = pn;
        q = qn;
    }
    return false;
}

// ---------------------------------------------------------------------------
// presets

inline DD dd_golden() { return (DD(1.0) + dd_sqrt(DD(5.0))) / DD(2.0); }

inline DD dd_liouville6()
{
    DD s;
    long long fact = 1;
    for (int k = 1; k <= 6; ++k) {
        fact *= k;
        s = s + DD(std::ldexp(1.0, -int(fact)));
    }
    return s;
}

inline std::optional<DD> named_constant(const std::string& name)
{
    if (name == "sqrt2")
        return dd_sqrt(DD(2.0));
    if (name == "sqrt3")
        return dd_sqrt(DD(3.0));
    if (name == "sqrt5")
        return dd_sqrt(DD(5.0));
    if (name == "sqrt7")
        return dd_sqrt(DD(7.0));
    if (name == "golden" || name == "phi")
        return dd_golden();
    if (name == "cbrt2")
        return dd_cbrt(DD(2.0));
    if (name == "cbrt4")
        return dd_cbrt(DD(4.0));
    if (name == "cbrt3")
        return dd_cbrt(DD(3.0));
    if (name == "liouville6")
        return dd_liouville6();
    return std::nullopt;
}

inline std::vector<std::string> preset_names()
{
    return {"sqrt2", "sqrt3", "sqrt5", "golden", "cbrt2", "liouville6", "sqrt2_sqrt3", "cbrt2_cbrt4",
            "sqrt2_sqrt3_sqrt5"};
}

// A preset name is a '_'-separated list of constants, e.g. "sqrt2_sqrt3".
inline ThetaVector make_preset(const std::string& name)
{
    ThetaVector t;
    t.name = name;
    std::size_t pos = 0;
    while (pos <= name.size()) {
        std::size_t next = name.find('_', pos);
        std::string part = name.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        auto c = named_constant(part);
        if (!c)
            throw std::invalid_argument("unknown theta preset: " + name);
        t.components.push_back(*c);
        if (next == std::string::npos)
            break;
        pos = next + 1;
    }
    return t;
}

inline ThetaVector theta_from_decimals(const std::vector<std::string>& digits, const std::string& name,
                                       int min_digits = 30)
{
    if (digits.empty())
        throw std::invalid_argument("theta needs at least one component");
    ThetaVector t;
    t.name = name;
    for (const auto& s : digits) {
        if (significant_digits(s) < min_digits)
            throw std::invalid_argument("theta component '" + s + "' has fewer than " +
                                        std::to_string(min_digits) + " significant digits");
        DD v = dd_from_string(s);
        if (looks_rational(v))
            throw DomainError("theta component '" + s + "' is rational at working precision");
        t.components.push_back(v);
    }
    return t;
}

inline ThetaVector theta_from_doubles(const std::vector<double>& v, const std::string& name = "custom")
{
    ThetaVector t;
    t.name = name;
    for (double x : v)
        t.components.push_back(DD(x));
    return t;
}

} // namespace latsum
