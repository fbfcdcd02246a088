#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

namespace latsum {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTwoPi = 2.0 * kPi;

// ---------------------------------------------------------------------------
// double-double arithmetic (about 32 significant digits)

struct DD {
    double hi = 0.0;
    double lo = 0.0;

    constexpr DD() = default;
    constexpr DD(double h) : hi(h), lo(0.0) {}
    constexpr DD(double h, double l) : hi(h), lo(l) {}

    double to_double() const { return hi + lo; }
};

namespace dd_detail {

inline DD quick_two_sum(double a, double b)
{
    double s = a + b;
    return {s, b - (s - a)};
}

inline DD two_sum(double a, double b)
{
    double s = a + b;
    double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline DD two_prod(double a, double b)
{
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

} // namespace dd_detail

inline DD operator+(DD a, DD b)
{
    DD s = dd_detail::two_sum(a.hi, b.hi);
    DD t = dd_detail::two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = dd_detail::quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return dd_detail::quick_two_sum(s.hi, s.lo);
}

inline DD operator-(DD a) { return {-a.hi, -a.lo}; }
inline DD operator-(DD a, DD b) { return a + (-b); }

inline DD operator*(DD a, DD b)
{
    DD p = dd_detail::two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return dd_detail::quick_two_sum(p.hi, p.lo);
}

inline DD operator/(DD a, DD b)
{
    double q1 = a.hi / b.hi;
    DD r = a - b * DD(q1);
    double q2 = r.hi / b.hi;
    r = r - b * DD(q2);
    double q3 = r.hi / b.hi;
    DD q = dd_detail::quick_two_sum(q1, q2);
    return q + DD(q3);
}

inline bool operator<(DD a, DD b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator==(DD a, DD b) { return a.hi == b.hi && a.lo == b.lo; }

inline DD dd_abs(DD a) { return a.hi < 0.0 ? -a : a; }

inline DD dd_floor(DD a)
{
    double h = std::floor(a.hi);
    if (h == a.hi) {
        return dd_detail::quick_two_sum(h, std::floor(a.lo));
    }
    return {h, 0.0};
}

inline DD dd_round(DD a) { return dd_floor(a + DD(0.5)); }

inline DD dd_sqrt(DD a)
{
    if (a.hi < 0.0)
        throw std::domain_error("sqrt of negative value");
    if (a.hi == 0.0)
        return {};
    double x = std::sqrt(a.hi);
    DD xx(x);
    return xx + (a - xx * xx) / DD(2.0 * x);
}

inline DD dd_cbrt(DD a)
{
    double x = std::cbrt(a.hi);
    DD y(x);
    for (int it = 0; it < 2; ++it)
        y = y - (y * y * y - a) / (DD(3.0) * y * y);
    return y;
}

// Parses a plain decimal literal such as "-1.41421356" or "2.5e-3".
inline DD dd_from_string(std::string_view s)
{
    std::size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
        neg = s[i] == '-';
        ++i;
    }
    DD v;
    int frac_digits = 0;
    bool seen_point = false, any = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c >= '0' && c <= '9') {
            v = v * DD(10.0) + DD(double(c - '0'));
            if (seen_point)
                ++frac_digits;
            any = true;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else if (c == '_' || c == '\'') {
            continue;
        } else {
            break;
        }
    }
    int exp10 = 0;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        std::size_t pos = 0;
        exp10 = std::stoi(std::string(s.substr(i)), &pos);
        i += pos;
    }
    if (!any || i != s.size())
        throw std::invalid_argument("malformed decimal literal: " + std::string(s));
    int e = exp10 - frac_digits;
    DD p(1.0);
    for (int k = 0; k < std::abs(e); ++k)
        p = p * DD(10.0);
    v = e >= 0 ? v * p : v / p;
    return neg ? -v : v;
}

// Number of significant digits in a decimal literal.
inline int significant_digits(std::string_view s)
{
    int n = 0;
    bool leading = true;
    for (char c : s) {
        if (c == 'e' || c == 'E')
            break;
        if (c < '0' || c > '9')
            continue;
        if (leading && c == '0')
            continue;
        leading = false;
        ++n;
    }
    return n;
}

// ---------------------------------------------------------------------------
// compensated summation

class NeumaierSum {
public:
    void add(double x)
    {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class ComplexSum {
public:
    void add(std::complex<double> z)
    {
        re_.add(z.real());
        im_.add(z.imag());
    }
    std::complex<double> value() const { return {re_.value(), im_.value()}; }

private:
    NeumaierSum re_, im_;
};

// ---------------------------------------------------------------------------
// Gauss–Legendre panels

struct GaussRule {
    std::vector<double> x; // nodes on [-1, 1]
    std::vector<double> w;
};

inline const GaussRule& gauss30()
{
    static const GaussRule rule = [] {
        using G = boost::math::quadrature::gauss<double, 30>;
        GaussRule r;
        const auto& a = G::abscissa();
        const auto& w = G::weights();
        for (std::size_t i = a.size(); i-- > 0;) {
            if (a[i] == 0.0)
                continue;
            r.x.push_back(-a[i]);
            r.w.push_back(w[i]);
        }
        for (std::size_t i = 0; i < a.size(); ++i) {
            r.x.push_back(a[i]);
            r.w.push_back(w[i]);
        }
        return r;
    }();
    return rule;
}

// Integrates f over [a, b] split into n equal panels.
template <class F>
double gl_integrate(F&& f, double a, double b, int n)
{
    const GaussRule& g = gauss30();
    double h = (b - a) / n;
    NeumaierSum s;
    for (int k = 0; k < n; ++k) {
        double c = a + (k + 0.5) * h, r = 0.5 * h;
        double p = 0.0;
        for (std::size_t i = 0; i < g.x.size(); ++i)
            p += g.w[i] * f(c + r * g.x[i]);
        s.add(p * r);
    }
    return s.value();
}

// ---------------------------------------------------------------------------
// Chebyshev interpolation on an interval

class Chebyshev {
public:
    Chebyshev() = default;

    template <class F>
    Chebyshev(F&& f, double a, double b, int degree) : a_(a), b_(b)
    {
        std::vector<double> v(nodes(a, b, degree).size());
        auto xs = nodes(a, b, degree);
        for (std::size_t i = 0; i < xs.size(); ++i)
            v[i] = f(xs[i]);
        fit(v);
    }

    Chebyshev(const std::vector<double>& values, double a, double b) : a_(a), b_(b) { fit(values); }

    static std::vector<double> nodes(double a, double b, int degree)
    {
        std::vector<double> x(degree + 1);
        for (int k = 0; k <= degree; ++k) {
            double t = std::cos(kPi * (k + 0.5) / (degree + 1));
            x[k] = 0.5 * (a + b) + 0.5 * (b - a) * t;
        }
        return x;
    }

    double operator()(double x) const
    {
        double t = (2.0 * x - a_ - b_) / (b_ - a_);
        double b1 = 0.0, b2 = 0.0;
        for (std::size_t k = c_.size(); k-- > 1;) {
            double b0 = 2.0 * t * b1 - b2 + c_[k];
            b2 = b1;
            b1 = b0;
        }
        return t * b1 - b2 + c_[0];
    }

    // magnitude of the trailing coefficients, used as an error estimate
    double tail() const
    {
        std::size_t n = c_.size();
        if (n < 4)
            return 0.0;
        return std::abs(c_[n - 1]) + std::abs(c_[n - 2]) + std::abs(c_[n - 3]);
    }

    double abs_sum() const
    {
        double s = 0.0;
        for (double c : c_)
            s += std::abs(c);
        return s;
    }

    const std::vector<double>& coefficients() const { return c_; }

private:
    void fit(const std::vector<double>& v)
    {
        int n = int(v.size());
        c_.assign(n, 0.0);
        for (int j = 0; j < n; ++j) {
            NeumaierSum s;
            for (int k = 0; k < n; ++k)
                s.add(v[k] * std::cos(kPi * j * (k + 0.5) / n));
            c_[j] = s.value() * (j == 0 ? 1.0 : 2.0) / n;
        }
    }

    double a_ = 0.0, b_ = 1.0;
    std::vector<double> c_;
};

// ---------------------------------------------------------------------------
// threading

inline int default_thread_count()
{
    if (const char* env = std::getenv("LATSUM_THREADS")) {
        int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

inline int& thread_count_setting()
{
    static int n = default_thread_count();
    return n;
}

inline void set_thread_count(int n) { thread_count_setting() = std::max(1, n); }
inline int thread_count() { return thread_count_setting(); }

// Runs fn(i) for i in [0, n). Work is split into contiguous shards; callers
// write results per index so the reduction order never depends on scheduling.
template <class F>
void parallel_for(std::size_t n, F&& fn)
{
    int t = std::min<std::size_t>(thread_count(), std::max<std::size_t>(n, 1));
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(t);
    for (int s = 0; s < t; ++s) {
        pool.emplace_back([&, s] {
            try {
                for (std::size_t i = s; i < n; i += t)
                    fn(i);
            } catch (...) {
                errors[s] = std::current_exception();
            }
        });
    }
    for (auto& th : pool)
        th.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

inline std::complex<double> cis(double turns)
{
    // e^{2 pi i t}, argument reduced first so large t keeps accuracy
    double r = turns - std::nearbyint(turns);
    return {std::cos(kTwoPi * r), std::sin(kTwoPi * r)};
}

} // namespace latsum
