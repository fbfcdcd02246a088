#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "errors.hpp"
#include "lattice.hpp"
#include "numeric.hpp"
#include "partition.hpp"

namespace latsum {

// One factor g of a product cutoff phi(x) = prod_j g_j(x_j).
struct Profile {
    enum class Kind { gaussian, rational };
    Kind kind = Kind::gaussian;
    double param = 1.0; // sigma for gaussian, decay exponent a for rational

    static Profile gaussian(double sigma) { return {Kind::gaussian, sigma}; }
    static Profile rational(double a) { return {Kind::rational, a}; }

    double operator()(double t) const
    {
        if (kind == Kind::gaussian)
            return std::exp(-0.5 * t * t / (param * param));
        return std::pow(1.0 + t * t, -0.5 * param);
    }

    // length scale on which g varies near the origin
    double scale() const { return kind == Kind::gaussian ? param : 1.0; }

    // t beyond which g(t) < tol; infinite for power decay
    double cut(double tol) const
    {
        if (kind == Kind::gaussian)
            return param * std::sqrt(2.0 * std::log(1.0 / tol));
        return std::numeric_limits<double>::infinity();
    }

    // int_0^inf sin(2 pi x y) g(q y) / y dy
    double full_sine(double x, double q) const
    {
        if (x == 0.0)
            return 0.0;
        double sgn = x < 0 ? -1.0 : 1.0;
        double ax = std::abs(x);
        if (kind == Kind::gaussian)
            return sgn * 0.5 * kPi * std::erf(std::sqrt(2.0) * kPi * param * ax / q);
        double beta = kTwoPi * ax / q;
        double a = param;
        if (a == 2.0)
            return sgn * 0.5 * kPi * -std::expm1(-beta);
        if (a == 4.0)
            return sgn * 0.25 * kPi * (2.0 - (2.0 + beta) * std::exp(-beta));
        return sgn * rational_phi(beta, a);
    }

    std::string describe() const
    {
        return kind == Kind::gaussian ? "gaussian(sigma=" + std::to_string(param) + ")"
                                      : "rational(a=" + std::to_string(param) + ")";
    }

    // Phi_a(beta) with Phi' = sqrt(pi)/Gamma(a/2) (s/2)^nu K_nu(s), nu=(a-1)/2
    static double rational_phi(double beta, double a)
    {
        double nu = 0.5 * (a - 1.0);
        double c = std::sqrt(kPi) / boost::math::tgamma(0.5 * a);
        auto dphi = [&](double s) {
            if (s <= 0.0)
                return nu > 0 ? c * 0.5 * boost::math::tgamma(nu) : 0.0;
            return c * std::pow(0.5 * s, nu) * boost::math::cyl_bessel_k(nu, s);
        };
        boost::math::quadrature::tanh_sinh<double> ts;
        if (beta <= 40.0)
            return ts.integrate(dphi, 0.0, beta);
        double tail = ts.integrate(dphi, beta, beta + 60.0);
        return 0.5 * kPi - tail;
    }
};

struct CutoffFunction {
    std::vector<Profile> factors;

    static CutoffFunction gaussian(int d, double sigma) { return {std::vector<Profile>(d, Profile::gaussian(sigma))}; }
    static CutoffFunction rational(int d, double a) { return {std::vector<Profile>(d, Profile::rational(a))}; }

    int dim() const { return int(factors.size()); }
    double operator()(const double* x) const
    {
        double p = 1.0;
        for (std::size_t j = 0; j < factors.size(); ++j)
            p *= factors[j](x[j]);
        return p;
    }
};

struct KernelValue {
    std::complex<double> value;
    double abs_error = 0.0;
};

enum class Atom { xi0, xi_inf };

// ---------------------------------------------------------------------------
// one-dimensional factor  f(x) = int e^{-2 pi i x y} xi(y) g(q y) / y dy
//                              = -2i I(x),  I(x) = int_0^inf sin(2 pi x y) xi(y) g(q y)/y dy
//
// For xi0 the integrand has compact support. For xi_inf we write
// xi_inf = 1 - (1 - xi_inf): the first piece has a closed form (full_sine)
// and the second is compact on [0, 2^{-1/2}]. When g decays fast enough the
// xi_inf integrand is integrated directly instead.

class FactorIntegrand {
public:
    enum class Mode { compact, full_minus_compact, zero };

    FactorIntegrand(Atom atom, Profile g, double q) : atom_(atom), g_(g), q_(q)
    {
        if (!(q > 0.0))
            throw DomainError("factor integral needs q > 0");
        double s = g.scale() / q;
        s_ = s;
        if (atom == Atom::xi0) {
            mode_ = Mode::compact;
            lo_ = kXi0Lo;
            hi_ = kXi0Hi;
            double c = g.cut(1e-300) / q;
            if (c <= lo_)
                mode_ = Mode::zero;
            hi_ = std::min(hi_, c);
        } else {
            double c = g.cut(1e-18) / q;
            if (c <= kXiInfLo) {
                mode_ = Mode::zero;
            } else if (c <= 2.0) {
                // truncate relative to the size at the start of the support so
                // the cut leaves no visible jump
                mode_ = Mode::compact;
                lo_ = kXiInfLo;
                hi_ = g.cut(std::max(1e-300, 1e-18 * g(q * kXiInfLo))) / q;
            } else {
                mode_ = Mode::full_minus_compact;
                lo_ = 0.0;
                hi_ = kXi0Hi;
            }
        }
    }

    Mode mode() const { return mode_; }
    double support_hi() const { return hi_; }
    const Profile& profile() const { return g_; }
    double q() const { return q_; }
    Atom atom() const { return atom_; }

    // rigorous bound on sup_x |I(x)|
    double sup_bound() const
    {
        if (atom_ == Atom::xi0) {
            if (mode_ == Mode::zero)
                return 0.0;
            return std::log(kXi0Hi / kXi0Lo) * g_(q_ * kXi0Lo);
        }
        double z = q_ * kXiInfLo;
        if (g_.kind == Profile::Kind::gaussian) {
            double w = 0.5 * z * z / (g_.param * g_.param);
            return 0.5 * boost::math::expint(1, w);
        }
        double a = g_.param;
        return std::min(std::pow(z, -a) / a, std::max(0.0, std::log(1.0 / z)) + 1.0 / a);
    }

    static int level_for(double x) { return std::max(6, int(std::ceil(std::log2((1.0 + std::abs(x)) / 4.0)))); }

    // I(x) using panels of width <= 2^{-level}
    double integral(double x, int level) const
    {
        if (mode_ == Mode::zero || x == 0.0)
            return 0.0;
        const Nodes& n = nodes(level);
        double w = kTwoPi * x;
        NeumaierSum s;
        std::size_t i = 0;
        for (std::size_t p = 0; p + 1 < n.panel_start.size(); ++p) {
            double acc = 0.0;
            for (; i < n.panel_start[p + 1]; ++i)
                acc += n.wr[i] * std::sin(w * n.y[i]);
            s.add(acc);
        }
        double comp = s.value();
        if (mode_ == Mode::full_minus_compact)
            return g_.full_sine(x, q_) - comp;
        return comp;
    }

    // compact part only (what gets tabulated)
    double compact_part(double x, int level) const
    {
        if (mode_ == Mode::zero)
            return 0.0;
        const Nodes& n = nodes(level);
        double w = kTwoPi * x;
        NeumaierSum s;
        std::size_t i = 0;
        for (std::size_t p = 0; p + 1 < n.panel_start.size(); ++p) {
            double acc = 0.0;
            for (; i < n.panel_start[p + 1]; ++i)
                acc += n.wr[i] * std::sin(w * n.y[i]);
            s.add(acc);
        }
        return s.value();
    }

    double full_part(double x) const
    {
        return mode_ == Mode::full_minus_compact ? g_.full_sine(x, q_) : 0.0;
    }

    // I(x) with an order-doubling error estimate
    std::pair<double, double> integral_with_error(double x) const
    {
        int k = level_for(x);
        double a = integral(x, k);
        double b = integral(x, k + 1);
        return {b, std::abs(b - a) + 4e-16 * (1.0 + std::abs(b))};
    }

private:
    struct Nodes {
        std::vector<double> y, wr;
        std::vector<std::size_t> panel_start;
    };

    double rho(double y) const
    {
        double gy = g_(q_ * y);
        if (atom_ == Atom::xi0)
            return xi0(y) * gy / y;
        if (mode_ == Mode::full_minus_compact)
            return (1.0 - xi_inf(y)) * gy / y;
        return xi_inf(y) * gy / y;
    }

    std::vector<double> breakpoints(int level) const
    {
        double w = std::ldexp(1.0, -level);
        std::vector<double> br{lo_, hi_};
        // graded points resolving g(q y) near the lower end
        double y0 = lo_;
        if (lo_ < 4.0 * s_) {
            for (double t = lo_ + 0.5 * s_; t < std::min(lo_ + 4.0 * s_, hi_); t += 0.5 * s_)
                br.push_back(t);
            y0 = lo_ + 4.0 * s_;
        }
        if (s_ < hi_)
            for (double t = std::max(y0, s_) * 1.25; t < hi_; t *= 1.25)
                br.push_back(t);
        for (double t = std::floor(lo_ / w) * w + w; t < hi_; t += w)
            br.push_back(t);
        std::sort(br.begin(), br.end());
        std::vector<double> out;
        for (double b : br) {
            if (b < lo_ || b > hi_)
                continue;
            if (!out.empty() && b - out.back() <= 1e-14 * (1.0 + b))
                continue;
            out.push_back(b);
        }
        if (out.back() < hi_)
            out.back() = hi_;
        return out;
    }

    const Nodes& nodes(int level) const
    {
        std::lock_guard<std::mutex> lock(*mutex_);
        auto it = cache_->find(level);
        if (it != cache_->end())
            return it->second;
        const GaussRule& gr = gauss30();
        Nodes n;
        std::vector<double> br = breakpoints(level);
        for (std::size_t p = 0; p + 1 < br.size(); ++p) {
            n.panel_start.push_back(n.y.size());
            double c = 0.5 * (br[p] + br[p + 1]), r = 0.5 * (br[p + 1] - br[p]);
            for (std::size_t i = 0; i < gr.x.size(); ++i) {
                double y = c + r * gr.x[i];
                double v = rho(y);
                n.y.push_back(y);
                n.wr.push_back(gr.w[i] * r * v);
            }
        }
        n.panel_start.push_back(n.y.size());
        return cache_->emplace(level, std::move(n)).first->second;
    }

    Atom atom_;
    Profile g_;
    double q_;
    double s_ = 1.0;
    Mode mode_ = Mode::compact;
    double lo_ = 0.0, hi_ = 1.0;
    std::shared_ptr<std::map<int, Nodes>> cache_ = std::make_shared<std::map<int, Nodes>>();
    std::shared_ptr<std::mutex> mutex_ = std::make_shared<std::mutex>();
};

inline KernelValue factor_value(Atom atom, const Profile& g, double q, double x)
{
    FactorIntegrand f(atom, g, q);
    auto [v, e] = f.integral_with_error(x);
    return {std::complex<double>(0.0, -2.0 * v), 2.0 * e};
}

inline KernelValue h0(double x, double q, double a)
{
    if (!(a > 1.0))
        throw DomainError("h0 needs a > 1");
    return factor_value(Atom::xi0, Profile::rational(a), q, x);
}

inline KernelValue h_inf(double x, double q, double a)
{
    if (!(a > 1.0))
        throw DomainError("h_inf needs a > 1 (the y^{-1} tail is not integrable otherwise)");
    return factor_value(Atom::xi_inf, Profile::rational(a), q, x);
}

// ---------------------------------------------------------------------------
// tabulated factor for lattice sums

struct TableOptions {
    double floor_rel = 1e-13; // stop once |I| stays below floor_rel * sup
    double x_cap = 4096.0;
    int degree = 48;
};

class FactorTable {
public:
    FactorTable(Atom atom, const Profile& g, double q, TableOptions opt = {})
        : f_(atom, g, q), opt_(opt)
    {
        bound_ = f_.sup_bound();
        if (f_.mode() == FactorIntegrand::Mode::zero || bound_ == 0.0) {
            zero_ = true;
            return;
        }
        width_ = std::min(8.0, 4.2 / f_.support_hi());
        const bool full = f_.mode() == FactorIntegrand::Mode::full_minus_compact;
        int quiet = 0;
        double sup = 0.0;
        // compact part error, measured on one node per panel
        for (int k = 0;; ++k) {
            double a = k * width_, b = a + width_;
            int level = FactorIntegrand::level_for(b);
            auto xs = Chebyshev::nodes(a, b, opt_.degree);
            std::vector<double> vals(xs.size());
            for (std::size_t i = 0; i < xs.size(); ++i)
                vals[i] = f_.compact_part(xs[i], level);
            double check = f_.compact_part(xs[0], level + 1);
            err_ = std::max(err_, std::abs(check - vals[0]));
            panels_.emplace_back(vals, a, b);
            err_ = std::max(err_, panels_.back().tail());
            // |I| on this panel, sampled at the nodes and the panel edges
            double m = std::max(std::abs(value_raw(a)), std::abs(value_raw(b * (1 - 1e-15))));
            for (std::size_t i = 0; i < xs.size(); ++i)
                m = std::max(m, std::abs(f_.full_part(xs[i]) - (full ? vals[i] : -vals[i])));
            pmax_.push_back(m);
            sup = std::max(sup, m);
            // below the quadrature noise the samples carry no information
            quiet = m <= std::max(opt_.floor_rel * sup, 2.0 * err_) ? quiet + 1 : 0;
            if (quiet >= 4 || b >= opt_.x_cap)
                break;
        }
        x_max_ = panels_.size() * width_;
        suffix_.assign(pmax_.size() + 1, 0.0);
        for (std::size_t k = pmax_.size(); k-- > 0;)
            suffix_[k] = std::max(suffix_[k + 1], pmax_[k]);
        beyond_ = pmax_.back();
        sup_ = suffix_[0];
        err_ += 1e-16 * sup_;
    }

    bool is_zero() const { return zero_; }

    // I(x); the factor itself is -2i I(x)
    double operator()(double x) const
    {
        if (zero_ || x == 0.0)
            return 0.0;
        double ax = std::abs(x);
        if (ax >= x_max_)
            return 0.0;
        double v = value_raw(ax);
        return x < 0 ? -v : v;
    }

    double sup() const { return zero_ ? 0.0 : sup_; }
    double sup_bound() const { return bound_; }
    double abs_error() const { return zero_ ? 0.0 : err_; }
    double x_max() const { return x_max_; }
    double beyond() const { return zero_ ? 0.0 : beyond_; }

    // max |I| over |x| >= X (sampled envelope, one panel of slack)
    double envelope(double X) const
    {
        if (zero_)
            return 0.0;
        std::size_t k = std::size_t(std::max(0.0, std::floor(std::abs(X) / width_)));
        if (k >= suffix_.size() - 1)
            return beyond_;
        return suffix_[k];
    }

    // smallest radius R with envelope(R) <= level
    double radius(double level) const
    {
        if (zero_)
            return 0.0;
        for (std::size_t k = 0; k + 1 < suffix_.size(); ++k)
            if (suffix_[k] <= level)
                return k * width_;
        return x_max_;
    }

    const FactorIntegrand& integrand() const { return f_; }

private:
    double value_raw(double ax) const
    {
        std::size_t k = std::min(panels_.size() - 1, std::size_t(ax / width_));
        double c = panels_[k](ax);
        if (f_.mode() == FactorIntegrand::Mode::full_minus_compact)
            return f_.full_part(ax) - c;
        return c;
    }

    FactorIntegrand f_;
    TableOptions opt_;
    bool zero_ = false;
    double width_ = 6.0;
    std::vector<Chebyshev> panels_;
    std::vector<double> pmax_, suffix_;
    double x_max_ = 0.0, sup_ = 0.0, err_ = 0.0, bound_ = 0.0, beyond_ = 0.0;
};

// ---------------------------------------------------------------------------
// d-dimensional kernels

inline Atom atom_for(std::uint32_t J, int j) { return ((J >> j) & 1u) ? Atom::xi0 : Atom::xi_inf; }

// F_J(x, q) for a product cutoff; J is a bit mask over [d].
inline KernelValue F_J(std::uint32_t J, const std::vector<double>& x, const std::vector<double>& q,
                       const CutoffFunction& cutoff)
{
    int d = int(x.size());
    if (cutoff.dim() != d || int(q.size()) != d)
        throw UnsupportedCutoff("cutoff must be a product of d one-dimensional factors");
    std::complex<double> v(1.0, 0.0);
    double err = 0.0;
    std::vector<std::pair<double, double>> parts;
    for (int j = 0; j < d; ++j) {
        KernelValue f = factor_value(atom_for(J, j), cutoff.factors[j], q[j], x[j]);
        parts.emplace_back(std::abs(f.value), f.abs_error);
        v *= f.value;
    }
    for (int j = 0; j < d; ++j) {
        double others = 1.0;
        for (int i = 0; i < d; ++i)
            if (i != j)
                others *= parts[i].first + parts[i].second;
        err += parts[j].second * others;
    }
    return {v, err};
}

inline KernelValue H_J(std::uint32_t J, const std::vector<double>& x, const std::vector<double>& q, double a)
{
    return F_J(J, x, q, CutoffFunction::rational(int(x.size()), a));
}

// Upsilon_J(q) = prod_{j in J} (1+q_j)^{-a} prod_{j not in J} log2(2 + 1/q_j) (1+q_j)^{-a}
inline double upsilon_envelope(std::uint32_t J, const std::vector<double>& q, double a)
{
    double p = 1.0;
    for (std::size_t j = 0; j < q.size(); ++j) {
        if (!(q[j] > 0.0))
            throw DomainError("upsilon_envelope needs q_j > 0");
        p *= std::pow(1.0 + q[j], -a);
        if (!((J >> j) & 1u))
            p *= std::log2(2.0 + 1.0 / q[j]);
    }
    return p;
}

// ---------------------------------------------------------------------------
// decay-bound check on a grid

struct Lemma52Report {
    double C_h0 = 0.0, C_hinf = 0.0;       // sup of the normalized ratios
    double C_h0_fine = 0.0, C_hinf_fine = 0.0; // same on the refined grid
    double change_h0 = 0.0, change_hinf = 0.0;
    double x_at_h0 = 0, q_at_h0 = 0, x_at_hinf = 0, q_at_hinf = 0;
    bool finite = false;
    bool stable = false;
    bool ok() const { return finite && stable; }
};

inline std::vector<double> log_grid(double lo, double hi, int n)
{
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = lo * std::pow(hi / lo, n == 1 ? 0.0 : double(i) / (n - 1));
    return g;
}

namespace fourier_detail {

struct Sup {
    double h0 = 0, hinf = 0, x0 = 0, q0 = 0, xi = 0, qi = 0;
};

inline Sup lemma52_sup(double a, int A, const std::vector<double>& xs, const std::vector<double>& qs)
{
    std::vector<Sup> per_q(qs.size());
    parallel_for(qs.size(), [&](std::size_t iq) {
        double q = qs[iq];
        FactorIntegrand f0(Atom::xi0, Profile::rational(a), q);
        FactorIntegrand fi(Atom::xi_inf, Profile::rational(a), q);
        double norm = std::pow(1.0 + q, a);
        double lg = std::log2(2.0 + 1.0 / q);
        Sup s;
        for (double x : xs) {
            double w = norm * std::pow(1.0 + x, A);
            int k = FactorIntegrand::level_for(x) + 1;
            double r0 = 2.0 * std::abs(f0.integral(x, k)) * w;
            double ri = 2.0 * std::abs(fi.integral(x, k)) * w / lg;
            if (r0 > s.h0) {
                s.h0 = r0;
                s.x0 = x;
                s.q0 = q;
            }
            if (ri > s.hinf) {
                s.hinf = ri;
                s.xi = x;
                s.qi = q;
            }
        }
        per_q[iq] = s;
    });
    Sup best;
    for (const Sup& s : per_q) {
        if (s.h0 > best.h0) {
            best.h0 = s.h0;
            best.x0 = s.x0;
            best.q0 = s.q0;
        }
        if (s.hinf > best.hinf) {
            best.hinf = s.hinf;
            best.xi = s.xi;
            best.qi = s.qi;
        }
    }
    return best;
}

} // namespace fourier_detail

// Sup of |h0|(1+q)^a(1+x)^A and |h_inf|(1+q)^a(1+x)^A / log2(2+1/q) over a
// log-spaced grid, then on a grid with twice the points per decade.
inline Lemma52Report verify_lemma52(double a, int A, double x_lo, double x_hi, double q_lo, double q_hi, int n)
{
    if (!(a > 1.0) || A < 1)
        throw DomainError("verify_lemma52 needs a > 1 and A >= 1");
    auto xs = log_grid(x_lo, x_hi, n);
    xs.insert(xs.begin(), 0.0);
    auto qs = log_grid(q_lo, q_hi, n);
    auto xf = log_grid(x_lo, x_hi, 2 * n - 1);
    xf.insert(xf.begin(), 0.0);
    auto qf = log_grid(q_lo, q_hi, 2 * n - 1);
    auto c = fourier_detail::lemma52_sup(a, A, xs, qs);
    auto f = fourier_detail::lemma52_sup(a, A, xf, qf);
    Lemma52Report r;
    r.C_h0 = c.h0;
    r.C_hinf = c.hinf;
    r.C_h0_fine = f.h0;
    r.C_hinf_fine = f.hinf;
    r.x_at_h0 = f.x0;
    r.q_at_h0 = f.q0;
    r.x_at_hinf = f.xi;
    r.q_at_hinf = f.qi;
    r.change_h0 = std::abs(f.h0 - c.h0) / f.h0;
    r.change_hinf = std::abs(f.hinf - c.hinf) / f.hinf;
    r.finite = std::isfinite(f.h0) && std::isfinite(f.hinf) && f.h0 > 0 && f.hinf > 0;
    r.stable = r.change_h0 <= 0.05 && r.change_hinf <= 0.05;
    return r;
}

// ---------------------------------------------------------------------------
// G = prod_j int |FT[(1+y^2)^{a/2} g_j(y)](x)| dx

struct GConstant {
    double value = 0.0;
    double abs_error = 0.0;
    std::vector<double> factors;
};

namespace fourier_detail {

inline double g_factor_l1(const Profile& g, double a, int level)
{
    if (g.kind != Profile::Kind::gaussian)
        throw UnsupportedCutoff("G constant is implemented for gaussian factors only");
    double s = g.param;
    double ymax = g.cut(1e-20) + 1.0;
    // transform decays like a gaussian of width 1/(2 pi s), with polynomial growth from a
    double xmax = (std::sqrt(2.0 * std::log(1e20)) + std::sqrt(a + 1.0)) / (kTwoPi * s) * 1.5 + 1.0;
    int ny = std::max(16, int(std::ceil(2.0 * xmax * ymax))) << level;
    // even integrand: transform is 2 int_0^Y cos(2 pi x y) (1+y^2)^{a/2} g(y) dy
    auto fhat = [&](double x) {
        return 2.0 * gl_integrate([&](double y) { return std::cos(kTwoPi * x * y) * std::pow(1.0 + y * y, 0.5 * a) * g(y); },
                                  0.0, ymax, ny);
    };
    // |fhat| has kinks at sign changes; integrate between them
    const int ns = 256;
    std::vector<double> cuts{0.0};
    double prev = fhat(0.0);
    for (int k = 1; k <= ns; ++k) {
        double x = xmax * k / ns, v = fhat(x);
        if ((prev < 0.0) != (v < 0.0) && prev != 0.0 && v != 0.0) {
            std::uintmax_t it = 60;
            auto root = boost::math::tools::toms748_solve(fhat, xmax * (k - 1) / ns, x, prev, v,
                                                          boost::math::tools::eps_tolerance<double>(50), it);
            cuts.push_back(0.5 * (root.first + root.second));
        }
        prev = v;
    }
    cuts.push_back(xmax);
    double total = 0.0;
    int per = 2 << level;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
        total += gl_integrate([&](double x) { return std::abs(fhat(x)); }, cuts[k], cuts[k + 1], per);
    return 2.0 * total;
}

} // namespace fourier_detail

inline GConstant convolution_majorant_constant(const CutoffFunction& cutoff, double a)
{
    GConstant r;
    r.value = 1.0;
    double rel = 0.0;
    for (const Profile& g : cutoff.factors) {
        double c1 = fourier_detail::g_factor_l1(g, a, 0);
        double c2 = fourier_detail::g_factor_l1(g, a, 1);
        r.factors.push_back(c2);
        r.value *= c2;
        rel += std::abs(c2 - c1) / c2 + 1e-14;
    }
    r.abs_error = rel * r.value;
    return r;
}

} // namespace latsum
