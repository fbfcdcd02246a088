#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "diophantine.hpp"
#include "dyadic.hpp"
#include "errors.hpp"
#include "fourier.hpp"
#include "lattice.hpp"
#include "numeric.hpp"

namespace latsum {

struct DyadicTermRecord {
    DyadicIndex index;
    std::int64_t mu = 0;
    double nu = 0.0;
    std::complex<double> value;
    double tail_bound = 0.0;
    double radius = 0.0;
    std::int64_t points = 0;
    bool skipped = false;
};

struct SumEvaluation {
    std::complex<double> value;
    double T = 0.0;
    Vec u;
    std::string method; // "direct" or "dyadic"
    double truncation_radius = 0.0;
    double tail_bound = 0.0;
    std::int64_t term_count = 0;
    double abs_sum = 0.0;
    std::vector<DyadicTermRecord> terms;
    double l1_tail_bound = 0.0;
};

namespace sums_detail {

// sum_{m > R} g(m/T) (m+1)^kappa, bounded by the integral from R for a
// decreasing summand.
inline double layer_tail(const Profile& g, double T, double R, double kappa)
{
    boost::math::quadrature::exp_sinh<double> es;
    auto f = [&](double s) {
        double m = R + s;
        return g(m / T) * std::pow(m + 1.0, kappa);
    };
    double v = es.integrate(f);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

// sum over |x| > R of g(x/T)/|x| for x in a unit-spaced sequence, both sides
inline double inner_tail(const Profile& g, double T, double R)
{
    return 2.0 * (g(R / T) / R + layer_tail(g, T, R, 0.0) / R);
}

inline double truncation_guess(const Profile& g, double T, double tol)
{
    if (g.kind == Profile::Kind::gaussian)
        return T * g.cut(tol);
    return T * std::pow(tol, -1.0 / g.param);
}

// Inner sum over one coordinate of a layer, written as
//   A(delta) = e^{2 pi i u delta} (g(delta/T)/delta + B(delta)),
//   B(delta) = sum_{0 < |n| <= N} e^{-2 pi i u n} g((delta - n)/T)/(delta - n),
// and its absolute counterpart. B is smooth on [-1/2, 1/2].
class InnerSum {
public:
    InnerSum(const Profile& g, double u, double T, std::int64_t N, bool tabulate, int degree)
        : g_(g), u_(u), T_(T), N_(N), tab_(tabulate)
    {
        if (!tab_)
            return;
        auto xs = Chebyshev::nodes(-0.5, 0.5, degree);
        std::vector<double> re(xs.size()), im(xs.size()), ab(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            auto [b, a] = direct(xs[i]);
            re[i] = b.real();
            im[i] = b.imag();
            ab[i] = a;
        }
        re_ = Chebyshev(re, -0.5, 0.5);
        im_ = Chebyshev(im, -0.5, 0.5);
        ab_ = Chebyshev(ab, -0.5, 0.5);
        err_ = re_.tail() + im_.tail() + 1e-15 * (re_.abs_sum() + im_.abs_sum());
        err_abs_ = ab_.tail() + 1e-15 * ab_.abs_sum();
    }

    std::pair<std::complex<double>, double> remainder(double delta) const
    {
        if (!tab_)
            return direct(delta);
        return {{re_(delta), im_(delta)}, ab_(delta)};
    }

    double error() const { return err_; }
    double abs_error() const { return err_abs_; }

private:
    std::pair<std::complex<double>, double> direct(double delta) const
    {
        ComplexSum s;
        NeumaierSum a;
        for (std::int64_t n = -N_; n <= N_; ++n) {
            if (n == 0)
                continue;
            double x = delta - double(n);
            double w = g_(x / T_) / x;
            s.add(cis(-u_ * double(n)) * w);
            a.add(std::abs(w));
        }
        return {s.value(), a.value()};
    }

    Profile g_;
    double u_, T_;
    std::int64_t N_;
    bool tab_;
    Chebyshev re_, im_, ab_;
    double err_ = 0.0, err_abs_ = 0.0;
};

} // namespace sums_detail

struct DirectOptions {
    double kappa = 0.0;             // exponent used in the small-denominator tail bound
    std::int64_t certify_limit = 100000;
    int tabulate = -1;              // -1 auto, 0 never, 1 always
    int cheb_degree = 40;
    double max_radius = 5e7;
    double resonance_floor = 1e-14;
};

// S(Lambda_theta, phi, u, T) = sum over x in Lambda_theta with x_d != 0 of
// e^{2 pi i u.x} / (x_1 ... x_d) phi(x / T), phi a product cutoff in x.
inline SumEvaluation direct_sum_S(const ThetaVector& theta, const CutoffFunction& phi, const Vec& u, double T,
                                  double eps_trunc, const DirectOptions& opt = {})
{
    int d = theta.d();
    if (phi.dim() != d)
        throw UnsupportedCutoff("cutoff dimension does not match theta");
    if (u.size() != d)
        throw std::invalid_argument("u has wrong dimension");
    if (!(T > 0.0))
        throw DomainError("T must be positive");
    if (!(eps_trunc > 0.0))
        throw DomainError("eps_trunc must be positive");

    SumEvaluation out;
    out.T = T;
    out.u = u;
    out.method = "direct";

    double c_hat = certify_kappa(theta, opt.kappa, opt.certify_limit).c_hat;

    // radius: start from the cutoff's own decay, grow until the bound holds
    double R = 1.0;
    for (int j = 0; j < d; ++j)
        R = std::max(R, sums_detail::truncation_guess(phi.factors[j], T, 1e-3 * eps_trunc));
    std::vector<double> H(d, 0.0), tau(d, 0.0);
    double layer_bound = 0.0;
    for (int attempt = 0;; ++attempt) {
        if (R > opt.max_radius)
            throw ResourceError("direct sum radius", opt.max_radius, R);
        double prod = 1.0;
        for (int j = 0; j < d - 1; ++j) {
            const Profile& g = phi.factors[j];
            NeumaierSum h;
            for (std::int64_t k = 0; k <= std::int64_t(R); ++k)
                h.add(g((k + 0.5) / T) / (k + 0.5));
            H[j] = 2.0 * (h.value() + sums_detail::layer_tail(g, T, std::floor(R) + 0.5, 0.0) / (R + 0.5));
            tau[j] = sums_detail::inner_tail(g, T, std::floor(R) + 0.5);
            prod *= 1.0 + 0.5 * H[j];
        }
        layer_bound = 2.0 * prod / c_hat * sums_detail::layer_tail(phi.factors[d - 1], T, std::floor(R), opt.kappa);
        double tau_max = *std::max_element(tau.begin(), tau.end() - 1 + (d == 1));
        if ((layer_bound <= 0.5 * eps_trunc && tau_max * prod * (1.0 + std::log(R + 1.0)) <= 0.5 * eps_trunc) ||
            attempt > 40)
            break;
        R *= 1.25;
    }

    std::int64_t Rd = std::int64_t(std::floor(R));
    std::int64_t N = Rd + 1;
    bool tab = opt.tabulate == 1 || (opt.tabulate == -1 && Rd > 200);
    std::vector<sums_detail::InnerSum> inner;
    for (int j = 0; j < d - 1; ++j)
        inner.emplace_back(phi.factors[j], u(j), T, N, tab, opt.cheb_degree);

    const std::int64_t shard = 4096;
    std::size_t nshards = std::size_t((2 * Rd + shard - 1) / shard);
    struct Partial {
        ComplexSum value;
        NeumaierSum abs, err;
        bool resonant = false;
        int res_j = 0;
        std::int64_t res_m = 0;
    };
    std::vector<Partial> parts(nshards);
    parallel_for(nshards, [&](std::size_t s) {
        Partial& P = parts[s];
        std::int64_t lo = std::int64_t(s) * shard;
        std::int64_t hi = std::min<std::int64_t>(2 * Rd, lo + shard);
        std::array<std::complex<double>, kMaxDim> A;
        std::array<double, kMaxDim> Aabs;
        for (std::int64_t t = lo; t < hi && !P.resonant; ++t) {
            // layers ordered -Rd..-1, 1..Rd
            std::int64_t m = t < Rd ? t - Rd : t - Rd + 1;
            double gd = phi.factors[d - 1](double(m) / T);
            if (gd == 0.0)
                continue;
            std::complex<double> term = cis(u(d - 1) * double(m)) * (gd / double(m));
            double aterm = gd / std::abs(double(m));
            for (int j = 0; j < d - 1; ++j) {
                double delta = frac_offset(theta.components[j], m);
                if (std::abs(delta) < opt.resonance_floor) {
                    P.resonant = true;
                    P.res_j = j;
                    P.res_m = m;
                    break;
                }
                auto [b, babs] = inner[j].remainder(delta);
                double g0 = phi.factors[j](delta / T);
                A[j] = cis(u(j) * delta) * (g0 / delta + b);
                Aabs[j] = g0 / std::abs(delta) + babs;
                term *= A[j];
                aterm *= Aabs[j];
            }
            if (P.resonant)
                break;
            P.value.add(term);
            P.abs.add(aterm);
            // inner truncation and table error, first order in each coordinate
            double e = 0.0;
            for (int j = 0; j < d - 1; ++j) {
                double others = 1.0;
                for (int i = 0; i < d - 1; ++i)
                    if (i != j)
                        others *= Aabs[i] + tau[i] + inner[i].abs_error();
                e += (tau[j] + inner[j].error()) * others;
            }
            P.err.add(gd / std::abs(double(m)) * e);
        }
    });
    ComplexSum total;
    NeumaierSum abs_total, err_total;
    for (auto& P : parts) {
        if (P.resonant)
            throw NearResonanceError(P.res_j, P.res_m);
        total.add(P.value.value());
        abs_total.add(P.abs.value());
        err_total.add(P.err.value());
    }
    out.value = total.value();
    out.abs_sum = abs_total.value();
    out.truncation_radius = double(Rd);
    out.tail_bound = layer_bound + err_total.value() + 1e-15 * out.abs_sum;
    double per_layer = 1.0;
    for (int j = 0; j < d - 1; ++j)
        per_layer *= double(2 * N + 1);
    out.term_count = std::int64_t(2 * Rd * per_layer);
    return out;
}

// ---------------------------------------------------------------------------
// general (not necessarily product) cutoffs, as plain functions on R^d

struct GeneralCutoff {
    std::function<double(const double*)> f;
    double support_radius = 8.0; // |argument|_inf beyond which f is negligible
};

inline GeneralCutoff as_general(const CutoffFunction& c, double tol = 1e-16)
{
    double r = 0.0;
    for (const auto& g : c.factors)
        r = std::max(r, g.kind == Profile::Kind::gaussian ? g.cut(tol) : std::pow(tol, -1.0 / g.param));
    return {[c](const double* x) { return c(x); }, r};
}

// Script-S: sum over m in Z^d, m_d != 0, of
//   e^{2 pi i u.m} / (m_d prod_l (theta_l m_d - m_l)) phi(m / T).
// Terms are cached so that many u share one pass over the box.
class ScriptSTerms {
public:
    ScriptSTerms(const ThetaVector& theta, const GeneralCutoff& phi, double T) : d_(theta.d())
    {
        std::int64_t R = std::int64_t(std::ceil(T * phi.support_radius));
        radius_ = double(R);
        std::vector<std::int64_t> m(d_, -R);
        std::vector<double> arg(d_);
        for (;;) {
            if (m[d_ - 1] != 0) {
                for (int j = 0; j < d_; ++j)
                    arg[j] = double(m[j]) / T;
                double w = phi.f(arg.data());
                if (w != 0.0) {
                    double den = double(m[d_ - 1]);
                    for (int l = 0; l < d_ - 1; ++l)
                        den *= (theta.components[l] * DD(double(m[d_ - 1])) - DD(double(m[l]))).to_double();
                    for (int j = 0; j < d_; ++j)
                        coords_.push_back(double(m[j]));
                    weights_.push_back(w / den);
                    outer_.push_back(std::any_of(m.begin(), m.end(), [&](std::int64_t v) { return std::abs(v) == R; }));
                }
            }
            int j = 0;
            while (j < d_ && ++m[j] > R) {
                m[j] = -R;
                ++j;
            }
            if (j == d_)
                break;
        }
    }

    SumEvaluation evaluate(const Vec& u, double T) const
    {
        SumEvaluation out;
        out.T = T;
        out.u = u;
        out.method = "direct";
        out.truncation_radius = radius_;
        ComplexSum s;
        NeumaierSum a, shell;
        for (std::size_t i = 0; i < weights_.size(); ++i) {
            double ph = 0.0;
            for (int j = 0; j < d_; ++j)
                ph += u(j) * coords_[i * d_ + j];
            s.add(cis(ph) * weights_[i]);
            a.add(std::abs(weights_[i]));
            if (outer_[i])
                shell.add(std::abs(weights_[i]));
        }
        out.value = s.value();
        out.abs_sum = a.value();
        out.tail_bound = shell.value();
        out.term_count = std::int64_t(weights_.size());
        return out;
    }

private:
    int d_;
    double radius_ = 0.0;
    std::vector<double> coords_, weights_;
    std::vector<char> outer_;
};

inline SumEvaluation direct_sum_script_S(const ThetaVector& theta, const GeneralCutoff& phi, const Vec& u, double T)
{
    return ScriptSTerms(theta, phi, T).evaluate(u, T);
}

// S over enumerated points x of Lambda_theta (x_d != 0) with a general
// cutoff psi evaluated at x/T. The box must contain the support of psi(./T).
class LatticeSTerms {
public:
    LatticeSTerms(const ThetaVector& theta, const GeneralCutoff& psi, double T, const Vec& half_widths)
        : d_(theta.d())
    {
        GenericLattice L(theta_primal_basis(theta));
        std::vector<double> arg(d_);
        for_each_point_in_box(L, Vec::Zero(d_), half_widths, [&](const double* x, const std::int64_t* k) {
            if (k[d_ - 1] == 0)
                return;
            for (int j = 0; j < d_; ++j)
                arg[j] = x[j] / T;
            double w = psi.f(arg.data());
            if (w == 0.0)
                return;
            double den = 1.0;
            for (int j = 0; j < d_; ++j) {
                den *= x[j];
                coords_.push_back(x[j]);
            }
            weights_.push_back(w / den);
        });
    }

    SumEvaluation evaluate(const Vec& v, double T) const
    {
        SumEvaluation out;
        out.T = T;
        out.u = v;
        out.method = "direct";
        ComplexSum s;
        NeumaierSum a;
        for (std::size_t i = 0; i < weights_.size(); ++i) {
            double ph = 0.0;
            for (int j = 0; j < d_; ++j)
                ph += v(j) * coords_[i * d_ + j];
            s.add(cis(ph) * weights_[i]);
            a.add(std::abs(weights_[i]));
        }
        out.value = s.value();
        out.abs_sum = a.value();
        out.term_count = std::int64_t(weights_.size());
        return out;
    }

private:
    int d_;
    std::vector<double> coords_, weights_;
};

// v_l = -u_l, v_d = u_d + sum_l theta_l u_l
inline Vec change_of_variables_u(const ThetaVector& theta, const Vec& u)
{
    int d = theta.d();
    Vec v(d);
    double s = u(d - 1);
    for (int l = 0; l < d - 1; ++l) {
        v(l) = -u(l);
        s += theta[l] * u(l);
    }
    v(d - 1) = s;
    return v;
}

// psi(x) = phi(theta_1 x_d - x_1, ..., theta_{d-1} x_d - x_{d-1}, x_d)
inline GeneralCutoff change_of_variables_phi(const ThetaVector& theta, const GeneralCutoff& phi)
{
    std::vector<double> th = theta.doubles();
    int d = theta.d();
    return {[th, d, f = phi.f](const double* x) {
                std::array<double, kMaxDim> m{};
                for (int l = 0; l < d - 1; ++l)
                    m[l] = th[l] * x[d - 1] - x[l];
                m[d - 1] = x[d - 1];
                return f(m.data());
            },
            phi.support_radius};
}

struct ChangeOfVariablesCheck {
    std::vector<double> residuals;
    std::vector<std::complex<double>> script_S, S;
    double max_residual = 0.0;
};

inline ChangeOfVariablesCheck check_S_equals_script_S(const ThetaVector& theta, const GeneralCutoff& phi,
                                                      const std::vector<Vec>& us, double T)
{
    int d = theta.d();
    ScriptSTerms lhs(theta, phi, T);
    double R = std::ceil(T * phi.support_radius);
    Vec h(d);
    for (int l = 0; l < d - 1; ++l)
        h(l) = (std::abs(theta[l]) + 1.0) * R + 1.0;
    h(d - 1) = R;
    LatticeSTerms rhs(theta, change_of_variables_phi(theta, phi), T, h);
    ChangeOfVariablesCheck out;
    for (const Vec& u : us) {
        auto a = lhs.evaluate(u, T).value;
        auto b = rhs.evaluate(change_of_variables_u(theta, u), T).value;
        out.script_S.push_back(a);
        out.S.push_back(b);
        out.residuals.push_back(std::abs(a - b));
        out.max_residual = std::max(out.max_residual, out.residuals.back());
    }
    return out;
}

inline double check_S_equals_script_S(const ThetaVector& theta, const GeneralCutoff& phi, const Vec& u, double T)
{
    return check_S_equals_script_S(theta, phi, std::vector<Vec>{u}, T).max_residual;
}

// ---------------------------------------------------------------------------
// lattice sums of F_J

struct LatticeKernelSum {
    KernelValue value;
    double radius = 0.0;      // max over coordinates of the truncation radius in the scaled frame
    double tail_bound = 0.0;  // truncation estimate plus propagated table error
    std::int64_t points = 0;
    bool skipped = false;
};

using FactorTablePtr = std::shared_ptr<const FactorTable>;

// sum over x in L of prod_j f_j(nu (x - u)_j), f_j = -2i I_j from the tables.
// Each coordinate is truncated where its envelope drops below eps_rel times
// its supremum; the sum over the outermost shell serves as the tail estimate.
inline LatticeKernelSum lattice_kernel_sum(const std::vector<FactorTablePtr>& tables, double nu,
                                           const GenericLattice& L, const Vec& u, double eps_rel,
                                           double skip_below = 1e-300)
{
    int d = L.dim();
    LatticeKernelSum out;
    double sup_prod = 1.0;
    for (const auto& t : tables)
        sup_prod *= t->sup_bound();
    std::vector<double> R(d);
    for (int j = 0; j < d; ++j) {
        if (tables[j]->is_zero()) {
            out.skipped = true;
            out.value = {0.0, 0.0};
            return out;
        }
        R[j] = std::max(tables[j]->radius(eps_rel * tables[j]->sup()), 1.0);
    }
    double est = 1.0;
    for (int j = 0; j < d; ++j)
        est *= 2.0 * R[j] / nu + 1.0;
    double scale = std::pow(2.0, d);
    double sup_tab = 1.0;
    for (const auto& t : tables)
        sup_tab *= t->sup();
    if (scale * std::min(sup_prod, sup_tab) * est < skip_below) {
        out.skipped = true;
        out.tail_bound = scale * sup_prod * est;
        out.value = {0.0, 0.0};
        return out;
    }
    Vec h(d);
    for (int j = 0; j < d; ++j)
        h(j) = R[j] / nu;

    NeumaierSum sum, shell, err;
    std::int64_t n = 0;
    std::array<double, kMaxDim> I{}, E{};
    for (int j = 0; j < d; ++j)
        E[j] = tables[j]->abs_error();
    for_each_point_in_box(L, u, h, [&](const double* x, const std::int64_t*) {
        double p = 1.0;
        bool outer = false;
        for (int j = 0; j < d; ++j) {
            double z = nu * (x[j] - u(j));
            I[j] = (*tables[j])(z);
            p *= I[j];
            outer = outer || std::abs(z) > 0.8 * R[j];
        }
        ++n;
        sum.add(p);
        if (outer)
            shell.add(std::abs(p));
        double e = 0.0;
        for (int j = 0; j < d; ++j) {
            double o = E[j];
            for (int i = 0; i < d; ++i)
                if (i != j)
                    o *= std::abs(I[i]) + E[i];
            e += o;
        }
        err.add(e);
    });
    // (-2i)^d
    std::complex<double> c(1.0, 0.0);
    for (int j = 0; j < d; ++j)
        c *= std::complex<double>(0.0, -2.0);
    out.value.value = c * sum.value();
    out.value.abs_error = scale * err.value();
    out.tail_bound = scale * (shell.value() + err.value());
    out.points = n;
    out.radius = *std::max_element(R.begin(), R.end());
    return out;
}

inline std::vector<FactorTablePtr> make_factor_tables(std::uint32_t J, const std::vector<double>& q,
                                                      const CutoffFunction& cutoff, TableOptions opt = {})
{
    std::vector<FactorTablePtr> t;
    for (std::size_t j = 0; j < q.size(); ++j)
        t.push_back(std::make_shared<FactorTable>(atom_for(J, int(j)), cutoff.factors[j], q[j], opt));
    return t;
}

// F_J(nu, L, u, q) = sum_{x in L} F_J(nu (x - u), q); J is a bit mask over [d].
inline LatticeKernelSum F_J_lattice_sum(std::uint32_t J, double nu, const GenericLattice& L, const Vec& u,
                                        const std::vector<double>& q, const CutoffFunction& cutoff, double eps_rel)
{
    if (!(nu > 0.0))
        throw DomainError("nu must be positive");
    if (cutoff.dim() != L.dim())
        throw UnsupportedCutoff("cutoff must be a product of d one-dimensional factors");
    return lattice_kernel_sum(make_factor_tables(J, q, cutoff), nu, L, u, eps_rel);
}

// ---------------------------------------------------------------------------
// sup over u: grid over [0,1)^d coordinates of a basis, then golden-section
// refinement per coordinate around the best point

struct SupProxy {
    double value = 0.0;
    Vec argmax;
    int evaluations = 0;
};

inline SupProxy sup_proxy(int d, int resolution, const std::function<double(const Vec&)>& f,
                          const Mat& basis = Mat(), int rounds = 3, int golden_iters = 10)
{
    Mat B = basis.size() == 0 ? Mat::Identity(d, d) : basis;
    std::size_t n = 1;
    for (int j = 0; j < d; ++j)
        n *= std::size_t(resolution);
    std::vector<double> vals(n);
    auto point = [&](const Vec& t) -> Vec { return B * t; };
    auto grid_t = [&](std::size_t idx) {
        Vec t(d);
        for (int j = 0; j < d; ++j) {
            t(j) = double(idx % resolution) / resolution;
            idx /= resolution;
        }
        return t;
    };
    parallel_for(n, [&](std::size_t i) { vals[i] = f(point(grid_t(i))); });
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (vals[i] > vals[best])
            best = i;
    SupProxy r;
    r.value = vals[best];
    Vec t = grid_t(best);
    r.evaluations = int(n);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double h = 1.0 / resolution;
    for (int round = 0; round < rounds; ++round) {
        for (int j = 0; j < d; ++j) {
            auto g = [&](double s) {
                Vec tt = t;
                tt(j) = s;
                ++r.evaluations;
                return f(point(tt));
            };
            double a = t(j) - h, b = t(j) + h;
            double c = b - gr * (b - a), e = a + gr * (b - a);
            double fc = g(c), fe = g(e);
            for (int it = 0; it < golden_iters; ++it) {
                if (fc > fe) {
                    b = e;
                    e = c;
                    fe = fc;
                    c = b - gr * (b - a);
                    fc = g(c);
                } else {
                    a = c;
                    c = e;
                    fc = fe;
                    e = a + gr * (b - a);
                    fe = g(e);
                }
            }
            double s = fc > fe ? c : e, fs = std::max(fc, fe);
            if (fs > r.value) {
                r.value = fs;
                t(j) = s;
            }
        }
        h *= 0.5;
    }
    r.argmax = point(t);
    return r;
}

// sup over u of |F_J(nu, L, u, q)|, u ranging over a fundamental cell of L
inline SupProxy F_J_lattice_sup(std::uint32_t J, double nu, const GenericLattice& L, const std::vector<double>& q,
                                const CutoffFunction& cutoff, double eps_rel, int resolution = 16)
{
    auto tables = make_factor_tables(J, q, cutoff);
    return sup_proxy(L.dim(), resolution,
                     [&](const Vec& u) { return std::abs(lattice_kernel_sum(tables, nu, L, u, eps_rel).value.value); },
                     L.basis());
}

// ---------------------------------------------------------------------------
// dyadic decomposition
//
//   S(Lambda_theta, u, T) = sum_J sum_L S_J(L, u, T),
//   S_J(L, u, T) = F_J(nu, D^{-1} Lambda_theta^perp, D^{-1} u, m(L)/T)
//
// with J over subsets of [d-1] (the last coordinate always uses xi_inf) and
// L ranging over exponents l_j >= 0 on J, l_j = 0 off J.

struct DyadicOptions {
    std::int64_t search_cap = 10000000;
    TableOptions table;
    std::int64_t certify_limit = 1000000;
    double skip_below = 1e-20; // terms whose a priori bound is smaller are not summed
};

class DyadicEvaluator {
public:
    DyadicEvaluator(const ThetaVector& theta, const CutoffFunction& phi, double T, int l1_cap, double eps_rel,
                    DyadicOptions opt = {})
        : theta_(theta), phi_(phi), T_(T), l1_cap_(l1_cap), eps_rel_(eps_rel), opt_(opt)
    {
        int d = theta.d();
        if (phi.dim() != d)
            throw UnsupportedCutoff("cutoff dimension does not match theta");
        if (!(T > 0.0))
            throw DomainError("T must be positive");
        if (l1_cap < 0)
            throw DomainError("L1_cap must be non-negative");
        Mat Bperp = theta_dual_basis(theta);
        for (const DyadicIndex& idx : enumerate_indices(d, l1_cap)) {
            Term t;
            t.index = idx;
            try {
                t.frame = equalized_frame(theta, idx.L, opt_.search_cap);
            } catch (const SearchCapError& e) {
                // nothing is summed past a failed search
                throw SearchCapError(e.cap, idx.label());
            }
            std::vector<double> q(d);
            for (int j = 0; j < d; ++j)
                q[j] = t.frame.m_vec(j) / T;
            t.q = q;
            // quick rejection before building tables
            double bound = 1.0;
            for (int j = 0; j < d; ++j)
                bound *= FactorIntegrand(atom_for(idx.J, j), phi.factors[j], q[j]).sup_bound();
            if (bound < 1e-200) {
                t.negligible = true;
                t.bound = bound;
                terms_.push_back(std::move(t));
                continue;
            }
            for (int j = 0; j < d; ++j)
                t.tables.push_back(table(atom_for(idx.J, j), phi.factors[j], q[j]));
            Vec dinv = t.frame.D().cwiseInverse();
            t.lattice = GenericLattice(dinv.asDiagonal() * Bperp);
            t.dinv = dinv;
            terms_.push_back(std::move(t));
        }
        l1_tail_ = l1_tail_bound();
    }

    SumEvaluation evaluate(const Vec& u) const
    {
        int d = theta_.d();
        SumEvaluation out;
        out.T = T_;
        out.u = u;
        out.method = "dyadic";
        ComplexSum total;
        NeumaierSum tails;
        for (const Term& t : terms_) {
            DyadicTermRecord rec;
            rec.index = t.index;
            rec.mu = t.frame.mu;
            rec.nu = t.frame.nu;
            if (t.negligible) {
                rec.skipped = true;
                rec.tail_bound = t.bound;
            } else {
                Vec uu = t.dinv.asDiagonal() * u;
                LatticeKernelSum s = lattice_kernel_sum(t.tables, t.frame.nu, t.lattice, uu, eps_rel_, opt_.skip_below);
                rec.value = s.value.value;
                rec.tail_bound = s.tail_bound;
                rec.points = s.points;
                rec.radius = s.radius;
                rec.skipped = s.skipped;
                out.truncation_radius = std::max(out.truncation_radius, s.radius);
            }
            total.add(rec.value);
            tails.add(rec.tail_bound);
            out.term_count += rec.points;
            out.terms.push_back(rec);
        }
        (void)d;
        out.value = total.value();
        out.l1_tail_bound = l1_tail_;
        out.tail_bound = tails.value() + l1_tail_;
        return out;
    }

    std::size_t term_count() const { return terms_.size(); }

private:
    struct Term {
        DyadicIndex index;
        EqualizedFrame frame;
        std::vector<double> q;
        std::vector<FactorTablePtr> tables;
        GenericLattice lattice;
        Vec dinv;
        bool negligible = false;
        double bound = 0.0;
    };

    FactorTablePtr table(Atom atom, const Profile& g, double q)
    {
        auto key = std::make_tuple(int(atom), int(g.kind), g.param, q);
        auto it = tables_.find(key);
        if (it != tables_.end())
            return it->second;
        auto t = std::make_shared<FactorTable>(atom, g, q, opt_.table);
        tables_.emplace(key, t);
        return t;
    }

    double point_guess(int n, double mu) const
    {
        int d = theta_.d();
        return std::pow(2.0 * 1e3, d) * std::ldexp(1.0, d - 1 + n) / mu;
    }

    double others_sup() const
    {
        double others = 1.0;
        for (int j = 0; j < theta_.d() - 1; ++j)
            others *= std::max(FactorIntegrand(Atom::xi0, phi_.factors[j], 0.5 / T_).sup_bound(),
                               FactorIntegrand(Atom::xi_inf, phi_.factors[j], 0.5 / T_).sup_bound());
        return others;
    }

    // Terms with |L|_1 > cap: mu(L) >= c1 2^{|L|_1} by the certificate, so
    // the last factor sees q_d >= c1 2^{|L|_1} / T. Each term is bounded by
    // 2^d prod sup_j times a point count; the count of indices grows
    // polynomially in |L|_1.
    double l1_tail_bound() const
    {
        int d = theta_.d();
        double c = certify_kappa(theta_, 0.0, opt_.certify_limit).c_hat;
        double c1 = c * std::ldexp(1.0, d - 1);
        double total = 0.0;
        for (int n = l1_cap_ + 1; n <= l1_cap_ + 200; ++n) {
            double mu_lb = std::max(1.0, c1 * std::ldexp(1.0, n));
            double sd = FactorIntegrand(Atom::xi_inf, phi_.factors[d - 1], mu_lb / T_).sup_bound();
            double count = std::pow(2.0, d - 1) * std::pow(double(n + 1), d - 2);
            // points: the scaled box has volume prod(2R)/nu^d, nu^d >= 2^{1-d-n} mu
            double term = std::pow(2.0, d) * count * others_sup() * sd * point_guess(n, mu_lb);
            total += term;
            if (term < 1e-300)
                break;
        }
        return total;
    }

    ThetaVector theta_;
    CutoffFunction phi_;
    double T_;
    int l1_cap_;
    double eps_rel_;
    DyadicOptions opt_;
    std::vector<Term> terms_;
    std::map<std::tuple<int, int, double, double>, FactorTablePtr> tables_;
    double l1_tail_ = 0.0;
};

inline SumEvaluation dyadic_decomposed_sum(const ThetaVector& theta, const CutoffFunction& phi, const Vec& u,
                                           double T, int l1_cap, double eps_rel, DyadicOptions opt = {})
{
    return DyadicEvaluator(theta, phi, T, l1_cap, eps_rel, opt).evaluate(u);
}

// ---------------------------------------------------------------------------
// growth scans

struct GrowthRow {
    double T = 0.0;
    double sup_proxy = 0.0;
    std::int64_t terms = 0;
    double tail_bound = 0.0;
    Vec argmax;
};

struct GrowthScanResult {
    std::string theta_label;
    std::vector<GrowthRow> rows;
    int u_resolution = 0;
    bool degenerate = false;
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> residuals;
};

inline std::vector<double> geometric_grid(double start, double stop, double ratio)
{
    if (!(start > 0.0) || !(ratio > 1.0) || stop < start)
        throw std::invalid_argument("T grid must be start > 0, ratio > 1, stop >= start");
    std::vector<double> g;
    for (double t = start; t <= stop * (1 + 1e-12); t *= ratio)
        g.push_back(t);
    return g;
}

// least squares of log2 sup against log2 T
inline void fit_growth(GrowthScanResult& r, double floor)
{
    std::vector<double> xs, ys;
    for (const auto& row : r.rows) {
        if (row.sup_proxy > floor) {
            xs.push_back(std::log2(row.T));
            ys.push_back(std::log2(row.sup_proxy));
        }
    }
    if (xs.size() < 2) {
        r.degenerate = true;
        return;
    }
    double n = double(xs.size()), sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    double mx = sx / n, my = sy / n, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    r.residuals.clear();
    for (std::size_t i = 0; i < xs.size(); ++i)
        r.residuals.push_back(ys[i] - (r.intercept + r.slope * xs[i]));
}

struct GrowthOptions {
    int u_resolution = 16;
    double eps_trunc = 1e-10;
    double degenerate_floor = 1e-12; // sup-proxies at or below this are treated as zero
    DirectOptions direct;
};

inline GrowthScanResult growth_scan(const ThetaVector& theta, const CutoffFunction& phi,
                                    const std::vector<double>& T_grid, const GrowthOptions& opt = {})
{
    if (T_grid.empty())
        throw std::invalid_argument("empty T grid");
    for (std::size_t i = 1; i < T_grid.size(); ++i)
        if (!(T_grid[i] > T_grid[i - 1]))
            throw std::invalid_argument("T grid must be strictly increasing");
    int d = theta.d();
    GrowthScanResult r;
    r.theta_label = theta.name;
    r.u_resolution = opt.u_resolution;
    for (double T : T_grid) {
        GrowthRow row;
        row.T = T;
        double tail = 0.0;
        std::int64_t terms = 0;
        SupProxy s = sup_proxy(d, opt.u_resolution, [&](const Vec& u) {
            SumEvaluation e = direct_sum_S(theta, phi, u, T, opt.eps_trunc, opt.direct);
            return std::abs(e.value);
        });
        SumEvaluation at = direct_sum_S(theta, phi, s.argmax, T, opt.eps_trunc, opt.direct);
        tail = at.tail_bound;
        terms = at.term_count;
        row.sup_proxy = s.value;
        row.terms = terms;
        row.tail_bound = tail;
        row.argmax = s.argmax;
        r.rows.push_back(row);
    }
    fit_growth(r, opt.degenerate_floor);
    return r;
}

} // namespace latsum
