// One line per acceptance criterion. CSVs land in --csv-dir; criterion 12
// reruns 1-11 in a child process and compares the files byte for byte.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "latsum/io.hpp"
#include "latsum/sums.hpp"

using namespace latsum;
namespace fs = std::filesystem;

namespace {

using quad = __float128;

struct Outcome {
    bool pass = false;
    std::string detail;
    std::string csv;
    double limit_s = 0.0; // 0: no runtime limit
};

std::string fmt(double v) { return format_real(v); }

std::string short_num(double v)
{
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", v);
    return b;
}

quad qsqrt(quad a)
{
    quad x = std::sqrt(double(a));
    for (int i = 0; i < 4; ++i)
        x = 0.5 * (x + a / x);
    return x;
}

quad qcbrt(quad a)
{
    quad x = std::cbrt(double(a));
    for (int i = 0; i < 4; ++i)
        x = (2 * x + a / (x * x)) / 3;
    return x;
}

quad quad_of(DD v) { return quad(v.hi) + quad(v.lo); }

double qdist(quad theta, long long m)
{
    quad x = theta * m;
    quad r = x - quad((long long)(x + 0.5));
    return double(r < 0 ? -r : r);
}

long long brute_mu(const ThetaVector& t, const std::vector<int>& L, std::uint32_t mask, long long cap)
{
    std::vector<quad> th;
    for (const DD& c : t.components)
        th.push_back(quad_of(c));
    for (long long m = 1; m <= cap; ++m) {
        bool good = true;
        for (std::size_t j = 0; j < th.size() && good; ++j)
            if ((mask >> j) & 1u)
                good = qdist(th[j], m) <= std::ldexp(1.0, -L[j] - 1);
        if (good)
            return m;
    }
    return -1;
}

std::string label(const std::vector<int>& L)
{
    std::string s = "(";
    for (std::size_t j = 0; j < L.size(); ++j)
        s += (j ? ";" : "") + std::to_string(L[j]);
    return s + ")";
}

Vec vec(std::initializer_list<double> v)
{
    Vec r(int(v.size()));
    int i = 0;
    for (double x : v)
        r(i++) = x;
    return r;
}

// ---------------------------------------------------------------------------

Outcome c1_partition()
{
    Outcome o;
    o.limit_s = 10;
    CsvWriter w({"dim", "points", "max_residual", "max_nonzero", "nonzero_limit"});
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> U(-10.0, 10.0);
    bool ok = true;
    double worst = 0.0;
    for (int d : {1, 3, 4}) {
        int n = d == 1 ? 10000 : 1000;
        int limit = d == 1 ? 3 : int(std::pow(3, d - 1));
        double res = 0.0;
        int nz = 0;
        for (int i = 0; i < n; ++i) {
            PartitionSum s;
            if (d == 1) {
                double x = U(rng);
                if (x == 0.0)
                    x = 1.0;
                s = partition_sum_1d(x);
            } else {
                std::vector<double> X(d - 1);
                for (auto& x : X) {
                    x = U(rng);
                    if (x == 0.0)
                        x = 1.0;
                }
                s = partition_sum(X);
            }
            res = std::max(res, std::abs(s.sum - 1.0));
            nz = std::max(nz, s.nonzero);
        }
        ok = ok && res <= 1e-11 && nz <= limit;
        worst = std::max(worst, res);
        w.row({std::to_string(d), std::to_string(n), fmt(res), std::to_string(nz), std::to_string(limit)});
    }
    o.pass = ok;
    o.detail = "max residual " + short_num(worst);
    o.csv = w.str();
    return o;
}

Outcome c2_mu_j()
{
    Outcome o;
    o.limit_s = 120;
    CsvWriter w({"theta", "J", "L", "mu_J", "mu", "scan_mu_J", "scan_mu"});
    std::mt19937_64 rng(202);
    bool ok = true;
    int pairs = 0;
    for (int d : {3, 4}) {
        ThetaVector t = make_preset(d == 3 ? "sqrt2_sqrt3" : "sqrt2_sqrt3_sqrt5");
        auto all = enumerate_indices(d, 12);
        std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
        std::uint32_t full = (1u << (d - 1)) - 1u;
        for (int k = 0; k < 50; ++k) {
            DyadicIndex idx = all[pick(rng)];
            long long a = dyadic_minimum_J(t, idx, 100000000);
            long long b = dyadic_minimum(t, idx.L, 100000000);
            long long sa = brute_mu(t, idx.L, idx.J, 100000000);
            long long sb = brute_mu(t, idx.L, full, 100000000);
            ok = ok && a == b && a == sa && b == sb && sa > 0;
            ++pairs;
            w.row({t.name, std::to_string(idx.J), label(idx.L), std::to_string(a), std::to_string(b),
                   std::to_string(sa), std::to_string(sb)});
        }
    }
    o.pass = ok;
    o.detail = std::to_string(pairs) + " pairs";
    o.csv = w.str();
    return o;
}

Outcome c3_examples()
{
    Outcome o;
    o.limit_s = 60;
    CsvWriter w({"theta", "L", "mu", "expected"});
    bool ok = true;
    for (const auto& name : preset_names()) {
        ThetaVector t = make_preset(name);
        std::vector<int> L(t.d() - 1, 0);
        auto mu = dyadic_minimum(t, L);
        ok = ok && mu == 1;
        w.row({name, label(L), std::to_string(mu), "1"});
    }
    auto g = dyadic_minimum(make_preset("golden"), {2});
    ok = ok && g == 5;
    w.row({"golden", "(2)", std::to_string(g), "5"});
    std::mt19937_64 rng(303);
    ThetaVector t = make_preset("sqrt2_sqrt3");
    std::uniform_int_distribution<int> U(0, 7), V(0, 3);
    int bad = 0;
    for (int i = 0; i < 100; ++i) {
        std::vector<int> a{U(rng), U(rng)};
        std::vector<int> b{a[0] + V(rng), a[1] + V(rng)};
        auto ma = dyadic_minimum(t, a), mb = dyadic_minimum(t, b);
        bad += mb < ma;
        w.row({t.name, label(a) + "<=" + label(b), std::to_string(ma), std::to_string(mb)});
    }
    ok = ok && bad == 0;
    o.pass = ok;
    o.detail = "mu((2)) = " + std::to_string(g) + " for golden, " + std::to_string(bad) + " monotonicity violations";
    o.csv = w.str();
    return o;
}

Outcome c4_equalizer()
{
    Outcome o;
    CsvWriter w({"theta", "J", "L", "mu", "nu", "max_rel_Dm", "nu_pow_exponent", "expected_exponent"});
    bool ok = true;
    double worst = 0.0;
    int frames = 0;
    for (const char* name : {"sqrt2", "golden", "cbrt2", "sqrt2_sqrt3", "cbrt2_cbrt4", "sqrt2_sqrt3_sqrt5"}) {
        ThetaVector t = make_preset(name);
        int d = t.d();
        for (const auto& idx : enumerate_indices(d, d == 2 ? 24 : d == 3 ? 12 : 8)) {
            EqualizedFrame f = equalized_frame(t, idx.L, 1000000000);
            Vec Dm = f.D().cwiseProduct(f.m_vec);
            double rel = 0.0;
            for (int j = 0; j < d; ++j)
                rel = std::max(rel, std::abs(Dm(j) / f.nu - 1.0));
            int expect = 1 - d - idx.l1();
            bool exact = f.nu_pow_exponent == expect && f.nu_pow_d() == std::ldexp(double(f.mu), expect);
            ok = ok && rel <= 1e-12 && exact && std::abs(std::pow(f.nu, d) / f.nu_pow_d() - 1.0) <= 1e-12;
            worst = std::max(worst, rel);
            ++frames;
            w.row({name, std::to_string(idx.J), label(idx.L), std::to_string(f.mu), fmt(f.nu), fmt(rel),
                   std::to_string(f.nu_pow_exponent), std::to_string(expect)});
        }
    }
    o.pass = ok;
    o.detail = std::to_string(frames) + " frames, max |Dm/nu - 1| " + short_num(worst);
    o.csv = w.str();
    return o;
}

Outcome c5_prop31()
{
    Outcome o;
    o.limit_s = 300;
    CsvWriter w({"theta", "L", "mu", "nu", "lambda1", "difference"});
    std::mt19937_64 rng(505);
    bool ok = true;
    double worst = 0.0;
    for (const char* name : {"sqrt2", "sqrt2_sqrt3"}) {
        ThetaVector t = make_preset(name);
        int d = t.d();
        std::uniform_int_distribution<int> U(0, d == 2 ? 16 : 8);
        for (int i = 0; i < 20; ++i) {
            std::vector<int> L(d - 1);
            for (auto& l : L)
                l = U(rng);
            auto r = check_prop31(t, 0.0, 0.1, L, 1000000000);
            double diff = std::abs(r.lambda1 - r.nu);
            worst = std::max(worst, diff);
            ok = ok && r.lambda_ok;
            w.row({name, label(L), std::to_string(r.mu), fmt(r.nu), fmt(r.lambda1), fmt(diff)});
        }
    }
    o.pass = ok;
    o.detail = "max |lambda1 - nu| " + short_num(worst);
    o.csv = w.str();
    return o;
}

Outcome c6_minkowski_mahler()
{
    Outcome o;
    o.limit_s = 300;
    CsvWriter w({"index", "dim", "minima_product", "minkowski_lower", "mahler_min", "mahler_max", "ok"});
    std::mt19937_64 rng(606);
    bool ok = true;
    int bad = 0;
    for (int i = 0; i < 100; ++i) {
        int d = 2 + i % 3;
        GenericLattice L = random_unimodular(d, rng);
        MahlerReport m = mahler_check(L);
        double lo = 1.0 / factorial(d);
        bool mk = m.minkowski_product >= lo * (1 - 1e-12) && m.minkowski_product <= 1.0 + 1e-12;
        bool good = mk && m.ok;
        bad += !good;
        ok = ok && good;
        double pmin = *std::min_element(m.products.begin(), m.products.end());
        double pmax = *std::max_element(m.products.begin(), m.products.end());
        w.row({std::to_string(i), std::to_string(d), fmt(m.minkowski_product), fmt(lo), fmt(pmin), fmt(pmax),
               good ? "true" : "false"});
    }
    o.pass = ok;
    o.detail = "100 lattices, " + std::to_string(bad) + " violations";
    o.csv = w.str();
    return o;
}

Outcome c7_change_of_variables()
{
    Outcome o;
    o.limit_s = 120;
    CsvWriter w({"theta", "T", "u", "script_S_re", "script_S_im", "S_re", "S_im", "residual"});
    std::mt19937_64 rng(707);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    bool ok = true;
    double worst = 0.0;
    for (const char* name : {"sqrt2", "sqrt2_sqrt3"}) {
        ThetaVector t = make_preset(name);
        int d = t.d();
        auto phi = as_general(CutoffFunction::gaussian(d, 1.0));
        for (double T : {4.0, 8.0}) {
            std::vector<Vec> us;
            for (int k = 0; k < 10; ++k) {
                Vec u(d);
                for (int j = 0; j < d; ++j)
                    u(j) = U(rng);
                us.push_back(u);
            }
            auto r = check_S_equals_script_S(t, phi, us, T);
            for (std::size_t k = 0; k < us.size(); ++k) {
                std::string ul;
                for (int j = 0; j < d; ++j)
                    ul += (j ? ";" : "") + fmt(us[k](j));
                w.row({name, fmt(T), ul, fmt(r.script_S[k].real()), fmt(r.script_S[k].imag()), fmt(r.S[k].real()),
                       fmt(r.S[k].imag()), fmt(r.residuals[k])});
            }
            worst = std::max(worst, r.max_residual);
            ok = ok && r.max_residual < 1e-8;
        }
    }
    o.pass = ok;
    o.detail = "max residual " + short_num(worst);
    o.csv = w.str();
    return o;
}

Outcome c8_flagship()
{
    Outcome o;
    o.limit_s = 3 * 600;
    CsvWriter w({"T", "u", "direct_re", "direct_im", "dyadic_re", "dyadic_im", "difference", "direct_tail",
                 "dyadic_tail", "relative_difference", "terms"});
    ThetaVector t = make_preset("sqrt2");
    auto phi = CutoffFunction::gaussian(2, 1.0);
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    DyadicOptions opt;
    opt.search_cap = 1000000000;
    bool ok = true;
    double worst = 0.0;
    for (double T : {4.0, 8.0, 16.0}) {
        DyadicEvaluator ev(t, phi, T, 24, 1e-10, opt);
        for (int k = 0; k < 3; ++k) {
            Vec u = vec({U(rng), U(rng)});
            auto dy = ev.evaluate(u);
            auto di = direct_sum_S(t, phi, u, T, 1e-12);
            double diff = std::abs(dy.value - di.value);
            double rel = diff / std::abs(di.value);
            ok = ok && diff <= dy.tail_bound + di.tail_bound && rel <= 1e-6;
            worst = std::max(worst, rel);
            w.row({fmt(T), fmt(u(0)) + ";" + fmt(u(1)), fmt(di.value.real()), fmt(di.value.imag()),
                   fmt(dy.value.real()), fmt(dy.value.imag()), fmt(diff), fmt(di.tail_bound), fmt(dy.tail_bound),
                   fmt(rel), std::to_string(dy.terms.size())});
        }
    }
    o.pass = ok;
    o.detail = "max relative difference " + short_num(worst);
    o.csv = w.str();
    return o;
}

Outcome c9_kernel_envelopes()
{
    Outcome o;
    o.limit_s = 300;
    CsvWriter w({"A", "C_h0", "C_h0_refined", "change_h0", "C_hinf", "C_hinf_refined", "change_hinf", "finite"});
    bool ok = true;
    double worst = 0.0;
    for (int A : {1, 2}) {
        auto r = verify_lemma52(2.0, A, 1e-3, 1e3, 1e-3, 1e3, 129);
        ok = ok && r.ok();
        worst = std::max({worst, r.change_h0, r.change_hinf});
        w.row({std::to_string(A), fmt(r.C_h0), fmt(r.C_h0_fine), fmt(r.change_h0), fmt(r.C_hinf), fmt(r.C_hinf_fine),
               fmt(r.change_hinf), r.finite ? "true" : "false"});
    }
    o.pass = ok;
    o.detail = "max change under refinement " + short_num(worst);
    o.csv = w.str();
    return o;
}

Outcome c10_growth()
{
    Outcome o;
    o.limit_s = 1800;
    auto phi = CutoffFunction::gaussian(2, 1.0);
    auto grid = geometric_grid(4, 4096, 2);
    GrowthOptions opt;
    opt.u_resolution = 16;
    auto a = growth_scan(make_preset("sqrt2"), phi, grid, opt);
    auto b = growth_scan(make_preset("liouville6"), phi, grid, opt);
    o.pass = !a.degenerate && !b.degenerate && a.slope <= 0.25 && b.slope > a.slope;
    o.detail = "slope sqrt2 " + short_num(a.slope) + ", liouville6 " + short_num(b.slope);
    o.csv = growth_csv({a, b});
    CsvWriter fit({"theta_label", "slope", "intercept"});
    for (const auto& s : {a, b})
        fit.row({s.theta_label, fmt(s.slope), fmt(s.intercept)});
    o.csv += fit.str();
    return o;
}

struct OracleTheta {
    const char* preset;
    quad value;
};

// independent double loop; x_1 = theta m_2 - m_1 in quad precision
std::complex<long double> brute_S2(quad theta, double u1, double u2, double T, long M)
{
    long double re = 0, im = 0;
    for (long m2 = -M; m2 <= M; ++m2) {
        if (m2 == 0 || std::abs(m2) > 45.0 * T)
            continue;
        long double g2 = std::exp(-0.5L * (m2 / (long double)T) * (m2 / (long double)T));
        for (long m1 = -M; m1 <= M; ++m1) {
            quad xq = theta * quad(m2) - quad(m1);
            long double x1 = (long double)xq;
            if (std::abs(x1) > 45.0L * T)
                continue;
            long double t = x1 / T;
            long double wgt = std::exp(-0.5L * t * t) * g2 / (x1 * (long double)m2);
            quad ph = quad(u1) * xq + quad(u2) * quad(m2);
            ph -= quad((long double)(long long)(long double)ph);
            long double a = 2.0L * 3.14159265358979323846264338327950288L * (long double)ph;
            re += wgt * std::cos(a);
            im += wgt * std::sin(a);
        }
    }
    return {re, im};
}

Outcome c11_brute_force()
{
    Outcome o;
    o.limit_s = 300;
    CsvWriter w({"theta", "T", "u", "direct_re", "direct_im", "oracle_re", "oracle_im", "difference"});
    std::vector<OracleTheta> thetas{{"sqrt2", qsqrt(2)},
                                    {"sqrt3", qsqrt(3)},
                                    {"sqrt5", qsqrt(5)},
                                    {"golden", (1 + qsqrt(5)) / 2},
                                    {"cbrt2", qcbrt(2)}};
    std::mt19937_64 rng(1111);
    std::uniform_real_distribution<double> U(-1.0, 1.0), TT(1.0, 8.0);
    bool ok = true;
    double worst = 0.0;
    for (const auto& th : thetas) {
        double T = TT(rng);
        Vec u = vec({U(rng), U(rng)});
        auto e = direct_sum_S(make_preset(th.preset), CutoffFunction::gaussian(2, 1.0), u, T, 1e-12);
        auto ref = brute_S2(th.value, u(0), u(1), T, 2000);
        double diff = std::abs(e.value - std::complex<double>(double(ref.real()), double(ref.imag())));
        ok = ok && diff <= 1e-8;
        worst = std::max(worst, diff);
        w.row({th.preset, fmt(T), fmt(u(0)) + ";" + fmt(u(1)), fmt(e.value.real()), fmt(e.value.imag()),
               fmt(double(ref.real())), fmt(double(ref.imag())), fmt(diff)});
    }
    o.pass = ok;
    o.detail = "max difference " + short_num(worst);
    o.csv = w.str();
    return o;
}

const std::vector<std::pair<const char*, std::function<Outcome()>>>& criteria()
{
    static const std::vector<std::pair<const char*, std::function<Outcome()>>> c{
        {"partition of unity", c1_partition},
        {"mu_J equals mu", c2_mu_j},
        {"dyadic minimum examples", c3_examples},
        {"equalizer identities", c4_equalizer},
        {"first minimum of the equalized lattice", c5_prop31},
        {"Minkowski and Mahler bounds", c6_minkowski_mahler},
        {"change of variables", c7_change_of_variables},
        {"dyadic decomposition against direct sum", c8_flagship},
        {"kernel decay envelopes", c9_kernel_envelopes},
        {"growth scan slopes", c10_growth},
        {"brute-force oracle", c11_brute_force},
    };
    return c;
}

std::string read_file(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

std::string csv_name(std::size_t i) { return "criterion_" + std::to_string(i + 1) + ".csv"; }

} // namespace

int main(int argc, char** argv)
{
    fs::path dir = "acceptance_csv";
    bool rerun = true;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--csv-dir" && i + 1 < argc)
            dir = argv[++i];
        else if (a == "--no-rerun")
            rerun = false;
        else {
            std::fprintf(stderr, "usage: acceptance [--csv-dir DIR] [--no-rerun]\n");
            return 2;
        }
    }
    fs::create_directories(dir);
    set_thread_count(1);

    bool all = true;
    const auto& list = criteria();
    for (std::size_t i = 0; i < list.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = list[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("error: ") + e.what();
        }
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = o.limit_s == 0.0 || s <= o.limit_s;
        if (!in_time)
            o.detail += ", over the " + short_num(o.limit_s) + " s limit";
        bool pass = o.pass && in_time;
        all = all && pass;
        write_text((dir / csv_name(i)).string(), o.csv);
        std::printf("criterion %zu [%s]: %s (%s; %.1f s)\n", i + 1, list[i].first, pass ? "PASS" : "FAIL",
                    o.detail.c_str(), s);
        std::fflush(stdout);
    }

    if (rerun) {
        fs::path again = dir / "rerun";
        fs::create_directories(again);
        std::string cmd = "\"" + fs::absolute(argv[0]).string() + "\" --no-rerun --csv-dir \"" + again.string() +
                          "\" > \"" + (again / "log.txt").string() + "\" 2>&1";
        int rc = std::system(cmd.c_str());
        int same = 0;
        std::string diff;
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (read_file(dir / csv_name(i)) == read_file(again / csv_name(i)) &&
                !read_file(dir / csv_name(i)).empty())
                ++same;
            else
                diff += (diff.empty() ? "" : ",") + std::to_string(i + 1);
        }
        bool pass = same == int(list.size());
        all = all && pass;
        std::string detail = std::to_string(same) + "/" + std::to_string(list.size()) + " CSVs identical";
        if (!diff.empty())
            detail += ", differing: " + diff;
        if (rc != 0)
            detail += ", rerun exit status " + std::to_string(rc);
        std::printf("criterion 12 [determinism]: %s (%s)\n", pass ? "PASS" : "FAIL", detail.c_str());
    }
    return all ? 0 : 1;
}
