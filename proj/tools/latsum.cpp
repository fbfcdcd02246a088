// latsum: evaluate and scan multiplicative lattice sums from the command line.

#include <cstdio>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "latsum/config.hpp"
#include "latsum/dyadic.hpp"
#include "latsum/io.hpp"
#include "latsum/lattice.hpp"
#include "latsum/partition.hpp"
#include "latsum/sums.hpp"

using namespace latsum;

namespace {

enum Exit { ok = 0, bad_config = 1, near_resonance = 2, resource = 3, suite_failed = 4 };

struct Flags {
    std::string config;
    std::optional<std::string> theta, cutoff, T_grid, u, precision, method, csv, svg, json;
    std::optional<double> T, eps;
    std::optional<int> u_res, l1_cap, threads, d;
    std::optional<std::int64_t> search_cap;
};

void add_common(CLI::App* c, Flags& f)
{
    c->add_option("--config", f.config, "TOML experiment file");
    c->add_option("--theta", f.theta, "preset name or comma separated decimals");
    c->add_option("--d", f.d, "dimension (checked against theta)");
    c->add_option("--cutoff", f.cutoff, "gaussian:sigma or rational:a");
    c->add_option("--eps", f.eps, "truncation tolerance");
    c->add_option("--threads", f.threads, "worker threads");
    c->add_option("--precision", f.precision, "precision mode (double-double)");
    c->add_option("--search-cap", f.search_cap, "cap for dyadic minimum searches");
}

ExperimentConfig merge(const Flags& f)
{
    ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
    if (f.theta) c.theta = *f.theta;
    if (f.d) c.d = *f.d;
    if (f.cutoff) c.cutoff = *f.cutoff;
    if (f.T_grid) c.T_grid = parse_T_grid(*f.T_grid);
    if (f.T) c.T = *f.T;
    if (f.u) c.u = parse_doubles(*f.u);
    if (f.u_res) c.u_resolution = *f.u_res;
    if (f.l1_cap) c.L1_cap = *f.l1_cap;
    if (f.eps) c.eps_trunc = *f.eps;
    if (f.precision) c.precision = *f.precision;
    if (f.threads) c.threads = *f.threads;
    if (f.search_cap) c.search_cap = *f.search_cap;
    if (f.method) c.method = *f.method;
    if (f.csv) c.csv = *f.csv;
    if (f.svg) c.svg = *f.svg;
    if (f.json) c.json = *f.json;
    validate(c);
    if (c.threads > 0)
        set_thread_count(c.threads);
    return c;
}

ThetaVector theta_of(const ExperimentConfig& c)
{
    ThetaVector t = resolve_theta(c.theta);
    if (c.d && *c.d != t.d())
        throw ConfigError("d = " + std::to_string(*c.d) + " does not match theta (d = " + std::to_string(t.d()) + ")");
    return t;
}

void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_text(path, text);
}

int cmd_eval_sum(const ExperimentConfig& c)
{
    ThetaVector th = theta_of(c);
    int d = th.d();
    CutoffFunction phi = resolve_cutoff(c.cutoff, d);
    Vec u = Vec::Zero(d);
    if (!c.u.empty()) {
        if (int(c.u.size()) != d)
            throw ConfigError("u needs " + std::to_string(d) + " components");
        for (int j = 0; j < d; ++j)
            u(j) = c.u[j];
    }
    SumEvaluation e;
    if (c.method == "direct") {
        e = direct_sum_S(th, phi, u, c.T, c.eps_trunc);
    } else {
        DyadicOptions o;
        o.search_cap = c.search_cap;
        e = dyadic_decomposed_sum(th, phi, u, c.T, c.L1_cap, c.eps_trunc, o);
    }
    emit(c.json, to_json(e).dump() + "\n");
    return ok;
}

int cmd_growth_scan(const ExperimentConfig& c, const std::vector<std::string>& compare)
{
    std::vector<ThetaVector> thetas{theta_of(c)};
    for (const auto& s : compare) {
        thetas.push_back(resolve_theta(s));
        if (thetas.back().d() != thetas[0].d())
            throw ConfigError("compared theta must have the same dimension");
    }
    if (c.method != "direct")
        throw ConfigError("growth scans use the direct method");
    GrowthOptions o;
    o.u_resolution = c.u_resolution;
    o.eps_trunc = c.eps_trunc;
    std::vector<double> grid = c.T_grid.values();
    std::vector<GrowthScanResult> scans;
    for (const auto& th : thetas) {
        scans.push_back(growth_scan(th, resolve_cutoff(c.cutoff, th.d()), grid, o));
        const auto& s = scans.back();
        if (s.degenerate)
            std::fprintf(stderr, "%s: degenerate scan, all sup-proxies below floor\n", s.theta_label.c_str());
        else
            std::fprintf(stderr, "%s: slope %.6f\n", s.theta_label.c_str(), s.slope);
    }
    emit(c.csv, growth_csv(scans));
    if (!c.svg.empty())
        write_text(c.svg, growth_svg(scans));
    if (!c.json.empty()) {
        std::string out;
        for (const auto& s : scans)
            out += to_json(s).dump() + "\n";
        write_text(c.json, out);
    }
    return ok;
}

std::string L_label(const std::vector<int>& L)
{
    std::string s = "(";
    for (std::size_t j = 0; j < L.size(); ++j)
        s += (j ? ";" : "") + std::to_string(L[j]);
    return s + ")";
}

int cmd_dyadic_minima(const ExperimentConfig& c, int l1_max, double kappa, std::int64_t certify_M)
{
    ThetaVector th = theta_of(c);
    int d = th.d();
    ApproximabilityCertificate cert = certify_kappa(th, kappa, certify_M);
    double c1 = std::pow(cert.c_hat * std::ldexp(1.0, d - 1), 1.0 / (1.0 + kappa));
    CsvWriter w({"L", "mu", "nu_d_power", "mu_lower_bound", "ok"});
    std::uint32_t all = (1u << (d - 1)) - 1u;
    for (const DyadicIndex& idx : enumerate_indices(d, l1_max)) {
        if (idx.J != all)
            continue;
        double rhs = c1 * std::exp2(idx.l1() / (1.0 + kappa));
        try {
            std::int64_t mu = dyadic_minimum(th, idx.L, c.search_cap);
            EqualizedFrame f = frame_from_mu(idx.L, mu);
            bool good = double(mu) >= rhs * (1 - 1e-12);
            w.row({L_label(idx.L), std::to_string(mu), format_real(f.nu_pow_d()), format_real(rhs),
                   good ? "true" : "false"});
        } catch (const SearchCapError&) {
            w.row({L_label(idx.L), "", "", format_real(rhs), "cap"});
        }
    }
    emit(c.csv, w.str());
    return ok;
}

int cmd_certify(const ExperimentConfig& c, double kappa, std::int64_t M)
{
    if (M < 1)
        throw ConfigError("M must be >= 1");
    emit(c.json, to_json(certify_kappa(theta_of(c), kappa, M)).dump() + "\n");
    return ok;
}

// ---------------------------------------------------------------------------
// verify suites

struct SuiteResult {
    std::string name;
    bool pass;
    double residual;
    std::string detail;
};

SuiteResult suite_partition()
{
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> U(-10.0, 10.0);
    double worst = 0.0;
    int max_nonzero = 0;
    for (int i = 0; i < 10000; ++i) {
        double x = U(rng);
        if (x == 0.0)
            continue;
        PartitionSum s = partition_sum_1d(x);
        worst = std::max(worst, std::abs(s.sum - 1.0));
        max_nonzero = std::max(max_nonzero, s.nonzero);
    }
    return {"partition", worst < 1e-12 && max_nonzero <= 3, worst,
            "max nonzero terms " + std::to_string(max_nonzero)};
}

SuiteResult suite_mu_j(const ExperimentConfig& c)
{
    std::mt19937_64 rng(7);
    int bad = 0, n = 0;
    for (int d : {3, 4}) {
        ThetaVector th = make_preset(d == 3 ? "sqrt2_sqrt3" : "sqrt2_sqrt3_sqrt5");
        auto all = enumerate_indices(d, 8);
        std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
        for (int k = 0; k < 20; ++k) {
            DyadicIndex idx = all[pick(rng)];
            DyadicIndex full{(1u << (d - 1)) - 1u, idx.L};
            std::int64_t a = dyadic_minimum_J(th, full, c.search_cap);
            std::int64_t b = dyadic_minimum(th, idx.L, c.search_cap);
            bad += a != b;
            ++n;
        }
    }
    return {"mu-j", bad == 0, double(bad), std::to_string(n) + " pairs"};
}

SuiteResult suite_minkowski()
{
    std::mt19937_64 rng(99);
    int bad = 0;
    for (int i = 0; i < 40; ++i) {
        int d = 2 + i % 3;
        GenericLattice L = random_unimodular(d, rng);
        MahlerReport r = mahler_check(L);
        bad += !r.ok;
    }
    return {"minkowski", bad == 0, double(bad), "40 lattices"};
}

SuiteResult suite_decomposition(const ExperimentConfig& c)
{
    ThetaVector th = theta_of(c);
    if (th.d() != 2)
        throw ConfigError("decomposition suite runs at d = 2");
    CutoffFunction phi = resolve_cutoff(c.cutoff, 2);
    DyadicOptions o;
    o.search_cap = std::max<std::int64_t>(c.search_cap, 1000000000);
    DyadicEvaluator ev(th, phi, c.T, c.L1_cap, 1e-12, o);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    bool pass = true;
    for (int k = 0; k < 3; ++k) {
        Vec u(2);
        u << U(rng), U(rng);
        SumEvaluation a = direct_sum_S(th, phi, u, c.T, 1e-12);
        SumEvaluation b = ev.evaluate(u);
        double diff = std::abs(a.value - b.value);
        double rel = diff / std::max(std::abs(a.value), 1e-300);
        pass = pass && diff <= a.tail_bound + b.tail_bound && rel <= 1e-6;
        worst = std::max(worst, rel);
    }
    return {"decomposition", pass, worst, "relative difference, 3 shifts"};
}

SuiteResult suite_change_of_variables(const ExperimentConfig& c)
{
    ThetaVector th = theta_of(c);
    int d = th.d();
    GeneralCutoff phi = as_general(resolve_cutoff(c.cutoff, d));
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<Vec> us;
    for (int k = 0; k < 10; ++k) {
        Vec u(d);
        for (int j = 0; j < d; ++j)
            u(j) = U(rng);
        us.push_back(u);
    }
    double r = check_S_equals_script_S(th, phi, us, std::min(c.T, 8.0)).max_residual;
    return {"change-of-variables", r < 1e-8, r, "10 shifts"};
}

int cmd_verify(const ExperimentConfig& c, const std::string& suite)
{
    static const std::vector<std::string> names{"partition", "mu-j", "minkowski", "decomposition",
                                                "change-of-variables"};
    if (suite != "all" && std::find(names.begin(), names.end(), suite) == names.end())
        throw ConfigError("unknown suite: " + suite);
    std::vector<SuiteResult> res;
    auto want = [&](const std::string& s) { return suite == "all" || suite == s; };
    if (want("partition")) res.push_back(suite_partition());
    if (want("mu-j")) res.push_back(suite_mu_j(c));
    if (want("minkowski")) res.push_back(suite_minkowski());
    if (want("decomposition")) res.push_back(suite_decomposition(c));
    if (want("change-of-variables")) res.push_back(suite_change_of_variables(c));
    bool all_ok = true;
    for (const auto& r : res) {
        std::printf("%-20s %s  residual %s  (%s)\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                    format_real(r.residual).c_str(), r.detail.c_str());
        all_ok = all_ok && r.pass;
    }
    return all_ok ? ok : suite_failed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"multiplicative lattice sums"};
    app.require_subcommand(1);
    Flags f;
    std::vector<std::string> compare;
    std::string suite = "all";
    int l1_max = 12;
    double kappa = 0.0;
    std::int64_t M = 100000;

    auto* ev = app.add_subcommand("eval-sum", "evaluate S(theta, phi, u, T)");
    add_common(ev, f);
    ev->add_option("--T", f.T, "scale");
    ev->add_option("--u", f.u, "shift, comma separated");
    ev->add_option("--method", f.method, "direct or dyadic");
    ev->add_option("--l1-cap", f.l1_cap, "largest |L|_1 in the dyadic sum");
    ev->add_option("--out", f.json, "JSON output path (default stdout)");

    auto* gs = app.add_subcommand("growth-scan", "sup over u of |S| along a T grid");
    add_common(gs, f);
    gs->add_option("--T-grid", f.T_grid, "start:stop:ratio");
    gs->add_option("--u-res", f.u_res, "u grid points per coordinate");
    gs->add_option("--compare", compare, "additional theta presets");
    gs->add_option("--csv", f.csv, "CSV output path (default stdout)");
    gs->add_option("--svg", f.svg, "SVG plot path");
    gs->add_option("--json", f.json, "JSON lines output path");

    auto* vf = app.add_subcommand("verify", "run invariant suites");
    add_common(vf, f);
    vf->add_option("--suite", suite, "partition, mu-j, minkowski, decomposition, change-of-variables or all");
    vf->add_option("--T", f.T, "scale for the sum suites");
    vf->add_option("--l1-cap", f.l1_cap, "largest |L|_1");

    auto* dm = app.add_subcommand("dyadic-minima", "tabulate mu(L)");
    add_common(dm, f);
    dm->add_option("--l1-max", l1_max, "largest |L|_1");
    dm->add_option("--kappa", kappa, "exponent for the lower bound column");
    dm->add_option("--certify-limit", M, "scan limit for the constant in the lower bound");
    dm->add_option("--csv", f.csv, "CSV output path (default stdout)");

    auto* ck = app.add_subcommand("certify-kappa", "finite-range constant c(kappa)");
    add_common(ck, f);
    ck->add_option("--kappa", kappa, "exponent");
    ck->add_option("--M", M, "scan limit");
    ck->add_option("--out", f.json, "JSON output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? ok : bad_config;
    }

    try {
        ExperimentConfig c = merge(f);
        if (*ev)
            return cmd_eval_sum(c);
        if (*gs)
            return cmd_growth_scan(c, compare);
        if (*vf)
            return cmd_verify(c, suite);
        if (*dm)
            return cmd_dyadic_minima(c, l1_max, kappa, M);
        if (*ck)
            return cmd_certify(c, kappa, M);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return bad_config;
    } catch (const NearResonanceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return near_resonance;
    } catch (const ResourceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return resource;
    } catch (const SearchCapError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return resource;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return bad_config;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return bad_config;
    }
    return ok;
}
