#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "diophantine.hpp"
#include "fourier.hpp"
#include "lattice.hpp"
#include "sums.hpp"

namespace latsum {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// CSV

inline std::string format_real(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : ncol_(header.size()) { row(header); }

    void row(const std::vector<std::string>& cells)
    {
        if (cells.size() != ncol_)
            throw std::invalid_argument("csv row has wrong number of cells");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out_ << ',';
            out_ << quote(cells[i]);
        }
        out_ << '\n';
    }

    std::string str() const { return out_.str(); }

    void save(const std::string& path) const
    {
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot write " + path);
        f << out_.str();
    }

private:
    static std::string quote(const std::string& s)
    {
        if (s.find_first_of(",\"\n") == std::string::npos)
            return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"')
                q += '"';
            q += c;
        }
        return q + "\"";
    }

    std::size_t ncol_;
    std::ostringstream out_;
};

inline std::string growth_csv(const std::vector<GrowthScanResult>& scans)
{
    CsvWriter w({"theta_label", "T", "sup_proxy", "terms", "tail_bound"});
    for (const auto& s : scans)
        for (const auto& r : s.rows)
            w.row({s.theta_label, format_real(r.T), format_real(r.sup_proxy), std::to_string(r.terms),
                   format_real(r.tail_bound)});
    return w.str();
}

// ---------------------------------------------------------------------------
// JSON

inline json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

inline json vec_json(const Vec& v)
{
    json a = json::array();
    for (int i = 0; i < v.size(); ++i)
        a.push_back(v(i));
    return a;
}

inline json to_json(const DyadicTermRecord& t)
{
    return {{"J", t.index.label()},
            {"L", t.index.L},
            {"mu", t.mu},
            {"nu", t.nu},
            {"value", complex_json(t.value)},
            {"tail_bound", t.tail_bound},
            {"radius", t.radius},
            {"points", t.points},
            {"skipped", t.skipped}};
}

inline json to_json(const SumEvaluation& e)
{
    json j = {{"value", complex_json(e.value)},
              {"T", e.T},
              {"u", vec_json(e.u)},
              {"method", e.method},
              {"truncation_radius", e.truncation_radius},
              {"tail_bound", e.tail_bound},
              {"term_count", e.term_count},
              {"abs_sum", e.abs_sum}};
    if (e.method == "dyadic") {
        json terms = json::array();
        for (const auto& t : e.terms)
            terms.push_back(to_json(t));
        j["terms"] = terms;
        j["l1_tail_bound"] = e.l1_tail_bound;
    }
    return j;
}

inline json to_json(const GrowthScanResult& g)
{
    json rows = json::array();
    for (const auto& r : g.rows)
        rows.push_back({{"T", r.T}, {"sup_proxy", r.sup_proxy}, {"terms", r.terms}, {"tail_bound", r.tail_bound},
                        {"argmax_u", vec_json(r.argmax)}});
    json j = {{"theta_label", g.theta_label}, {"u_resolution", g.u_resolution}, {"degenerate", g.degenerate},
              {"rows", rows}};
    if (!g.degenerate) {
        j["slope"] = g.slope;
        j["intercept"] = g.intercept;
        j["residuals"] = g.residuals;
    }
    return j;
}

inline json to_json(const ApproximabilityCertificate& c)
{
    return {{"theta", c.theta.name}, {"kappa", c.kappa}, {"scan_limit", c.scan_limit}, {"c_hat", c.c_hat},
            {"argmin_m", c.argmin_m}};
}

// { "name": str, "components": [decimal strings] }
inline ThetaVector theta_from_json(const json& j)
{
    if (!j.contains("components") || !j["components"].is_array())
        throw std::invalid_argument("theta record needs a components array");
    std::vector<std::string> comps;
    for (const auto& c : j["components"]) {
        if (!c.is_string())
            throw std::invalid_argument("theta components must be decimal strings");
        comps.push_back(c.get<std::string>());
    }
    return theta_from_decimals(comps, j.value("name", std::string("custom")));
}

inline json lattice_json(const ThetaVector& theta)
{
    json comps = json::array();
    for (const auto& c : theta.components)
        comps.push_back(format_real(c.to_double()));
    return {{"kind", "theta"}, {"theta", comps}};
}

inline json lattice_json(const GenericLattice& L)
{
    json b = json::array();
    for (int i = 0; i < L.dim(); ++i) {
        json row = json::array();
        for (int j = 0; j < L.dim(); ++j)
            row.push_back(L.basis()(i, j));
        b.push_back(row);
    }
    return {{"kind", "generic"}, {"basis", b}};
}

// { "kind": "theta" | "generic", "theta": [...], "basis": [[...]] }
inline GenericLattice lattice_from_json(const json& j, ThetaLattice::Role role = ThetaLattice::Role::primal)
{
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "theta") {
        std::vector<std::string> comps;
        for (const auto& c : j.at("theta"))
            comps.push_back(c.is_string() ? c.get<std::string>() : format_real(c.get<double>()));
        std::vector<double> v;
        for (const auto& c : comps)
            v.push_back(std::stod(c));
        return ThetaLattice{theta_from_doubles(v, "custom"), role}.generic();
    }
    if (kind == "generic") {
        const auto& b = j.at("basis");
        int d = int(b.size());
        Mat B(d, d);
        for (int i = 0; i < d; ++i) {
            if (int(b[i].size()) != d)
                throw std::invalid_argument("basis must be square");
            for (int k = 0; k < d; ++k)
                B(i, k) = b[i][k].get<double>();
        }
        return GenericLattice(B);
    }
    throw std::invalid_argument("unknown lattice kind: " + kind);
}

// ---------------------------------------------------------------------------
// SVG

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = 0.0; // log2 y = intercept + slope log2 x
};

inline std::string xml_escape(const std::string& s)
{
    std::string r;
    for (char c : s) {
        switch (c) {
        case '&': r += "&amp;"; break;
        case '<': r += "&lt;"; break;
        case '>': r += "&gt;"; break;
        case '"': r += "&quot;"; break;
        default: r += c;
        }
    }
    return r;
}

inline std::string loglog_svg(const std::vector<PlotSeries>& series, const std::string& title,
                              const std::string& xlabel, const std::string& ylabel)
{
    const double W = 640, H = 440, ml = 70, mr = 20, mt = 40, mb = 55;
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!(s.x[i] > 0) || !(s.y[i] > 0))
                continue;
            x0 = std::min(x0, std::log2(s.x[i]));
            x1 = std::max(x1, std::log2(s.x[i]));
            y0 = std::min(y0, std::log2(s.y[i]));
            y1 = std::max(y1, std::log2(s.y[i]));
        }
    if (x0 > x1) {
        x0 = 0;
        x1 = 1;
        y0 = 0;
        y1 = 1;
    }
    x0 = std::floor(x0);
    x1 = std::max(std::ceil(x1), x0 + 1);
    y0 = std::floor(y0);
    y1 = std::max(std::ceil(y1), y0 + 1);
    auto px = [&](double lx) { return ml + (lx - x0) / (x1 - x0) * (W - ml - mr); };
    auto py = [&](double ly) { return H - mb - (ly - y0) / (y1 - y0) * (H - mt - mb); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    std::ostringstream o;
    char buf[256];
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title) << "</text>\n";
    o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\"" << H - mt - mb
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    int xstep = std::max(1, int((x1 - x0) / 10));
    for (int k = int(x0); k <= int(x1); k += xstep) {
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#ddd\"/>\n"
                      "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\">2^%d</text>\n",
                      px(k), double(mt), px(k), H - mb, px(k), H - mb + 16, k);
        o << buf;
    }
    int ystep = std::max(1, int((y1 - y0) / 8));
    for (int k = int(y0); k <= int(y1); k += ystep) {
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"#ddd\"/>\n"
                      "<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\">2^%d</text>\n",
                      double(ml), py(k), W - mr, py(k), ml - 6, py(k) + 4, k);
        o << buf;
    }
    o << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xml_escape(xlabel)
      << "</text>\n";
    o << "<text transform=\"translate(16," << (mt + H - mb) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << xml_escape(ylabel) << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& S = series[s];
        const char* c = colors[s % 5];
        o << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < S.x.size(); ++i) {
            if (!(S.x[i] > 0) || !(S.y[i] > 0))
                continue;
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(std::log2(S.x[i])), py(std::log2(S.y[i])));
            o << buf;
        }
        o << "\"/>\n";
        for (std::size_t i = 0; i < S.x.size(); ++i) {
            if (!(S.x[i] > 0) || !(S.y[i] > 0))
                continue;
            std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n",
                          px(std::log2(S.x[i])), py(std::log2(S.y[i])), c);
            o << buf;
        }
        std::string legend = S.label;
        if (std::isfinite(S.slope)) {
            std::snprintf(buf, sizeof buf,
                          "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" "
                          "stroke-dasharray=\"5,4\"/>\n",
                          px(x0), py(S.intercept + S.slope * x0), px(x1), py(S.intercept + S.slope * x1), c);
            o << buf;
            std::snprintf(buf, sizeof buf, " (slope %.4f)", S.slope);
            legend += buf;
        }
        std::snprintf(buf, sizeof buf, "<text x=\"%.2f\" y=\"%.2f\" fill=\"%s\">", ml + 10.0,
                      mt + 18.0 + 16.0 * double(s), c);
        o << buf << xml_escape(legend) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

inline std::string growth_svg(const std::vector<GrowthScanResult>& scans)
{
    std::vector<PlotSeries> ser;
    for (const auto& g : scans) {
        PlotSeries s;
        s.label = g.theta_label;
        for (const auto& r : g.rows) {
            s.x.push_back(r.T);
            s.y.push_back(r.sup_proxy);
        }
        if (!g.degenerate) {
            s.slope = g.slope;
            s.intercept = g.intercept;
        }
        ser.push_back(s);
    }
    return loglog_svg(ser, "sup over u of |S| (grid proxy)", "T", "sup proxy");
}

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write " + path);
    f << text;
}

} // namespace latsum
