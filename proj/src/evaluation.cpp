#include "relpose/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace relpose {

double median(std::vector<double> values) {
    if (values.empty()) throw EmptyInput("evaluation: median of empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<PairError> evaluate(const std::vector<RelativePose>& predictions,
                                const PairManifest& manifest) {
    if (predictions.size() != manifest.size())
        throw LengthMismatch("evaluation: " + std::to_string(predictions.size()) +
                             " predictions vs " + std::to_string(manifest.size()) +
                             " manifest records");
    std::vector<PairError> errors;
    errors.reserve(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const RelativePose& gt = manifest.records[i].ground_truth;
        errors.push_back(PairError{static_cast<std::int64_t>(i),
                                   roe_deg(predictions[i].dq, gt.dq),
                                   rte_deg(predictions[i].dt, gt.dt)});
    }
    return errors;
}

std::vector<double> cumulative_histogram(const std::vector<double>& errors_deg,
                                         const std::vector<double>& bin_edges) {
    if (errors_deg.empty()) throw EmptyInput("evaluation: cumulative histogram of empty sample");
    for (std::size_t i = 1; i < bin_edges.size(); ++i)
        if (!(bin_edges[i] > bin_edges[i - 1]))
            throw InvalidRange("evaluation: bin edges must be strictly increasing");

    std::vector<double> sorted = errors_deg;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> series;
    series.reserve(bin_edges.size());
    for (double edge : bin_edges) {
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), edge);
        series.push_back(static_cast<double>(it - sorted.begin()) / sorted.size());
    }
    return series;
}

std::vector<double> default_bin_edges() {
    std::vector<double> edges(181);
    for (int i = 0; i <= 180; ++i) edges[static_cast<std::size_t>(i)] = i;
    return edges;
}

void add_method(ErrorReport& report, const std::string& method, std::vector<PairError> errors) {
    if (report.bin_edges.empty()) report.bin_edges = default_bin_edges();
    std::sort(errors.begin(), errors.end(),
              [](const PairError& a, const PairError& b) { return a.pair_id < b.pair_id; });

    MethodReport m;
    m.method = method;
    std::vector<double> roe, rte;
    roe.reserve(errors.size());
    rte.reserve(errors.size());
    for (const PairError& e : errors) {
        roe.push_back(e.roe_deg);
        rte.push_back(e.rte_deg);
    }
    m.errors = std::move(errors);
    m.cum_roe = cumulative_histogram(roe, report.bin_edges);
    m.cum_rte = cumulative_histogram(rte, report.bin_edges);
    m.median_roe_deg = median(roe);
    m.median_rte_deg = median(rte);
    report.methods.push_back(std::move(m));
}

std::vector<SummaryRow> summarize(const ErrorReport& report) {
    std::vector<SummaryRow> rows;
    rows.reserve(report.methods.size());
    for (const MethodReport& m : report.methods)
        rows.push_back(SummaryRow{m.method, m.median_roe_deg, m.median_rte_deg});
    return rows;
}

namespace {

// Shortest decimal form that round-trips a double, for stable text output.
std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    double parsed = 0.0;
    std::sscanf(buf, "%lf", &parsed);
    for (int prec = 1; prec <= 16; ++prec) {
        char probe[40];
        std::snprintf(probe, sizeof probe, "%.*g", prec, v);
        std::sscanf(probe, "%lf", &parsed);
        if (parsed == v) return probe;
    }
    return buf;
}

}  // namespace

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoFailure("evaluation: cannot open '" + path + "' for writing");
    os << "method,median_roe_deg,median_rte_deg\n";
    for (const SummaryRow& r : rows)
        os << r.method << "," << fmt_double(r.median_roe_deg) << ","
           << fmt_double(r.median_rte_deg) << "\n";
    if (!os) throw IoFailure("evaluation: write to '" + path + "' failed");
}

void write_report_json(const ErrorReport& report, const std::string& path) {
    nlohmann::ordered_json j;
    j["bin_edges"] = report.bin_edges;
    j["methods"] = nlohmann::ordered_json::array();
    for (const MethodReport& m : report.methods) {
        nlohmann::ordered_json jm;
        jm["method"] = m.method;
        jm["median_roe_deg"] = m.median_roe_deg;
        jm["median_rte_deg"] = m.median_rte_deg;
        jm["cum_roe"] = m.cum_roe;
        jm["cum_rte"] = m.cum_rte;
        jm["pairs"] = nlohmann::ordered_json::array();
        for (const PairError& e : m.errors) {
            nlohmann::ordered_json je;
            je["id"] = e.pair_id;
            je["roe_deg"] = e.roe_deg;
            je["rte_deg"] = e.rte_deg;
            jm["pairs"].push_back(std::move(je));
        }
        j["methods"].push_back(std::move(jm));
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoFailure("evaluation: cannot open '" + path + "' for writing");
    os << j.dump(2) << "\n";
    if (!os) throw IoFailure("evaluation: write to '" + path + "' failed");
}

ErrorReport read_report_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoFailure("evaluation: cannot open report '" + path + "'");
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoFailure("evaluation: bad report JSON in '" + path + "': " + e.what());
    }
    ErrorReport report;
    try {
        report.bin_edges = j.at("bin_edges").get<std::vector<double>>();
        for (const auto& jm : j.at("methods")) {
            MethodReport m;
            m.method = jm.at("method").get<std::string>();
            m.median_roe_deg = jm.at("median_roe_deg").get<double>();
            m.median_rte_deg = jm.at("median_rte_deg").get<double>();
            m.cum_roe = jm.at("cum_roe").get<std::vector<double>>();
            m.cum_rte = jm.at("cum_rte").get<std::vector<double>>();
            for (const auto& je : jm.at("pairs"))
                m.errors.push_back(PairError{je.at("id").get<std::int64_t>(),
                                             je.at("roe_deg").get<double>(),
                                             je.at("rte_deg").get<double>()});
            report.methods.push_back(std::move(m));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoFailure("evaluation: report '" + path + "' missing field: " + e.what());
    }
    return report;
}

void write_report_csv(const ErrorReport& report, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoFailure("evaluation: cannot open '" + path + "' for writing");
    os << "pair_id,method,roe_deg,rte_deg\n";
    for (const MethodReport& m : report.methods)
        for (const PairError& e : m.errors)
            os << e.pair_id << "," << m.method << "," << fmt_double(e.roe_deg) << ","
               << fmt_double(e.rte_deg) << "\n";
    if (!os) throw IoFailure("evaluation: write to '" + path + "' failed");
}

void plot_cumulative(const ErrorReport& report, const std::string& path, ErrorKind kind) {
    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                     "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
    const int width = 640, height = 480;
    const double x0 = 60, y0 = 40, plot_w = 540, plot_h = 380;
    const char* title = kind == ErrorKind::Orientation ? "Relative orientation error"
                                                       : "Relative translation error";

    auto px = [&](double deg) { return x0 + plot_w * deg / 180.0; };
    auto py = [&](double frac) { return y0 + plot_h * (1.0 - frac); };

    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoFailure("evaluation: cannot open '" + path + "' for writing");
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << x0 + plot_w / 2 << "\" y=\"24\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

    // axes and ticks
    os << "<g stroke=\"black\" fill=\"none\">\n";
    os << "<polyline points=\"" << fmt_double(x0) << "," << fmt_double(y0) << " "
       << fmt_double(x0) << "," << fmt_double(y0 + plot_h) << " "
       << fmt_double(x0 + plot_w) << "," << fmt_double(y0 + plot_h) << "\"/>\n";
    os << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
    for (int deg = 0; deg <= 180; deg += 30) {
        os << "<line x1=\"" << fmt_double(px(deg)) << "\" y1=\"" << fmt_double(y0 + plot_h)
           << "\" x2=\"" << fmt_double(px(deg)) << "\" y2=\"" << fmt_double(y0 + plot_h + 5)
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt_double(px(deg)) << "\" y=\"" << fmt_double(y0 + plot_h + 18)
           << "\" text-anchor=\"middle\">" << deg << "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        const double frac = 0.25 * i;
        os << "<line x1=\"" << fmt_double(x0 - 5) << "\" y1=\"" << fmt_double(py(frac))
           << "\" x2=\"" << fmt_double(x0) << "\" y2=\"" << fmt_double(py(frac))
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt_double(x0 - 9) << "\" y=\"" << fmt_double(py(frac) + 4)
           << "\" text-anchor=\"end\">" << fmt_double(frac) << "</text>\n";
    }
    os << "<text x=\"" << fmt_double(x0 + plot_w / 2) << "\" y=\""
       << fmt_double(y0 + plot_h + 34) << "\" text-anchor=\"middle\">error [deg]</text>\n";
    os << "</g>\n";

    int color = 0;
    for (const MethodReport& m : report.methods) {
        const std::vector<double>& series =
            kind == ErrorKind::Orientation ? m.cum_roe : m.cum_rte;
        if (series.size() != report.bin_edges.size())
            throw LengthMismatch("evaluation: cumulative series does not match bin edges");
        os << "<polyline fill=\"none\" stroke=\"" << kPalette[color % 8]
           << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (i) os << " ";
            os << fmt_double(px(report.bin_edges[i])) << "," << fmt_double(py(series[i]));
        }
        os << "\"/>\n";
        os << "<text x=\"" << fmt_double(x0 + plot_w - 8) << "\" y=\""
           << fmt_double(y0 + 16 + 16 * color) << "\" text-anchor=\"end\" "
           << "font-family=\"sans-serif\" font-size=\"12\" fill=\"" << kPalette[color % 8]
           << "\">" << m.method << "</text>\n";
        ++color;
    }
    os << "</svg>\n";
    if (!os) throw IoFailure("evaluation: write to '" + path + "' failed");
}

}  // namespace relpose
