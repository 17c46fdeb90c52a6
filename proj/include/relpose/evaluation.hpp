#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relpose/manifest.hpp"

namespace relpose {

struct PairError {
    std::int64_t pair_id = 0;
    double roe_deg = 0.0;
    double rte_deg = 0.0;
};

struct MethodReport {
    std::string method;
    std::vector<PairError> errors;      // sorted by pair_id
    std::vector<double> cum_roe;        // aligned with ErrorReport::bin_edges
    std::vector<double> cum_rte;
    double median_roe_deg = 0.0;
    double median_rte_deg = 0.0;
};

// Per-pair errors plus normalized cumulative histograms for one or more
// methods over the same bin edges.
struct ErrorReport {
    std::vector<double> bin_edges;
    std::vector<MethodReport> methods;
};

// Even count: mean of the two central values. Throws EmptyInput.
double median(std::vector<double> values);

// ROE/RTE per pair, aligned with the manifest by index.
// Throws LengthMismatch when the counts differ.
std::vector<PairError> evaluate(const std::vector<RelativePose>& predictions,
                                const PairManifest& manifest);

// Value at edge e = (#errors <= e) / N. Edges must be strictly increasing;
// throws EmptyInput when there are no errors.
std::vector<double> cumulative_histogram(const std::vector<double>& errors_deg,
                                         const std::vector<double>& bin_edges);

// 0, 1, 2, ..., 180
std::vector<double> default_bin_edges();

// Computes histograms and medians for a method and appends it to the report.
void add_method(ErrorReport& report, const std::string& method,
                std::vector<PairError> errors);

struct SummaryRow {
    std::string method;
    double median_roe_deg = 0.0;
    double median_rte_deg = 0.0;
};

std::vector<SummaryRow> summarize(const ErrorReport& report);

// CSV `method,median_roe_deg,median_rte_deg`
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path);

// Full-precision JSON round trip of the whole report.
void write_report_json(const ErrorReport& report, const std::string& path);
ErrorReport read_report_json(const std::string& path);

// CSV `pair_id,method,roe_deg,rte_deg`
void write_report_csv(const ErrorReport& report, const std::string& path);

enum class ErrorKind { Orientation, Translation };

// Deterministic SVG: one cumulative polyline per method, axes 0-180 degrees
// by 0-1.
void plot_cumulative(const ErrorReport& report, const std::string& path,
                     ErrorKind kind = ErrorKind::Orientation);

}  // namespace relpose
