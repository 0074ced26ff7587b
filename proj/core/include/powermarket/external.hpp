#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "powermarket/stats.hpp"

namespace powermarket {

class IngestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientTail : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RejectedRow {
    std::size_t line = 0;
    std::string reason;
};

struct ExternalPriceSeries {
    std::string label;
    std::filesystem::path source;
    std::vector<double> prices;
    std::vector<RejectedRow> rejected;
};

// Reads one numeric price column from a delimited text file (',', ';' or
// tab). `column` is a header name or a 0-based index; when empty, a column
// named "price" is used if present, otherwise the first column whose first
// data row is numeric. A header row is detected when the selected field of
// the first line is not numeric. Rows whose price is missing, non-numeric,
// non-finite or negative are rejected and reported.
ExternalPriceSeries ingest_prices(const std::filesystem::path& path,
                                  const std::string& column = {},
                                  const std::string& label = {});

struct TailFit {
    double slope = 0.0;
    double intercept = 0.0;
    double threshold = 0.0;  // lower edge of the tail (90th percentile)
    std::size_t bins = 0;    // nonempty bins used in the fit
};

// Least-squares slope of log(mass) against log(bin midpoint) over the
// nonempty bins whose lower edge is at or above the 90th percentile of
// `values`, each bin weighted by its count. Throws InsufficientTail with
// fewer than 5 such bins.
TailFit tail_slope(std::span<const double> values, double bin_width = 1.0);

struct SeriesComparison {
    std::string label;
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;
    TailFit tail;
};

struct ComparisonReport {
    SeriesComparison model;
    SeriesComparison external;
    double slope_difference = 0.0;  // model - external
    double ks_distance = 0.0;       // sup |ECDF_model - ECDF_external|
};

ComparisonReport compare(std::span<const double> model, std::string model_label,
                         std::span<const double> external, std::string external_label,
                         double bin_width = 1.0);

// Writes compare_ecdf.csv (series,x,cdf), compare_density.csv
// (series,bin_lo,mass) and compare_report.json into `dir`.
void write_comparison(const std::filesystem::path& dir, std::span<const double> model,
                      std::span<const double> external, const ComparisonReport& report,
                      double bin_width = 1.0);

// Two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(const Ecdf& a, const Ecdf& b);

}  // namespace powermarket
