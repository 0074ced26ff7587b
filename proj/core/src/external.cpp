#include "powermarket/external.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "powermarket/csv.hpp"

namespace powermarket {

namespace {

std::optional<std::size_t> as_index(const std::string& s) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

bool numeric(const std::vector<std::string>& row, std::size_t col) {
    return col < row.size() && parse_double(row[col]).has_value();
}

std::string lowered(std::string s) {
    for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    // Nearest-rank quantile.
    const auto n = sorted.size();
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted[rank - 1];
}

SeriesComparison describe(std::span<const double> values, std::string label, double bin_width) {
    if (values.empty()) throw EmptyInput("compare: series '" + label + "' is empty");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    SeriesComparison s;
    s.label = std::move(label);
    s.count = sorted.size();
    s.mean = batch_mean_variance(values).mean;
    s.median = quantile_sorted(sorted, 0.5);
    s.min = sorted.front();
    s.max = sorted.back();
    s.tail = tail_slope(values, bin_width);
    return s;
}

}  // namespace

ExternalPriceSeries ingest_prices(const std::filesystem::path& path, const std::string& column,
                                  const std::string& label) {
    if (!std::filesystem::is_regular_file(path)) throw IoError(path, "not a readable file");
    CsvTable raw = read_delimited(path, false);
    if (raw.rows.empty()) throw IngestError(path.string() + ": no data rows");

    const auto& first = raw.rows.front();
    std::optional<std::size_t> col;
    bool header = false;
    if (!column.empty()) {
        col = as_index(column);
        if (!col) {
            for (std::size_t i = 0; i < first.size(); ++i)
                if (first[i] == column) col = i;
            if (!col) throw IngestError(path.string() + ": no column named '" + column + "'");
            header = true;
        }
    } else {
        for (std::size_t i = 0; i < first.size(); ++i)
            if (lowered(first[i]) == "price") {
                col = i;
                header = true;
            }
        if (!col) {
            const bool first_numeric_row =
                std::any_of(first.begin(), first.end(),
                            [](const std::string& f) { return parse_double(f).has_value(); });
            const std::size_t probe = first_numeric_row || raw.rows.size() < 2 ? 0 : 1;
            for (std::size_t i = 0; i < raw.rows[probe].size() && !col; ++i)
                if (numeric(raw.rows[probe], i)) col = i;
        }
        if (!col) throw IngestError(path.string() + ": no numeric column found");
    }
    if (!header) header = !numeric(first, *col);

    ExternalPriceSeries series;
    series.source = path;
    series.label = label.empty() ? path.stem().string() : label;
    for (std::size_t r = header ? 1 : 0; r < raw.rows.size(); ++r) {
        const auto& row = raw.rows[r];
        const std::size_t line = raw.lines[r];
        if (*col >= row.size()) {
            series.rejected.push_back({line, "missing price field"});
            continue;
        }
        const auto v = parse_double(row[*col]);
        if (!v) {
            series.rejected.push_back({line, "non-numeric price '" + row[*col] + "'"});
        } else if (!std::isfinite(*v)) {
            series.rejected.push_back({line, "non-finite price"});
        } else if (*v < 0.0) {
            series.rejected.push_back({line, "negative price"});
        } else {
            series.prices.push_back(*v);
        }
    }
    if (series.prices.empty())
        throw IngestError(path.string() + ": no valid prices (" +
                          std::to_string(series.rejected.size()) + " rows rejected)");
    return series;
}

TailFit tail_slope(std::span<const double> values, double bin_width) {
    if (values.empty()) throw EmptyInput("tail_slope: empty input");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    TailFit fit;
    fit.threshold = quantile_sorted(sorted, 0.9);

    const UnitBinDensity density(values, bin_width);
    std::vector<double> xs, ys, ws;
    for (const auto& [bin, count] : density.counts()) {
        const double lo = density.bin_lo(bin);
        const double mid = lo + 0.5 * bin_width;
        if (lo < fit.threshold || count == 0 || mid <= 0.0) continue;
        xs.push_back(std::log(mid));
        ys.push_back(std::log(density.mass(bin)));
        ws.push_back(static_cast<double>(count));
    }
    fit.bins = xs.size();
    if (xs.size() < 5)
        throw InsufficientTail("tail_slope: only " + std::to_string(xs.size()) +
                               " nonempty bins in the top decile (need 5)");
    // Weighted by bin count: the variance of log(count) is about 1 / count.
    double sw = 0.0, mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sw += ws[i];
        mx += ws[i] * xs[i];
        my += ws[i] * ys[i];
    }
    mx /= sw;
    my /= sw;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += ws[i] * (xs[i] - mx) * (ys[i] - my);
        sxx += ws[i] * (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0.0) throw InsufficientTail("tail_slope: degenerate tail");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

double ks_two_sample(const Ecdf& a, const Ecdf& b) {
    const auto& x = a.sorted_values();
    const auto& y = b.sorted_values();
    const double n = static_cast<double>(x.size());
    const double m = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double t = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= t) ++i;
        while (j < y.size() && y[j] <= t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    return d;
}

ComparisonReport compare(std::span<const double> model, std::string model_label,
                         std::span<const double> external, std::string external_label,
                         double bin_width) {
    ComparisonReport r;
    r.model = describe(model, std::move(model_label), bin_width);
    r.external = describe(external, std::move(external_label), bin_width);
    r.slope_difference = r.model.tail.slope - r.external.tail.slope;
    r.ks_distance = ks_two_sample(Ecdf({model.begin(), model.end()}),
                                  Ecdf({external.begin(), external.end()}));
    return r;
}

void write_comparison(const std::filesystem::path& dir, std::span<const double> model,
                      std::span<const double> external, const ComparisonReport& report,
                      double bin_width) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(dir, "cannot create directory: " + ec.message());

    {
        CsvWriter out(dir / "compare_ecdf.csv", {"series", "x", "cdf"});
        for (const auto& [label, values] :
             {std::pair{report.model.label, model}, std::pair{report.external.label, external}}) {
            for (const auto& [x, p] : Ecdf({values.begin(), values.end()}).steps()) {
                out.field(label).field(x).field(p);
                out.end_row();
            }
        }
        out.close();
    }
    {
        CsvWriter out(dir / "compare_density.csv", {"series", "bin_lo", "mass"});
        for (const auto& [label, values] :
             {std::pair{report.model.label, model}, std::pair{report.external.label, external}}) {
            for (const auto& [lo, m] : UnitBinDensity(values, bin_width).masses()) {
                out.field(label).field(lo).field(m);
                out.end_row();
            }
        }
        out.close();
    }

    using nlohmann::ordered_json;
    auto side = [](const SeriesComparison& s) {
        return ordered_json{{"label", s.label},
                            {"count", s.count},
                            {"mean", s.mean},
                            {"median", s.median},
                            {"min", s.min},
                            {"max", s.max},
                            {"tail_threshold", s.tail.threshold},
                            {"tail_bins", s.tail.bins},
                            {"tail_slope", s.tail.slope}};
    };
    ordered_json j{{"model", side(report.model)},
                   {"external", side(report.external)},
                   {"slope_difference", report.slope_difference},
                   {"ks_distance", report.ks_distance},
                   {"bin_width", bin_width}};
    const auto path = dir / "compare_report.json";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(path, "cannot open for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError(path, "write failed");
}

}  // namespace powermarket
