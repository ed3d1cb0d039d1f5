#include "chaoskit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "chaoskit/config.hpp"
#include "chaoskit/errors.hpp"

namespace chaoskit {

namespace {

std::string sig17(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

// Compact formatting for labels and file names: up to 12 digits, no
// trailing zeros.
std::string compact(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

void write_file(const std::string& body, const std::filesystem::path& destination) {
    std::ofstream out(destination, std::ios::binary);
    if (!out) throw Error("cannot open '" + destination.string() + "' for writing");
    out << body;
    if (!out) throw Error("failed writing '" + destination.string() + "'");
}

}  // namespace

std::string render_csv(const RateReport& report) {
    std::ostringstream out;
    out << "study,p,abscissa,error_mean,error_stderr,reps\n";
    for (const auto& row : report.rows) {
        out << report.study << ',' << sig17(report.p) << ',' << sig17(row.abscissa) << ','
            << sig17(row.error_mean) << ',' << sig17(row.error_stderr) << ',' << row.repetitions
            << '\n';
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out << "slope," << sig17(report.fit ? report.fit->slope : nan) << '\n';
    out << "intercept," << sig17(report.fit ? report.fit->intercept : nan) << '\n';
    out << "r_squared," << sig17(report.fit ? report.fit->r_squared : nan) << '\n';
    return out.str();
}

void emit_csv(const RateReport& report, const std::filesystem::path& destination) {
    write_file(render_csv(report), destination);
}

std::string render_loglog_chart(const RateReport& report) {
    if (report.rows.size() < 2) {
        throw InvalidInputError("chart needs a report with at least 2 rows");
    }
    std::vector<std::pair<double, double>> points;
    for (const auto& row : report.rows) {
        if (row.abscissa > 0.0 && row.error_mean > 0.0) {
            points.emplace_back(std::log10(row.abscissa), std::log10(row.error_mean));
        }
    }
    if (points.size() < 2) {
        throw InvalidInputError("chart needs at least 2 rows with positive errors");
    }

    const double ref_slope = report.study == "strong_in_dt" ? 0.5 : -0.5;

    double min_x = points.front().first, max_x = points.front().first;
    double min_y = points.front().second, max_y = points.front().second;
    for (const auto& [x, y] : points) {
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
    }
    // Reference line through the first point spans the x range; widen y to
    // keep it inside the frame.
    const auto ref_y = [&](double x) {
        return points.front().second + ref_slope * (x - points.front().first);
    };
    min_y = std::min({min_y, ref_y(min_x), ref_y(max_x)});
    max_y = std::max({max_y, ref_y(min_x), ref_y(max_x)});
    const double pad_x = 0.06 * std::max(max_x - min_x, 1e-12);
    const double pad_y = 0.10 * std::max(max_y - min_y, 1e-12);
    min_x -= pad_x;
    max_x += pad_x;
    min_y -= pad_y;
    max_y += pad_y;

    const double width = 640.0, height = 460.0;
    const double left = 70.0, right = 20.0, top = 40.0, bottom = 50.0;
    const auto px = [&](double x) {
        return left + (x - min_x) / (max_x - min_x) * (width - left - right);
    };
    const auto py = [&](double y) {
        return height - bottom - (y - min_y) / (max_y - min_y) * (height - top - bottom);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\""
        << " font-size=\"15\">" << report.study << "  (p=" << compact(report.p) << ")</text>\n";

    // Axes.
    svg << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right
        << "\" y2=\"" << height - bottom << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << height - bottom << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << (report.study == "strong_in_dt" ? "dt" : "N") << " (log scale)</text>\n";
    svg << "<text x=\"16\" y=\"" << (top + height - bottom) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 16 " << (top + height - bottom) / 2
        << ")\">error (log scale)</text>\n";

    // Tick labels at the data abscissae and at the y extremes.
    for (const auto& row : report.rows) {
        if (!(row.abscissa > 0.0) || !(row.error_mean > 0.0)) continue;
        const double x = px(std::log10(row.abscissa));
        svg << "<line x1=\"" << x << "\" y1=\"" << height - bottom << "\" x2=\"" << x << "\" y2=\""
            << height - bottom + 5 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << x << "\" y=\"" << height - bottom + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << compact(row.abscissa) << "</text>\n";
    }

    // Dashed half-order reference through the first plotted point.
    svg << "<line x1=\"" << px(min_x) << "\" y1=\"" << py(ref_y(min_x)) << "\" x2=\""
        << px(max_x) << "\" y2=\"" << py(ref_y(max_x))
        << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
    svg << "<text x=\"" << width - right - 8 << "\" y=\"" << top + 16
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"gray\">"
        << "reference slope " << compact(ref_slope) << "</text>\n";

    // Measured series.
    svg << "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : points) svg << px(x) << ',' << py(y) << ' ';
    svg << "\"/>\n";
    for (const auto& [x, y] : points) {
        svg << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y)
            << "\" r=\"3.5\" fill=\"#1f5fbf\"/>\n";
    }

    char fitted[64];
    if (report.fit) {
        std::snprintf(fitted, sizeof(fitted), "fitted slope %.3f", report.fit->slope);
    } else {
        std::snprintf(fitted, sizeof(fitted), "fitted slope n/a");
    }
    svg << "<text x=\"" << width - right - 8 << "\" y=\"" << top + 34
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">" << fitted
        << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

void emit_loglog_chart(const RateReport& report, const std::filesystem::path& destination) {
    write_file(render_loglog_chart(report), destination);
}

std::string render_manifest(const RunManifest& manifest) {
    nlohmann::ordered_json doc;
    doc["tool_version"] = manifest.tool_version;
    doc["config"] = nlohmann::ordered_json::parse(echo_config(manifest.config));
    doc["seeds"] = manifest.config.seeds;
    nlohmann::ordered_json reports = nlohmann::ordered_json::array();
    for (const auto& report : manifest.reports) {
        nlohmann::ordered_json entry;
        entry["study"] = report.study;
        entry["p"] = report.p;
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (const auto& row : report.rows) {
            rows.push_back({{"abscissa", row.abscissa},
                            {"error_mean", row.error_mean},
                            {"error_stderr", row.error_stderr},
                            {"reps", row.repetitions}});
        }
        entry["rows"] = rows;
        if (report.fit) {
            entry["slope"] = report.fit->slope;
            entry["intercept"] = report.fit->intercept;
            entry["r_squared"] = report.fit->r_squared;
        } else {
            entry["slope"] = nullptr;
            entry["intercept"] = nullptr;
            entry["r_squared"] = nullptr;
        }
        reports.push_back(std::move(entry));
    }
    doc["reports"] = std::move(reports);
    doc["duration_seconds"] = manifest.duration_seconds;
    return doc.dump(2) + "\n";
}

void emit_manifest(const RunManifest& manifest, const std::filesystem::path& destination) {
    write_file(render_manifest(manifest), destination);
}

std::string report_file_stem(const RateReport& report) {
    return report.study + "_p" + compact(report.p);
}

}  // namespace chaoskit
