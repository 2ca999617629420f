#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bbsig/features.hpp"
#include "bbsig/gaze.hpp"
#include "bbsig/hota.hpp"

namespace bbsig {

enum class ReportFormat { Csv, Json };

/// Provenance header embedded in every report: tool version plus the
/// resolved configuration (seeds included).
struct ReportHeader {
    std::string tool = "bbsig";
    std::string version = "1.0.0";
    std::vector<std::pair<std::string, std::string>> config;
};

/// One decimal on a 0-100 scale, e.g. "38.5".
std::string format_metric(double ratio);

struct HotaReportRow {
    std::string method;
    HotaResult result;
};

void write_hota_report(std::ostream& out, const std::vector<HotaReportRow>& rows,
                       ReportFormat format, bool per_alpha, const ReportHeader& header);

struct DwellReportRow {
    DwellRecord record;
    double median_ms = 0.0;  // across drivers, repeated per row
};

void write_dwell_report(std::ostream& out, const std::vector<DwellRecord>& records,
                        ReportFormat format, const ReportHeader& header);

/// Category census: billboard counts per category plus per-billboard rows.
struct CategoryReport {
    std::array<int, 3> counts{0, 0, 0};  // None, Short, Long
    std::vector<std::pair<int, SignificanceCategory>> per_billboard;
    std::map<int, double> median_ms;
};

void write_category_report(std::ostream& out, const CategoryReport& report,
                           ReportFormat format, const ReportHeader& header);

void write_confusion_report(std::ostream& out, const std::array<std::array<int, 3>, 3>& m,
                            ReportFormat format, const ReportHeader& header);

struct FeatureRow {
    int billboard_id = 0;
    FeatureVector features;
    std::string label;  // empty when unknown
};

void write_features_csv(std::ostream& out, const std::vector<FeatureRow>& rows);
std::vector<FeatureRow> parse_features_csv(std::istream& in);

void write_importance_report(std::ostream& out, const std::vector<double>& mdi,
                             const std::vector<double>& permutation,
                             ReportFormat format, const ReportHeader& header);

}  // namespace bbsig
