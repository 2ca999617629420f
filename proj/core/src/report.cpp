#include "bbsig/report.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

namespace bbsig {

namespace {

using ordered_json = nlohmann::ordered_json;

void csv_header(std::ostream& out, const ReportHeader& h) {
    out << "# " << h.tool << ' ' << h.version << '\n';
    for (const auto& [k, v] : h.config) out << "# " << k << '=' << v << '\n';
}

ordered_json json_header(const ReportHeader& h) {
    ordered_json j;
    j["tool"] = h.tool;
    j["version"] = h.version;
    ordered_json cfg;
    for (const auto& [k, v] : h.config) cfg[k] = v;
    j["config"] = std::move(cfg);
    return j;
}

ordered_json hota_json(const HotaResult& r, bool per_alpha) {
    ordered_json j;
    j["HOTA"] = r.hota;
    j["DetPr"] = r.det_pr;
    j["DetRe"] = r.det_re;
    j["DetA"] = r.det_a;
    j["AssPr"] = r.ass_pr;
    j["AssRe"] = r.ass_re;
    j["AssA"] = r.ass_a;
    j["Loc"] = r.loc_a;
    if (per_alpha) {
        auto& arr = j["per_alpha"] = ordered_json::array();
        for (const auto& a : r.per_alpha) {
            arr.push_back({{"alpha", a.alpha},
                           {"TP", a.tp},
                           {"FN", a.fn},
                           {"FP", a.fp},
                           {"HOTA", a.hota},
                           {"DetPr", a.det_pr},
                           {"DetRe", a.det_re},
                           {"DetA", a.det_a},
                           {"AssPr", a.ass_pr},
                           {"AssRe", a.ass_re},
                           {"AssA", a.ass_a},
                           {"Loc", a.loc_a}});
        }
    }
    return j;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string format_metric(double ratio) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", 100.0 * ratio);
    return buf;
}

void write_hota_report(std::ostream& out, const std::vector<HotaReportRow>& rows,
                       ReportFormat format, bool per_alpha, const ReportHeader& header) {
    if (format == ReportFormat::Json) {
        ordered_json doc = json_header(header);
        auto& arr = doc["methods"] = ordered_json::array();
        for (const auto& row : rows) {
            ordered_json j = hota_json(row.result, per_alpha);
            ordered_json item;
            item["method"] = row.method;
            for (auto& [k, v] : j.items()) item[k] = v;
            arr.push_back(std::move(item));
        }
        out << doc.dump(1) << '\n';
        return;
    }
    csv_header(out, header);
    out << "Method,HOTA,DetPr,DetRe,DetA,AssPr,AssRe,AssA,Loc\n";
    for (const auto& row : rows) {
        const auto& r = row.result;
        out << csv_escape(row.method) << ',' << format_metric(r.hota) << ','
            << format_metric(r.det_pr) << ',' << format_metric(r.det_re) << ','
            << format_metric(r.det_a) << ',' << format_metric(r.ass_pr) << ','
            << format_metric(r.ass_re) << ',' << format_metric(r.ass_a) << ','
            << format_metric(r.loc_a) << '\n';
        if (per_alpha) {
            for (const auto& a : r.per_alpha) {
                out << csv_escape(row.method) << "@alpha=" << format_double(a.alpha) << ','
                    << format_metric(a.hota) << ',' << format_metric(a.det_pr) << ','
                    << format_metric(a.det_re) << ',' << format_metric(a.det_a) << ','
                    << format_metric(a.ass_pr) << ',' << format_metric(a.ass_re) << ','
                    << format_metric(a.ass_a) << ',' << format_metric(a.loc_a) << '\n';
            }
        }
    }
}

void write_dwell_report(std::ostream& out, const std::vector<DwellRecord>& records,
                        ReportFormat format, const ReportHeader& header) {
    if (format == ReportFormat::Json) {
        ordered_json doc = json_header(header);
        auto& arr = doc["dwell"] = ordered_json::array();
        for (const auto& r : records) {
            arr.push_back({{"billboard_id", r.billboard_id},
                           {"driver_id", r.driver_id},
                           {"frames_gazed", r.frames_gazed},
                           {"gaze_ms", r.gaze_ms},
                           {"frames_visible", r.frames_visible}});
        }
        out << doc.dump(1) << '\n';
        return;
    }
    csv_header(out, header);
    out << "billboard_id,driver_id,frames_gazed,gaze_ms,frames_visible\n";
    for (const auto& r : records) {
        out << r.billboard_id << ',' << csv_escape(r.driver_id) << ',' << r.frames_gazed
            << ',' << format_double(r.gaze_ms) << ',' << r.frames_visible << '\n';
    }
}

void write_category_report(std::ostream& out, const CategoryReport& report,
                           ReportFormat format, const ReportHeader& header) {
    if (format == ReportFormat::Json) {
        ordered_json doc = json_header(header);
        doc["counts"] = {{"None", report.counts[0]},
                         {"Short", report.counts[1]},
                         {"Long", report.counts[2]}};
        auto& arr = doc["billboards"] = ordered_json::array();
        for (const auto& [id, cat] : report.per_billboard) {
            ordered_json item{{"id", id}, {"category", to_string(cat)}};
            const auto it = report.median_ms.find(id);
            if (it != report.median_ms.end()) item["median_ms"] = it->second;
            arr.push_back(std::move(item));
        }
        out << doc.dump(1) << '\n';
        return;
    }
    csv_header(out, header);
    out << "category,count\n";
    out << "None," << report.counts[0] << '\n';
    out << "Short," << report.counts[1] << '\n';
    out << "Long," << report.counts[2] << '\n';
    out << "billboard_id,category,median_ms\n";
    for (const auto& [id, cat] : report.per_billboard) {
        out << id << ',' << to_string(cat);
        const auto it = report.median_ms.find(id);
        if (it != report.median_ms.end()) out << ',' << format_double(it->second);
        out << '\n';
    }
}

void write_confusion_report(std::ostream& out, const std::array<std::array<int, 3>, 3>& m,
                            ReportFormat format, const ReportHeader& header) {
    static const char* kNames[3] = {"None", "Short", "Long"};
    if (format == ReportFormat::Json) {
        ordered_json doc = json_header(header);
        ordered_json rows;
        for (int i = 0; i < 3; ++i) {
            ordered_json row;
            for (int j = 0; j < 3; ++j) row[kNames[j]] = m[std::size_t(i)][std::size_t(j)];
            rows[kNames[i]] = std::move(row);
        }
        doc["confusion"] = std::move(rows);
        out << doc.dump(1) << '\n';
        return;
    }
    csv_header(out, header);
    out << "true\\pred,None,Short,Long\n";
    for (int i = 0; i < 3; ++i) {
        out << kNames[i];
        for (int j = 0; j < 3; ++j) out << ',' << m[std::size_t(i)][std::size_t(j)];
        out << '\n';
    }
}

void write_features_csv(std::ostream& out, const std::vector<FeatureRow>& rows) {
    out << "billboard_id,f1,f2,f3,f4,f5,f6,f7,label\n";
    for (const auto& r : rows) {
        const auto v = r.features.as_row();
        out << r.billboard_id;
        for (double x : v) out << ',' << format_double(x);
        out << ',' << r.label << '\n';
    }
}

std::vector<FeatureRow> parse_features_csv(std::istream& in) {
    std::vector<FeatureRow> rows;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        if (!header_seen) {
            header_seen = true;
            if (line.rfind("billboard_id", 0) == 0) continue;
        }
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t pos = line.find(',', start);
            if (pos == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }
        if (fields.size() != 8 && fields.size() != 9)
            throw ParseError(lineno, "expected billboard_id,f1..f7[,label]");
        FeatureRow r;
        auto num = [&](const std::string& s, const char* what) {
            double v = 0.0;
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
                throw ParseError(lineno, std::string("invalid ") + what + " '" + s + "'");
            return v;
        };
        r.billboard_id = int(num(fields[0], "billboard_id"));
        r.features.f1_visibility_frames = num(fields[1], "f1");
        r.features.f2_region_code = num(fields[2], "f2");
        r.features.f3_center_distance = num(fields[3], "f3");
        r.features.f4_mean_area = num(fields[4], "f4");
        r.features.f5_top10_area = num(fields[5], "f5");
        r.features.f6_mean_saliency = num(fields[6], "f6");
        r.features.f7_saliency_ratio = num(fields[7], "f7");
        if (fields.size() == 9) {
            r.label = fields[8];
            if (!r.label.empty() && !category_from_string(r.label))
                throw ParseError(lineno, "unknown label '" + r.label + "'");
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_importance_report(std::ostream& out, const std::vector<double>& mdi,
                             const std::vector<double>& permutation,
                             ReportFormat format, const ReportHeader& header) {
    static const char* kFeatures[kNumFeatures] = {
        "f1_visibility_frames", "f2_region_code", "f3_center_distance", "f4_mean_area",
        "f5_top10_area",        "f6_mean_saliency", "f7_saliency_ratio"};
    const std::size_t n = mdi.size();
    if (format == ReportFormat::Json) {
        ordered_json doc = json_header(header);
        auto& arr = doc["importance"] = ordered_json::array();
        for (std::size_t i = 0; i < n; ++i) {
            arr.push_back({{"feature", i < std::size_t(kNumFeatures) ? kFeatures[i] : "f" + std::to_string(i + 1)},
                           {"mdi", mdi[i]},
                           {"permutation", i < permutation.size() ? permutation[i] : 0.0}});
        }
        out << doc.dump(1) << '\n';
        return;
    }
    csv_header(out, header);
    out << "feature,mdi,permutation\n";
    for (std::size_t i = 0; i < n; ++i) {
        out << (i < std::size_t(kNumFeatures) ? kFeatures[i] : "f" + std::to_string(i + 1)) << ','
            << format_double(mdi[i]) << ','
            << format_double(i < permutation.size() ? permutation[i] : 0.0) << '\n';
    }
}

}  // namespace bbsig
