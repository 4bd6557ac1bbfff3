#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vom/indicators/vector.hpp"
#include "vom/util.hpp"

namespace vom::core {

struct ReportIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ReportRow {
  ind::LabeledSample sample;
  // Predicted label values; NaN when a stage has not filled them yet.
  double pred_receptivity = std::nan("");
  double pred_agreement = std::nan("");
  double pred_satisfaction = std::nan("");
};

inline std::string report_header() {
  std::string h = "session,party";
  for (int i = 0; i < ind::kFeatureCount; ++i) h += std::string(",") + ind::feature_name(i);
  h += ",gt_receptivity,gt_agreement,gt_satisfaction";
  h += ",pred_receptivity,pred_agreement,pred_satisfaction";
  return h;
}

// Deterministic CSV; floats use shortest round-trip form so that
// load(save(rows)) is bit-exact.
inline void save_report(const std::vector<ReportRow>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw ReportIoError("save_report: empty sample list");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ReportIoError("cannot write " + path.string());
  out << report_header() << "\n";
  for (const auto& r : rows) {
    out << r.sample.session_id << "," << r.sample.party_id;
    for (int i = 0; i < ind::kFeatureCount; ++i) out << "," << format_double(r.sample.features[i]);
    out << "," << r.sample.receptivity << "," << r.sample.agreement << ","
        << r.sample.satisfaction;
    out << "," << format_double(r.pred_receptivity) << "," << format_double(r.pred_agreement)
        << "," << format_double(r.pred_satisfaction);
    out << "\n";
  }
}

inline std::vector<ReportRow> load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ReportIoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ReportIoError("empty report: " + path.string());
  if (line != report_header())
    throw ReportIoError("unexpected report header in " + path.string());
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 2 + ind::kFeatureCount + 6)
      throw ReportIoError("bad column count in " + path.string());
    ReportRow r;
    r.sample.session_id = f[0];
    r.sample.party_id = f[1];
    for (int i = 0; i < ind::kFeatureCount; ++i) r.sample.features[i] = parse_double(f[2 + i]);
    int base = 2 + ind::kFeatureCount;
    r.sample.receptivity = static_cast<int>(parse_long(f[base]));
    r.sample.agreement = static_cast<int>(parse_long(f[base + 1]));
    r.sample.satisfaction = static_cast<int>(parse_long(f[base + 2]));
    r.pred_receptivity = parse_double(f[base + 3]);
    r.pred_agreement = parse_double(f[base + 4]);
    r.pred_satisfaction = parse_double(f[base + 5]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace vom::core
