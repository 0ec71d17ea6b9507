#pragma once

#include <Eigen/Core>
#include <json.hpp>
#include <string>

namespace interplab {

using ReportJson = nlohmann::ordered_json;

// Skeleton shared by every CLI report: schema version, command, timestamp,
// and the fully resolved configuration. Key order is fixed so identical runs
// produce byte-identical files apart from the timestamp line.
ReportJson make_report(const std::string& command, ReportJson config);

// Serialization guards: reports must never contain NaN or Inf. Infinite
// sentinel values (e.g. the single-point min_gap) are mapped to null by the
// caller, not smuggled through these helpers.
ReportJson finite_number(double value);
ReportJson finite_array(const Eigen::VectorXd& values);

// Pretty-prints to `path`; empty path or "-" selects stdout.
void write_report(const ReportJson& report, const std::string& path);

std::string current_timestamp_utc();

} // namespace interplab
