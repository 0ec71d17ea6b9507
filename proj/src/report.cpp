#include "interplab/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>

#include "interplab/errors.hpp"

namespace interplab {

std::string current_timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t seconds = std::chrono::system_clock::to_time_t(now);
    std::tm parts{};
    gmtime_r(&seconds, &parts);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &parts);
    return buffer;
}

ReportJson make_report(const std::string& command, ReportJson config) {
    ReportJson report;
    report["format"] = "interplab-report";
    report["format_version"] = 1;
    report["command"] = command;
    report["timestamp"] = current_timestamp_utc();
    report["config"] = std::move(config);
    return report;
}

ReportJson finite_number(double value) {
    if (!std::isfinite(value))
        throw Error(ErrorCode::Internal, "attempted to serialize a non-finite number");
    return ReportJson(value);
}

ReportJson finite_array(const Eigen::VectorXd& values) {
    ReportJson out = ReportJson::array();
    for (Eigen::Index i = 0; i < values.size(); ++i)
        out.push_back(finite_number(values[i]));
    return out;
}

void write_report(const ReportJson& report, const std::string& path) {
    const std::string text = report.dump(2) + "\n";
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::Input, "cannot open '" + path + "' for writing");
    out << text;
    if (!out.flush())
        throw Error(ErrorCode::Input, "failed writing report to '" + path + "'");
}

} // namespace interplab
