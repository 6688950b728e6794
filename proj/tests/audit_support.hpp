#pragma once

#include <string>

#include "biaslens/audit.hpp"
#include "support.hpp"

namespace testing_support {

/// The fixture audit config with its output redirected to `out_dir`.
inline biaslens::AuditConfig fixture_config(const std::filesystem::path& out_dir) {
    auto config = biaslens::load_config(fixture_dir() / "audit" / "audit.json");
    config.output_dir = out_dir.string();
    return config;
}

/// Report JSON with run-specific fields (timings, output directory) blanked.
inline std::string normalized_report(const biaslens::AuditReport& report) {
    auto j = biaslens::report_to_json(report);
    j.erase("timings");
    j["config"]["output_dir"] = "<out>";
    return j.dump(2) + "\n";
}

inline std::filesystem::path golden_report_path() { return fixture_dir().parent_path() / "golden" / "report.json"; }

}  // namespace testing_support
