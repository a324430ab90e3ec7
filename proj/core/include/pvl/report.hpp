#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pvl/identities.hpp"

namespace pvl {

inline constexpr int kReportSchema = 1;

struct ReportSummary {
    int pass = 0;
    int fail = 0;
    int hypothesis_violated = 0;

    [[nodiscard]] int total() const noexcept { return pass + fail + hypothesis_violated; }
};

ReportSummary summarize(std::span<const IdentityReport> reports);

/// {"schema": 1, "metadata": {...}, "summary": {...}, "reports": [...]}.
/// Keys keep insertion order, so equal inputs give byte-identical output.
std::string reports_to_json(std::span<const IdentityReport> reports,
                            const std::map<std::string, std::string>& metadata = {});

/// Inverse of reports_to_json. Throws Error(Format) on malformed input or a
/// schema other than 1.
std::vector<IdentityReport> reports_from_json(std::string_view text,
                                              std::map<std::string, std::string>* metadata = nullptr);

/// One row per report: identity, parameters as "k=v;..." then the numbers.
std::string reports_to_csv(std::span<const IdentityReport> reports);

} // namespace pvl
