#include "pvl/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "pvl/error.hpp"

namespace pvl {
namespace {

using Json = nlohmann::ordered_json;

Status parse_status(const std::string& s)
{
    if (s == "pass")
        return Status::Pass;
    if (s == "fail")
        return Status::Fail;
    if (s == "hypothesis-violated")
        return Status::HypothesisViolated;
    fail(ErrorCode::Format, "unknown report status '" + s + "'");
}

Json number(double x)
{
    return std::isfinite(x) ? Json(x) : Json(nullptr);
}

double read_number(const Json& j, const char* key)
{
    const auto it = j.find(key);
    require(it != j.end(), ErrorCode::Format, std::string("report lacks '") + key + "'");
    if (it->is_null())
        return std::nan("");
    require(it->is_number(), ErrorCode::Format, std::string("report field '") + key + "' is not a number");
    return it->get<double>();
}

std::string format_number(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

ReportSummary summarize(std::span<const IdentityReport> reports)
{
    ReportSummary s;
    for (const auto& r : reports) {
        switch (r.status) {
        case Status::Pass:
            ++s.pass;
            break;
        case Status::Fail:
            ++s.fail;
            break;
        case Status::HypothesisViolated:
            ++s.hypothesis_violated;
            break;
        }
    }
    return s;
}

std::string reports_to_json(std::span<const IdentityReport> reports, const std::map<std::string, std::string>& metadata)
{
    Json doc;
    doc["schema"] = kReportSchema;
    doc["metadata"] = Json::object();
    for (const auto& [k, v] : metadata)
        doc["metadata"][k] = v;
    const auto s = summarize(reports);
    doc["summary"] = {{"pass", s.pass}, {"fail", s.fail}, {"hypothesis_violated", s.hypothesis_violated}};
    auto& list = doc["reports"] = Json::array();
    for (const auto& r : reports) {
        Json j;
        j["identity"] = r.identity;
        j["params"] = Json::object();
        for (const auto& [k, v] : r.params)
            j["params"][k] = number(v);
        j["lhs"] = number(r.lhs);
        j["rhs"] = number(r.rhs);
        j["residual_abs"] = number(r.residual_abs);
        j["residual_rel"] = number(r.residual_rel);
        j["scale_floor"] = number(r.scale_floor);
        j["hypothesis"] = {{"moment_isotropy", number(r.hypothesis.moment_isotropy)},
                           {"support_margin", number(r.hypothesis.support_margin)},
                           {"tail_fraction", number(r.hypothesis.tail_fraction)}};
        j["status"] = std::string(to_string(r.status));
        j["tolerance"] = number(r.tolerance);
        if (!r.notes.empty()) {
            j["notes"] = Json::object();
            for (const auto& [k, v] : r.notes)
                j["notes"][k] = v;
        }
        list.push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

std::vector<IdentityReport> reports_from_json(std::string_view text, std::map<std::string, std::string>* metadata)
{
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        fail(ErrorCode::Format, std::string("report JSON: ") + e.what());
    }
    require(doc.is_object() && doc.contains("schema"), ErrorCode::Format, "report JSON lacks 'schema'");
    require(doc["schema"] == kReportSchema, ErrorCode::Format, "unsupported report schema");
    require(doc.contains("reports") && doc["reports"].is_array(), ErrorCode::Format, "report JSON lacks 'reports'");
    if (metadata && doc.contains("metadata"))
        for (const auto& [k, v] : doc["metadata"].items())
            (*metadata)[k] = v.get<std::string>();

    std::vector<IdentityReport> out;
    try {
        for (const auto& j : doc["reports"]) {
            IdentityReport r;
            r.identity = j.at("identity").get<std::string>();
            for (const auto& [k, v] : j.at("params").items())
                r.params[k] = v.is_null() ? std::nan("") : v.get<double>();
            r.lhs = read_number(j, "lhs");
            r.rhs = read_number(j, "rhs");
            r.residual_abs = read_number(j, "residual_abs");
            r.residual_rel = read_number(j, "residual_rel");
            r.scale_floor = read_number(j, "scale_floor");
            const auto& h = j.at("hypothesis");
            r.hypothesis.moment_isotropy = read_number(h, "moment_isotropy");
            r.hypothesis.support_margin = read_number(h, "support_margin");
            r.hypothesis.tail_fraction = read_number(h, "tail_fraction");
            r.status = parse_status(j.at("status").get<std::string>());
            r.tolerance = read_number(j, "tolerance");
            if (j.contains("notes"))
                for (const auto& [k, v] : j["notes"].items())
                    r.notes[k] = v.get<std::string>();
            out.push_back(std::move(r));
        }
    } catch (const Json::exception& e) {
        fail(ErrorCode::Format, std::string("report JSON: ") + e.what());
    }
    return out;
}

std::string reports_to_csv(std::span<const IdentityReport> reports)
{
    std::ostringstream os;
    os << "identity,params,lhs,rhs,residual_abs,residual_rel,moment_isotropy,support_margin,tail_fraction,status,"
          "tolerance\n";
    for (const auto& r : reports) {
        os << r.identity << ',';
        bool first = true;
        for (const auto& [k, v] : r.params) {
            os << (first ? "" : ";") << k << '=' << format_number(v);
            first = false;
        }
        os << ',' << format_number(r.lhs) << ',' << format_number(r.rhs) << ',' << format_number(r.residual_abs)
           << ',' << format_number(r.residual_rel) << ',' << format_number(r.hypothesis.moment_isotropy) << ','
           << format_number(r.hypothesis.support_margin) << ',' << format_number(r.hypothesis.tail_fraction) << ','
           << to_string(r.status) << ',' << format_number(r.tolerance) << '\n';
    }
    return os.str();
}

} // namespace pvl
