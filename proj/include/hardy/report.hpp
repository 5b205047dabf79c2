#pragma once

#include "json.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace hardy {

// relation: "<=", ">=", "record" (informational, always passes)
struct MetricRow {
    std::string suite;
    std::string criterion;  // "AC<k>" or "-" for module-level metrics
    std::string metric;
    double value = 0;
    double tolerance = 0;
    std::string relation = "record";
    bool pass = true;

    bool operator==(const MetricRow& o) const;  // nan equals nan
};

MetricRow check_le(std::string suite, std::string criterion, std::string metric, double value, double bound);
MetricRow check_ge(std::string suite, std::string criterion, std::string metric, double value, double bound);
MetricRow record(std::string suite, std::string criterion, std::string metric, double value);

struct Report {
    std::string config_hash;
    std::string code_version;
    std::vector<std::string> suites;
    std::vector<MetricRow> rows;

    bool pass() const;
    std::vector<const MetricRow*> failures() const;
    bool operator==(const Report&) const = default;
};

// Columns: suite,criterion,metric,value,tolerance,relation,pass
extern const char* const kCsvHeader;
std::string format_number(double v);  // 12 significant digits, nan/inf spelled out
void write_csv(std::ostream& os, const Report& r);
std::string to_csv(const Report& r);

nlohmann::json to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);

}  // namespace hardy
