#include "hardy/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace hardy {

namespace {

bool both_nan(double a, double b) { return std::isnan(a) && std::isnan(b); }

nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    return format_number(v);
}

double parse_number(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    const std::string s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    throw std::invalid_argument("bad number in report: " + s);
}

}  // namespace

bool MetricRow::operator==(const MetricRow& o) const {
    auto same = [](double a, double b) { return a == b || both_nan(a, b); };
    return suite == o.suite && criterion == o.criterion && metric == o.metric && same(value, o.value) &&
           same(tolerance, o.tolerance) && relation == o.relation && pass == o.pass;
}

const char* const kCsvHeader = "suite,criterion,metric,value,tolerance,relation,pass";

MetricRow check_le(std::string suite, std::string criterion, std::string metric, double value, double bound) {
    return {std::move(suite), std::move(criterion), std::move(metric), value, bound, "<=", value <= bound};
}

MetricRow check_ge(std::string suite, std::string criterion, std::string metric, double value, double bound) {
    return {std::move(suite), std::move(criterion), std::move(metric), value, bound, ">=", value >= bound};
}

MetricRow record(std::string suite, std::string criterion, std::string metric, double value) {
    return {std::move(suite), std::move(criterion), std::move(metric), value, std::nan(""), "record", true};
}

bool Report::pass() const {
    for (const auto& r : rows)
        if (!r.pass) return false;
    return true;
}

std::vector<const MetricRow*> Report::failures() const {
    std::vector<const MetricRow*> out;
    for (const auto& r : rows)
        if (!r.pass) out.push_back(&r);
    return out;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_csv(std::ostream& os, const Report& r) {
    os << kCsvHeader << '\n';
    for (const auto& m : r.rows)
        os << m.suite << ',' << m.criterion << ',' << m.metric << ',' << format_number(m.value) << ','
           << format_number(m.tolerance) << ',' << m.relation << ',' << (m.pass ? "true" : "false") << '\n';
}

std::string to_csv(const Report& r) {
    std::ostringstream os;
    write_csv(os, r);
    return os.str();
}

nlohmann::json to_json(const Report& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& m : r.rows)
        rows.push_back({{"suite", m.suite},
                        {"criterion", m.criterion},
                        {"metric", m.metric},
                        {"value", number(m.value)},
                        {"tolerance", number(m.tolerance)},
                        {"relation", m.relation},
                        {"pass", m.pass}});
    return {{"config_hash", r.config_hash},
            {"code_version", r.code_version},
            {"suites", r.suites},
            {"pass", r.pass()},
            {"rows", rows}};
}

Report report_from_json(const nlohmann::json& j) {
    Report r;
    r.config_hash = j.at("config_hash").get<std::string>();
    r.code_version = j.at("code_version").get<std::string>();
    r.suites = j.at("suites").get<std::vector<std::string>>();
    for (const auto& x : j.at("rows")) {
        MetricRow m;
        m.suite = x.at("suite").get<std::string>();
        m.criterion = x.at("criterion").get<std::string>();
        m.metric = x.at("metric").get<std::string>();
        m.value = parse_number(x.at("value"));
        m.tolerance = parse_number(x.at("tolerance"));
        m.relation = x.at("relation").get<std::string>();
        m.pass = x.at("pass").get<bool>();
        r.rows.push_back(std::move(m));
    }
    return r;
}

}  // namespace hardy
