#pragma once

#include "hardy/grid.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hardy {

std::string format_real(double v);  // round-trip precision

struct PotentialSpec {
    enum class Kind { zero, constant, file, random };
    Kind kind = Kind::zero;
    double value = 0;  // constant value, or vmax for random
    std::string path;
    std::vector<double> samples;  // file contents

    std::string text() const;
};

struct ExperimentConfig {
    int n1 = 64, n2 = 64;
    double h1 = 0, h2 = 0;  // 0: 1/n
    Boundary bc1 = Boundary::dirichlet, bc2 = Boundary::dirichlet;
    PotentialSpec potential;
    std::uint64_t seed = 1;
    std::vector<std::string> suites;
    std::vector<std::string> criteria;  // empty: all
    int per_octave = 8;
    int refine = 2;  // refinement factor of the stability suites
    int jobs = 1;
    std::string output_dir = ".";
    std::string csv = "report.csv";
    std::string json = "report.json";
    std::map<std::string, double> tol;    // tol.<name>
    std::map<std::string, double> param;  // numeric suite parameters, <suite>.<name>
    std::map<std::string, std::string> text;  // string-valued suite parameters

    Axis axis1() const;
    Axis axis2() const;
    double tolerance(const std::string& name) const { return tol.at(name); }
    double number(const std::string& name) const { return param.at(name); }
    int integer(const std::string& name) const { return static_cast<int>(param.at(name)); }
    std::vector<std::string> list(const std::string& name) const;
    bool wants(const std::string& criterion) const;

    // key = value lines of every setting, in schema order
    std::string canonical() const;
    std::string hash() const;  // FNV-1a of canonical(), hex
};

struct ConfigError : std::runtime_error {
    int line;
    ConfigError(const std::string& source, int line, const std::string& msg);
};

struct SchemaEntry {
    std::string key, type, default_value, description;
};

const std::vector<SchemaEntry>& config_schema();
std::string schema_text();

ExperimentConfig default_config();
// Strict key = value parser: '#' comments, blank lines, unknown or repeated keys rejected.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig parse_config_file(const std::string& path);
// Same syntax for a single "key=value" string, e.g. command-line overrides.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                   const std::string& source = "<override>", int line = 0);
// HARDYLAB_OUTPUT_DIR, HARDYLAB_THREADS
void apply_environment(ExperimentConfig& cfg);

}  // namespace hardy
