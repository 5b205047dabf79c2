#include "hardy/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace hardy {

namespace {

const std::vector<SchemaEntry> kSchema = {
    {"grid.n1", "int", "64", "cells on axis 1 (power of two, >= 4)"},
    {"grid.n2", "int", "64", "cells on axis 2 (power of two, >= 4)"},
    {"grid.h1", "real", "0", "cell size on axis 1; 0 means 1/n1"},
    {"grid.h2", "real", "0", "cell size on axis 2; 0 means 1/n2"},
    {"grid.bc1", "dirichlet|periodic", "dirichlet", "boundary condition on axis 1"},
    {"grid.bc2", "dirichlet|periodic", "dirichlet", "boundary condition on axis 2"},
    {"potential", "potential", "zero", "zero | constant:<v> | random:<vmax> | file:<path> (n1 values, then n2)"},
    {"seed", "uint", "1", "random seed; fixed seed gives identical reports"},
    {"suites", "list", "", "comma-separated suite names"},
    {"criteria", "list", "", "evaluate only these acceptance criteria (AC1..AC10); empty means all"},
    {"scales.per_octave", "int", "8", "scale grid points per octave"},
    {"scales.refine", "int", "2", "refinement factor for grid-stability metrics"},
    {"run.jobs", "int", "1", "suites run in parallel when > 1"},
    {"output.dir", "string", ".", "output directory"},
    {"output.csv", "string", "report.csv", "CSV file name inside output.dir"},
    {"output.json", "string", "report.json", "JSON summary file name inside output.dir"},

    {"tol.fk", "real", "1e-8", "entrywise Feynman-Kac domination slack"},
    {"tol.leakage", "real", "1e-6", "relative propagation leakage beyond the buffer"},
    {"tol.l2_identity", "real", "0.0125", "|S f|_2/|f|_2 - 0.25"},
    {"tol.lp_shift", "real", "0.2", "relative move of the L^p bracket endpoints under refinement"},
    {"tol.journe_shift", "real", "0.25", "relative move of the Journe constant under refinement"},
    {"tol.reconstruction", "real", "1e-12", "tent reconstruction residual relative to max|F|"},
    {"tol.atom_validate", "real", "1e-6", "relative tolerance of atom validation"},
    {"tol.atom_shift", "real", "0.3", "relative move of per-atom constants under refinement"},
    {"tol.decomp_coarse", "real", "1e-3", "decomposition residual at scales.per_octave"},
    {"tol.decomp_fine", "real", "1e-4", "decomposition residual at twice scales.per_octave"},
    {"tol.erfc", "real", "0.05", "relative deviation from the erfc oracle"},
    {"tol.delta_min", "real", "2", "lower bound on the fitted decay exponent"},
    {"tol.riesz_norm", "real", "1e-10", "| |R|_{2->2} - 1 | at V = 0"},
    {"tol.riesz_quadrature", "real", "1e-3", "quadrature against spectral Riesz transform"},
    {"tol.tail_exponent", "real", "0.4", "lower bound on the Riesz tail exponent"},
    {"tol.plateau_slope", "real", "0.05", "largest log-log growth of a finite Marcinkiewicz constant"},
    {"tol.growth_factor", "real", "2", "factor allowed between measured and predicted growth"},
    {"tol.prop53_factor", "real", "2", "factor allowed around (tR)^2 scaling per octave"},

    {"gaussian.potentials", "int", "10", "random potentials (random potential spec)"},
    {"gaussian.times", "int", "20", "times for the Feynman-Kac check"},
    {"propagation.t_cells", "real", "8", "wave time in cells"},
    {"propagation.buffer_cells", "real", "4", "support buffer in cells"},
    {"square.functions", "int", "20", "random functions per grid"},
    {"square.mode_min", "int", "2", "lowest eigenmode of the L^2 test functions"},
    {"square.mode_max", "int", "9", "highest eigenmode of the L^2 test functions"},
    {"square.sine_modes", "int", "8", "sine modes of the L^p test functions"},
    {"journe.sets", "int", "100", "random open sets per grid"},
    {"journe.delta", "real", "1", "Journe exponent"},
    {"tent.functions", "int", "50", "random tent functions"},
    {"atoms.count", "int", "50", "atoms per grid and M"},
    {"atoms.M", "list", "1,2", "atom orders"},
    {"hardy.functions", "int", "20", "random functions"},
    {"hardy.M", "int", "1", "atom order"},
    {"conditions.t_cells", "real", "32", "scale t in cells"},
    {"conditions.gammas", "list", "2,3,4,6,8", "gammas of the decay fit"},
    {"conditions.oracle_gammas", "list", "2,4,8", "gammas compared against erfc"},
    {"riesz.atoms", "int", "50", "atoms for the per-atom bound"},
    {"riesz.axis_n", "int", "256", "cells of the single-axis Riesz checks (V = 0 and the potential resampled)"},
    {"riesz.tail_t_cells", "list", "2,4", "scales of the tail estimate, in cells"},
    {"multiplier.finite", "list", "one,ratio,riesz-like", "symbols expected to have a finite constant"},
    {"multiplier.divergent", "string", "sin-divergent", "symbol expected to diverge"},
    {"multiplier.harness", "list", "one,heat,ratio,riesz-like", "symbols applied to atoms"},
    {"multiplier.atoms", "int", "50", "atoms per grid"},
    {"multiplier.samples", "int", "128", "Sobolev samples per axis"},
    {"multiplier.padding", "int", "2", "Sobolev zero padding factor"},
    {"multiplier.s1", "real", "1.25", "Sobolev order on axis 1"},
    {"multiplier.s2", "real", "1.25", "Sobolev order on axis 2"},
    {"multiplier.t_max_divergent", "real", "64", "largest t of the divergence sweep"},
    {"prop53.R", "real", "62.83185307179586", "support radius R1 (symbol cut to [0, R1^2])"},
    {"prop53.tR", "list", "0.0625,0.125,0.25", "values of t1 R1"},
};

const std::set<std::string> kSuiteNames = {"gaussian-bound", "propagation",         "square-equivalence",
                                           "journe",         "tent-decomp",         "atom-validate",
                                           "hardy-decomp",   "conditions-identity", "riesz",
                                           "multiplier",     "prop53"};

const SchemaEntry* find_entry(const std::string& key) {
    for (const auto& e : kSchema)
        if (e.key == key) return &e;
    return nullptr;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

long long to_int(const std::string& v, const std::string& key, const std::string& src, int line) {
    long long x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError(src, line, "expected an integer for '" + key + "', got '" + v + "'");
    return x;
}

double to_real(const std::string& v, const std::string& key, const std::string& src, int line) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x))
        throw ConfigError(src, line, "expected a number for '" + key + "', got '" + v + "'");
    return x;
}

Boundary to_bc(const std::string& v, const std::string& key, const std::string& src, int line) {
    if (v == "dirichlet") return Boundary::dirichlet;
    if (v == "periodic") return Boundary::periodic;
    throw ConfigError(src, line, "expected dirichlet or periodic for '" + key + "', got '" + v + "'");
}

PotentialSpec to_potential(const std::string& v, const std::string& src, int line) {
    PotentialSpec p;
    if (v == "zero") return p;
    const auto colon = v.find(':');
    const std::string kind = v.substr(0, colon), arg = colon == std::string::npos ? "" : v.substr(colon + 1);
    if (kind == "constant" || kind == "random") {
        p.kind = kind == "constant" ? PotentialSpec::Kind::constant : PotentialSpec::Kind::random;
        p.value = to_real(arg, "potential", src, line);
        if (p.value < 0) throw ConfigError(src, line, "potential must be non-negative");
        return p;
    }
    if (kind == "file" && !arg.empty()) {
        p.kind = PotentialSpec::Kind::file;
        p.path = arg;
        std::ifstream in(arg);
        if (!in) throw ConfigError(src, line, "cannot read potential file '" + arg + "'");
        std::string tok;
        while (in >> tok) {
            const double x = to_real(tok, "potential", src, line);
            if (x < 0) throw ConfigError(src, line, "potential file has a negative value");
            p.samples.push_back(x);
        }
        return p;
    }
    throw ConfigError(src, line, "bad potential '" + v + "'");
}

}  // namespace

std::string PotentialSpec::text() const {
    switch (kind) {
        case Kind::zero: return "zero";
        case Kind::constant: return "constant:" + format_real(value);
        case Kind::random: return "random:" + format_real(value);
        case Kind::file: return "file:" + path;
    }
    return "zero";
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ConfigError::ConfigError(const std::string& source, int l, const std::string& msg)
    : std::runtime_error(l > 0 ? source + ":" + std::to_string(l) + ": " + msg : source + ": " + msg), line(l) {}

const std::vector<SchemaEntry>& config_schema() { return kSchema; }

std::string schema_text() {
    std::ostringstream os;
    os << "# key = value, one per line; '#' starts a comment; unknown keys are errors\n";
    for (const auto& e : kSchema) {
        os << e.key << " (" << e.type << ", default " << (e.default_value.empty() ? "empty" : e.default_value)
           << "): " << e.description << '\n';
    }
    return os.str();
}

Axis ExperimentConfig::axis1() const { return Axis(n1, h1 > 0 ? h1 : 1.0 / n1, bc1); }
Axis ExperimentConfig::axis2() const { return Axis(n2, h2 > 0 ? h2 : 1.0 / n2, bc2); }

bool ExperimentConfig::wants(const std::string& criterion) const {
    return criteria.empty() || std::find(criteria.begin(), criteria.end(), criterion) != criteria.end();
}

std::vector<std::string> ExperimentConfig::list(const std::string& name) const { return split_list(text.at(name)); }

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value, const std::string& src,
                   int line) {
    const SchemaEntry* e = find_entry(key);
    if (!e) throw ConfigError(src, line, "unknown key '" + key + "'");
    if (key == "grid.n1") c.n1 = static_cast<int>(to_int(value, key, src, line));
    else if (key == "grid.n2") c.n2 = static_cast<int>(to_int(value, key, src, line));
    else if (key == "grid.h1") c.h1 = to_real(value, key, src, line);
    else if (key == "grid.h2") c.h2 = to_real(value, key, src, line);
    else if (key == "grid.bc1") c.bc1 = to_bc(value, key, src, line);
    else if (key == "grid.bc2") c.bc2 = to_bc(value, key, src, line);
    else if (key == "potential") c.potential = to_potential(value, src, line);
    else if (key == "seed") {
        const long long s = to_int(value, key, src, line);
        if (s < 0) throw ConfigError(src, line, "seed must be non-negative");
        c.seed = static_cast<std::uint64_t>(s);
    } else if (key == "suites") {
        c.suites = split_list(value);
        for (const auto& s : c.suites)
            if (!kSuiteNames.count(s)) throw ConfigError(src, line, "unknown suite '" + s + "'");
    } else if (key == "criteria") {
        c.criteria = split_list(value);
        for (const auto& k : c.criteria) {
            const bool digits = k.size() >= 3 && k.size() <= 4 && k.rfind("AC", 0) == 0 &&
                                k.find_first_not_of("0123456789", 2) == std::string::npos;
            const bool ok = digits && std::stoi(k.substr(2)) >= 1 && std::stoi(k.substr(2)) <= 10;
            if (!ok) throw ConfigError(src, line, "unknown criterion '" + k + "'");
        }
    } else if (key == "scales.per_octave") c.per_octave = static_cast<int>(to_int(value, key, src, line));
    else if (key == "scales.refine") c.refine = static_cast<int>(to_int(value, key, src, line));
    else if (key == "run.jobs") c.jobs = static_cast<int>(to_int(value, key, src, line));
    else if (key == "output.dir") c.output_dir = value;
    else if (key == "output.csv") c.csv = value;
    else if (key == "output.json") c.json = value;
    else if (key.rfind("tol.", 0) == 0) {
        const double x = to_real(value, key, src, line);
        if (x < 0) throw ConfigError(src, line, "tolerance '" + key + "' must be non-negative");
        c.tol[key.substr(4)] = x;
    } else if (e->type == "int") {
        const long long x = to_int(value, key, src, line);
        if (x < 1) throw ConfigError(src, line, "'" + key + "' must be positive");
        c.param[key] = static_cast<double>(x);
    } else if (e->type == "real") {
        c.param[key] = to_real(value, key, src, line);
    } else if (e->type == "list") {
        if (split_list(value).empty()) throw ConfigError(src, line, "'" + key + "' must not be empty");
        c.text[key] = value;
    } else {
        c.text[key] = value;
    }

    // checks that need only this key
    auto pow2 = [](int n) { return n >= 4 && (n & (n - 1)) == 0; };
    if ((key == "grid.n1" && !pow2(c.n1)) || (key == "grid.n2" && !pow2(c.n2)))
        throw ConfigError(src, line, "'" + key + "' must be a power of two >= 4");
    if ((key == "grid.h1" && c.h1 < 0) || (key == "grid.h2" && c.h2 < 0))
        throw ConfigError(src, line, "'" + key + "' must be non-negative");
    if (key == "scales.per_octave" && c.per_octave < 1) throw ConfigError(src, line, "'" + key + "' must be >= 1");
    if (key == "scales.refine" && !(c.refine >= 2 && (c.refine & (c.refine - 1)) == 0))
        throw ConfigError(src, line, "'" + key + "' must be a power of two >= 2");
    if (key == "run.jobs" && c.jobs < 1) throw ConfigError(src, line, "'" + key + "' must be >= 1");
}

ExperimentConfig default_config() {
    ExperimentConfig c;
    for (const auto& e : kSchema)
        if (e.key != "suites" && e.key != "criteria" && e.key != "potential") apply_setting(c, e.key, e.default_value, "<defaults>", 0);
    return c;
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream os;
    for (const auto& e : kSchema) {
        const std::string& k = e.key;
        os << k << " = ";
        if (k == "grid.n1") os << n1;
        else if (k == "grid.n2") os << n2;
        else if (k == "grid.h1") os << format_real(h1);
        else if (k == "grid.h2") os << format_real(h2);
        else if (k == "grid.bc1") os << (bc1 == Boundary::dirichlet ? "dirichlet" : "periodic");
        else if (k == "grid.bc2") os << (bc2 == Boundary::dirichlet ? "dirichlet" : "periodic");
        else if (k == "potential") {
            os << potential.text();
            for (double v : potential.samples) os << ' ' << format_real(v);
        } else if (k == "seed") os << seed;
        else if (k == "suites") {
            for (size_t i = 0; i < suites.size(); ++i) os << (i ? "," : "") << suites[i];
        } else if (k == "criteria") {
            for (size_t i = 0; i < criteria.size(); ++i) os << (i ? "," : "") << criteria[i];
        } else if (k == "scales.per_octave") os << per_octave;
        else if (k == "scales.refine") os << refine;
        else if (k == "run.jobs" || k.rfind("output.", 0) == 0) {
            os << "-";  // does not affect results
        } else if (k.rfind("tol.", 0) == 0) os << format_real(tol.at(k.substr(4)));
        else if (param.count(k)) os << format_real(param.at(k));
        else os << text.at(k);
        os << '\n';
    }
    return os.str();
}

std::string ExperimentConfig::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : canonical()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig parse_config(std::istream& in, const std::string& src) {
    ExperimentConfig c = default_config();
    std::map<std::string, int> seen;
    std::string raw;
    int line = 0;
    int potential_line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(src, line, "expected 'key = value'");
        const std::string key = trim(body.substr(0, eq)), value = trim(body.substr(eq + 1));
        if (key.empty()) throw ConfigError(src, line, "missing key");
        if (seen.count(key))
            throw ConfigError(src, line, "duplicate key '" + key + "' (first set on line " +
                                             std::to_string(seen[key]) + ")");
        seen[key] = line;
        if (key == "potential") potential_line = line;
        apply_setting(c, key, value, src, line);
    }
    if (c.potential.kind == PotentialSpec::Kind::file) {
        const size_t m = c.potential.samples.size();
        if (m != static_cast<size_t>(c.n1) && m != static_cast<size_t>(c.n1 + c.n2))
            throw ConfigError(src, potential_line,
                              "potential file holds " + std::to_string(m) + " values, expected n1 or n1 + n2");
        if (m == static_cast<size_t>(c.n1) && c.n1 != c.n2)
            throw ConfigError(src, potential_line, "potential file must list both axes when n1 != n2");
    }
    const int mmin = c.integer("square.mode_min"), mmax = c.integer("square.mode_max");
    if (mmin > mmax || mmax >= std::min(c.n1, c.n2))
        throw ConfigError(src, seen.count("square.mode_max") ? seen["square.mode_max"] : 0,
                          "square mode window outside the spectrum");
    return c;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "cannot open config file");
    return parse_config(in, path);
}

void apply_environment(ExperimentConfig& c) {
    if (const char* d = std::getenv("HARDYLAB_OUTPUT_DIR"); d && *d) c.output_dir = d;
    if (const char* t = std::getenv("HARDYLAB_THREADS"); t && *t) apply_setting(c, "run.jobs", t, "HARDYLAB_THREADS");
}

}  // namespace hardy
