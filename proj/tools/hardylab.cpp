#include "hardy/suites.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace hardy;

namespace {

enum Exit { kPass = 0, kMetricFail = 1, kConfigFail = 2, kIoFail = 3 };

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const fs::path& p, const std::string& body) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw IoError("cannot open " + p.string() + " for writing");
    os << body;
    os.close();
    if (!os) throw IoError("write failed: " + p.string());
}

int run(const std::string& config_path, const std::vector<std::string>& overrides, bool quiet) {
    ExperimentConfig cfg = parse_config_file(config_path);
    apply_environment(cfg);
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError("--set", 0, "expected key=value, got '" + o + "'");
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t") + 1);
            return s;
        };
        apply_setting(cfg, trim(o.substr(0, eq)), trim(o.substr(eq + 1)), "--set");
    }

    // fail on unwritable outputs before the suites run
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    for (const auto& name : {cfg.csv, cfg.json})
        if (!std::ofstream(dir / name, std::ios::app)) throw IoError("cannot open " + (dir / name).string() + " for writing");

    const Report rep = run_experiment(cfg);
    write_file(dir / cfg.csv, to_csv(rep));
    write_file(dir / cfg.json, to_json(rep).dump(2) + "\n");

    if (!quiet) {
        for (const auto& r : rep.rows)
            std::cout << (r.pass ? "ok   " : "FAIL ") << r.suite << ' ' << r.criterion << ' ' << r.metric << " = "
                      << format_number(r.value) << '\n';
    }
    const auto failed = rep.failures();
    for (const auto* r : failed)
        std::cerr << "failed: " << r->suite << ' ' << r->metric << " = " << format_number(r->value) << ' '
                  << r->relation << ' ' << format_number(r->tolerance) << '\n';
    return failed.empty() ? kPass : kMetricFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical lab for product Hardy spaces of heat semigroups"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(code_version()));

    std::string config_path;
    std::vector<std::string> overrides;
    bool quiet = false;
    auto* run_cmd = app.add_subcommand("run", "run the selected suites and write the CSV and JSON reports");
    run_cmd->add_option("config", config_path, "configuration file")->required();
    run_cmd->add_option("-s,--set", overrides, "override a setting, key=value (repeatable)")->allow_extra_args(false);
    run_cmd->add_flag("-q,--quiet", quiet, "only report failures");

    auto* list_cmd = app.add_subcommand("list-suites", "list suites in run order");

    std::string suite;
    auto* describe_cmd = app.add_subcommand("describe", "describe one suite");
    describe_cmd->add_option("suite", suite, "suite name")->required();

    auto* schema_cmd = app.add_subcommand("schema", "print every configuration key with its default");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kConfigFail;
    }

    try {
        if (*run_cmd) return run(config_path, overrides, quiet);
        if (*list_cmd) {
            for (const auto& s : suite_registry()) std::cout << s.name << '\n';
            return kPass;
        }
        if (*describe_cmd) {
            const SuiteInfo& s = suite_info(suite);
            std::cout << s.name << ": " << s.description << "\ncriteria:";
            for (const auto& c : s.criteria) std::cout << ' ' << c;
            if (s.criteria.empty()) std::cout << " none";
            std::cout << "\nkeys:";
            for (const auto& k : s.keys) std::cout << ' ' << k;
            std::cout << '\n';
            return kPass;
        }
        if (*schema_cmd) {
            std::cout << schema_text();
            return kPass;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigFail;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kIoFail;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigFail;
    }
    return kPass;
}
