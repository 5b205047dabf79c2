#include "doctest.h"

#include "hardy/suites.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

using namespace hardy;

namespace {

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test.cfg");
}

// Every suite on a 16 x 16 grid with small sample counts.
const std::string kTiny =
    "grid.n1 = 16\n"
    "grid.n2 = 16\n"
    "potential = random:50\n"
    "gaussian.potentials = 2\n"
    "gaussian.times = 4\n"
    "square.functions = 2\n"
    "journe.sets = 5\n"
    "tent.functions = 3\n"
    "atoms.count = 3\n"
    "hardy.functions = 1\n"
    "riesz.atoms = 3\n"
    "riesz.axis_n = 32\n"
    "multiplier.atoms = 3\n";

std::string all_suites() {
    std::string s;
    for (const auto& i : suite_registry()) s += (s.empty() ? "" : ",") + i.name;
    return s;
}

}  // namespace

TEST_CASE("registry lists the suites in dependency order") {
    std::vector<std::string> names;
    for (const auto& s : suite_registry()) names.push_back(s.name);
    CHECK(names == std::vector<std::string>{"gaussian-bound", "propagation", "square-equivalence", "journe",
                                            "tent-decomp", "atom-validate", "hardy-decomp", "conditions-identity",
                                            "riesz", "multiplier", "prop53"});
    CHECK(suite_info("riesz").criteria == std::vector<std::string>{"AC9"});
    CHECK_THROWS_AS(suite_info("nope"), std::invalid_argument);

    const std::set<std::string> schema_keys = [] {
        std::set<std::string> k;
        for (const auto& e : config_schema()) k.insert(e.key);
        return k;
    }();
    for (const auto& s : suite_registry())
        for (const auto& k : s.keys) CHECK_MESSAGE(schema_keys.count(k), s.name << " reads unknown key " << k);
}

TEST_CASE("every criterion is measured by some suite") {
    std::set<std::string> covered;
    for (const auto& s : suite_registry()) covered.insert(s.criteria.begin(), s.criteria.end());
    for (int k = 1; k <= 10; ++k) CHECK_MESSAGE(covered.count("AC" + std::to_string(k)), "AC" << k);
}

TEST_CASE("full tiny run: coverage, unique metrics, determinism") {
    ExperimentConfig cfg = parse(kTiny + "suites = " + all_suites() + "\n");
    const Report a = run_experiment(cfg);
    CHECK(a.suites.size() == suite_registry().size());
    CHECK(a.config_hash == cfg.hash());
    CHECK(a.code_version == std::string(code_version()));

    std::set<std::string> criteria;
    std::map<std::string, int> seen;
    for (const auto& r : a.rows) {
        CHECK_MESSAGE(r.metric.rfind("error", 0) != 0, r.suite << ": " << r.metric);
        criteria.insert(r.criterion);
        ++seen[r.suite + "/" + r.metric];
    }
    for (int k = 1; k <= 10; ++k) CHECK_MESSAGE(criteria.count("AC" + std::to_string(k)), "AC" << k);
    for (const auto& [m, n] : seen) CHECK_MESSAGE(n == 1, m << " appears " << n << " times");

    // rows come out in registry order
    std::vector<std::string> order;
    for (const auto& r : a.rows)
        if (order.empty() || order.back() != r.suite) order.push_back(r.suite);
    CHECK(order == a.suites);

    // the same run again, and once with parallel suites
    CHECK(to_csv(run_experiment(cfg)) == to_csv(a));
    cfg.jobs = 3;
    CHECK(to_csv(run_experiment(cfg)) == to_csv(a));
}

TEST_CASE("suite draws do not depend on which other suites run") {
    const Report alone = run_experiment(parse(kTiny + "suites = journe\n"));
    const Report with = run_experiment(parse(kTiny + "suites = gaussian-bound,journe\n"));
    std::vector<MetricRow> tail(with.rows.end() - alone.rows.size(), with.rows.end());
    CHECK(tail == alone.rows);
    CHECK(run_experiment(parse(kTiny + "suites = journe\nseed = 7\n")).rows != alone.rows);
}

TEST_CASE("criteria filter") {
    const Report r = run_experiment(parse(kTiny + "suites = square-equivalence,journe,propagation\ncriteria = AC2\n"));
    CHECK(r.suites == std::vector<std::string>{"square-equivalence"});
    for (const auto& row : r.rows) CHECK(row.criterion == "AC2");
    CHECK_FALSE(r.rows.empty());
    CHECK_THROWS_AS(run_experiment(parse(kTiny + "suites = journe\ncriteria = AC2\n")), ConfigError);
}

TEST_CASE("no suites selected") {
    try {
        run_experiment(parse(kTiny));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("no suites selected") != std::string::npos);
    }
}

TEST_CASE("gaussian-bound on the free Laplacian, 64 cells") {
    const auto rows = run_suite("gaussian-bound", parse("suites = gaussian-bound\n"));
    bool found = false;
    for (const auto& r : rows) {
        CHECK_MESSAGE(r.pass, r.metric);
        if (r.metric.rfind("HeatKernelFit.", 0) == 0) found = true;
        if (r.metric == "potentials") CHECK(r.value == 1);
        if (r.metric == "feynman_kac.max_excess") CHECK(std::fabs(r.value) < 1e-14);
    }
    CHECK(found);
}

TEST_CASE("suite failures become error rows") {
    // 64 samples cannot resolve the dilated symbols; the other suites still run
    const Report r = run_experiment(parse(kTiny + "suites = journe,multiplier\nmultiplier.samples = 64\n"));
    CHECK_FALSE(r.pass());
    int errors = 0;
    for (const auto& row : r.rows)
        if (row.relation == "error") {
            ++errors;
            CHECK(row.suite == "multiplier");
            CHECK(row.metric == "error: undersampled symbol");
            CHECK_FALSE(row.pass);
            CHECK(std::isnan(row.value));
        }
    CHECK(errors == 1);
    CHECK(r.rows.front().suite == "journe");
    CHECK(r.rows.front().pass);
}

TEST_CASE("configuration problems found by a suite stay configuration errors") {
    // a potential file has no refinement
    ExperimentConfig cfg = parse(kTiny + "suites = gaussian-bound,journe,atom-validate\n");
    cfg.potential.kind = PotentialSpec::Kind::file;
    cfg.potential.samples.assign(32, 1.0);
    CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
    CHECK(run_suite("gaussian-bound", cfg).front().pass);
}

TEST_CASE("operator pairs build the configured potential and refines it") {
    ExperimentConfig cfg = parse("grid.n1 = 16\ngrid.n2 = 8\nsquare.mode_max = 7\npotential = constant:3\n");
    Rng rng(1);
    const ProductOperatorPair P = make_operator_pair(cfg, rng);
    CHECK(P.L1.n() == 16);
    CHECK(P.L2.n() == 8);
    CHECK(P.L1.potential.minCoeff() == 3);
    const ProductOperatorPair Q = make_operator_pair(cfg, rng, 4);
    CHECK(Q.L1.n() == 64);
    CHECK(Q.L2.axis.h == doctest::Approx(1.0 / 32));
    CHECK(Q.L1.axis.length() == doctest::Approx(1.0));

    cfg = parse("grid.n1 = 16\ngrid.n2 = 16\npotential = random:40\n");
    Rng r1 = suite_rng(cfg, "x"), r2 = suite_rng(cfg, "x"), r3 = suite_rng(cfg, "y");
    const ProductOperatorPair A = make_operator_pair(cfg, r1), B = make_operator_pair(cfg, r2), C = make_operator_pair(cfg, r3);
    CHECK(A.L1.potential == B.L1.potential);
    CHECK(A.L1.potential != C.L1.potential);
    CHECK(A.L1.potential != A.L2.potential);
    CHECK(A.L1.potential.maxCoeff() <= 40);
    CHECK(A.L1.potential.minCoeff() >= 0);
}
