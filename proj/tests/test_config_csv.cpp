#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cavsim/config.hpp"
#include "cavsim/constants.hpp"
#include "cavsim/csv.hpp"

using namespace cavsim;
namespace k = cavsim::constants;

TEST_CASE("default config carries the published parameters") {
    auto cfg = default_config();
    CHECK(cfg.cavity.length == doctest::Approx(133e-6));
    CHECK(cfg.cavity.finesse == doctest::Approx(280.0));
    CHECK(cfg.g / k::two_pi == doctest::Approx(100e6));
    CHECK(cfg.transition.gamma / k::two_pi == doctest::Approx(3e6));
    CHECK(cfg.transition.zeeman_factor == doctest::Approx(3.0 / 7.0));
    CHECK(cfg.chain.net_efficiency() == doctest::Approx(0.54));
    CHECK(cfg.probe_visibility() == doctest::Approx(0.1943).epsilon(1e-3));
    CHECK_NOTHROW(cfg.validate());

    auto rates = cfg.rates();
    CHECK(rates.kappa() / k::two_pi == doctest::Approx(2.01e9).epsilon(0.005));
    CHECK(rates.cooperativity() == doctest::Approx(0.83).epsilon(0.01));
}

TEST_CASE("parse applies overrides and keeps other defaults") {
    auto cfg = parse_config(R"({
        "cavity": {"finesse": 560},
        "cloud": {"temperature_k": 10e-6},
        "run": {"seed": 99, "threads": 4}
    })");
    CHECK(cfg.cavity.finesse == 560.0);
    CHECK(cfg.cavity.length == doctest::Approx(133e-6));  // untouched default
    CHECK(cfg.cloud.temperature == doctest::Approx(10e-6));
    CHECK(cfg.run.seed == 99);
    CHECK(cfg.run.threads == 4);
}

TEST_CASE("unknown keys are rejected with their path") {
    CHECK_THROWS_AS(parse_config(R"({"cavityy": {}})"), ConfigError);
    try {
        parse_config(R"({"cavity": {"lenght_m": 1e-4}})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("lenght_m") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config(R"({"run": {"seed": "abc"}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({not json)"), ConfigError);
}

TEST_CASE("semantic validation surfaces as ConfigError") {
    CHECK_THROWS_AS(parse_config(R"({"scan": {"points": 3}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"probe": {"i_min": 5e5}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"pulse": {"turn_on_s": 0.0}})"), ConfigError);
}

TEST_CASE("dump round-trips through parse") {
    auto cfg = default_config();
    cfg.scan.mean_n_eff = 1.1;
    cfg.noise.length_jitter_rms = 2e-13;
    cfg.run.seed = 4242;
    auto back = parse_config(dump_config(cfg));
    CHECK(dump_config(back) == dump_config(cfg));
    CHECK(back.scan.mean_n_eff == doctest::Approx(1.1));
    CHECK(back.noise.length_jitter_rms == doctest::Approx(2e-13));
    CHECK(back.run.seed == 4242);
}

TEST_CASE("config hash ignores threads and out_dir but nothing else") {
    auto cfg = default_config();
    auto h0 = config_hash(cfg);
    auto threaded = cfg;
    threaded.run.threads = 8;
    CHECK(config_hash(threaded) == h0);
    auto moved = cfg;
    moved.run.out_dir = "elsewhere";
    CHECK(config_hash(moved) == h0);

    auto tweaked = cfg;
    tweaked.cloud.atom_count *= 1.0001;
    CHECK(config_hash(tweaked) != h0);
    auto reseeded = cfg;
    reseeded.run.seed += 1;
    CHECK(config_hash(reseeded) != h0);
}

TEST_CASE("load_config reads a file and rejects a missing one") {
    std::string path = "test_cfg_tmp.json";
    {
        std::ofstream out(path);
        out << R"({"coupling": {"g_hz": 1.2e8}})";
    }
    auto cfg = load_config(path);
    CHECK(cfg.g / k::two_pi == doctest::Approx(1.2e8));
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_config(path), ConfigError);
}

TEST_CASE("csv header block and round trip") {
    CsvTable t("tof_trace", 0xdeadbeefULL, 42);
    t.add_column("time_s");
    t.add_column("n_eff");
    t.add_row({1.0, 0.5});
    t.add_row({2.0, std::nan("")});
    CHECK(t.rows() == 2);

    auto text = t.to_string();
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    CHECK(line == "# schema=tof_trace v1");
    std::getline(in, line);
    CHECK(line == "# config_hash=00000000deadbeef");
    std::getline(in, line);
    CHECK(line == "# seed=42");
    std::getline(in, line);
    CHECK(line.rfind("# version=", 0) == 0);
    std::getline(in, line);
    CHECK(line == "time_s,n_eff");
    std::getline(in, line);
    CHECK(line == "1,0.5");
    std::getline(in, line);
    CHECK(line == "2,nan");

    std::string path = "test_csv_tmp.csv";
    t.write(path);
    std::vector<std::vector<double>> cols;
    auto names = read_csv(path, cols);
    std::remove(path.c_str());
    REQUIRE(names.size() == 2);
    CHECK(names[1] == "n_eff");
    REQUIRE(cols[0].size() == 2);
    CHECK(cols[0][1] == 2.0);
    CHECK(cols[1][0] == 0.5);
    CHECK(std::isnan(cols[1][1]));
}

TEST_CASE("csv rejects ragged rows and missing files") {
    CsvTable t("x", 0, 0);
    t.add_column("a");
    CHECK_THROWS_AS(t.add_row({1.0, 2.0}), DomainError);
    std::vector<std::vector<double>> cols;
    CHECK_THROWS_AS(read_csv("no_such_file.csv", cols), DomainError);
}
