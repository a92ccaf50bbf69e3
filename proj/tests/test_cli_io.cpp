#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "plqr/cli.hpp"
#include "plqr/config.hpp"
#include "plqr/serialize.hpp"
#include "plqr/svg_plot.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json base_config() {
    json doc;
    doc["spacecraft"]["inertia"] = {250.0, 150.0, 100.0};
    doc["spacecraft"]["wheel_inertia"] = {0.05, 0.05, 0.05};
    doc["orbit"]["altitude_m"] = 657e3;
    doc["orbit"]["magnetic_inclination_deg"] = 57.0;
    doc["discretization"]["samples_per_period"] = 100;
    doc["discretization"]["sample_period_s"] = 58.6352;
    doc["sim"]["mode"] = "linear";
    doc["sim"]["duration_orbits"] = 2.0;
    doc["sim"]["initial"]["omega"] = {1e-5, 1e-5, 1e-5};
    doc["sim"]["initial"]["wheel_speed"] = {1e-5, 1e-5, 1e-5};
    doc["sim"]["initial"]["q"] = {0.01, 0.01, 0.01};
    return doc;
}

// Scratch directory, removed on destruction.
struct TempDir {
    fs::path path;
    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path = fs::temp_directory_path() /
               ("plqr_test_" + std::to_string(rng()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream stream(path);
    stream << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream stream(path);
    return std::string(std::istreambuf_iterator<char>(stream),
                       std::istreambuf_iterator<char>());
}

// One design run shared by the CLI tests.
struct DesignedFixture {
    TempDir dir;
    std::string config_path;
    std::string schedule_path;

    DesignedFixture() {
        config_path = dir.file("config.json");
        write_text(config_path, base_config().dump());
        REQUIRE(plqr::run_cli({"design", "--config", config_path, "--out",
                               dir.path.string()}) == 0);
        schedule_path = dir.file("schedule.json");
        REQUIRE(fs::exists(schedule_path));
        REQUIRE(fs::exists(dir.file("design_report.json")));
    }
};

DesignedFixture& designed() {
    static DesignedFixture fixture;
    return fixture;
}

}  // namespace

TEST_CASE("config: missing wheel inertia is named in the error") {
    json doc = base_config();
    doc["spacecraft"].erase("wheel_inertia");
    try {
        plqr::RunConfig::from_json(doc);
        FAIL("expected a validation error");
    } catch (const plqr::ValidationError& err) {
        CHECK(std::string(err.what()).find("wheel_inertia") != std::string::npos);
    }
}

TEST_CASE("config: schema rejections") {
    json doc = base_config();
    doc["spacecraft"]["inertia"] = {250.0, -150.0, 100.0};
    CHECK_THROWS_AS(plqr::RunConfig::from_json(doc), plqr::ValidationError);

    doc = base_config();
    doc["discretization"]["samples_per_period"] = 0;
    CHECK_THROWS_AS(plqr::RunConfig::from_json(doc), plqr::ValidationError);

    doc = base_config();
    doc["sim"]["duty_fraction"] = 1.5;
    CHECK_THROWS_AS(plqr::RunConfig::from_json(doc), plqr::ValidationError);

    doc = base_config();
    doc["sim"]["mode"] = "magic";
    CHECK_THROWS_AS(plqr::RunConfig::from_json(doc), plqr::ValidationError);
}

TEST_CASE("config: defaults fill in the default weights") {
    const auto cfg = plqr::RunConfig::from_json(base_config());
    CHECK(cfg.q_weight(0, 0) == 0.001);
    CHECK(cfg.q_weight(8, 8) == 0.02);
    CHECK(cfg.r_weight(0, 0) == 1000.0);
    CHECK(cfg.r_weight(5, 5) == 100.0);
    CHECK(cfg.orbit.period == doctest::Approx(5863.5).epsilon(1e-3));
}

TEST_CASE("schedule JSON round trip is exact") {
    const auto cfg = plqr::RunConfig::from_json(base_config());
    auto plant = cfg.build_plant();
    // Shrink the problem for speed: reuse the first few samples as a cycle.
    plant.p = 4;
    plant.b.resize(4);
    auto schedule = plqr::periodic_riccati(plant);
    schedule.ts = plant.ts;

    const auto doc = plqr::schedule_to_json(schedule);
    const auto round = plqr::schedule_from_json(json::parse(doc.dump()));
    REQUIRE(round.p == schedule.p);
    CHECK(round.ts == schedule.ts);
    for (int k = 0; k < schedule.p; ++k) {
        CHECK((round.riccati_at(k) - schedule.riccati_at(k)).norm() == 0.0);
        CHECK((round.gain_at(k) - schedule.gain_at(k)).norm() == 0.0);
    }
    CHECK((round.x_bar - schedule.x_bar).norm() == 0.0);
}

TEST_CASE("plant JSON round trip is exact") {
    const auto cfg = plqr::RunConfig::from_json(base_config());
    const auto plant = cfg.build_plant();
    const auto round = plqr::plant_from_json(json::parse(plqr::plant_to_json(plant).dump()));
    CHECK((round.a - plant.a).norm() == 0.0);
    CHECK(round.p == plant.p);
    CHECK(round.ts == plant.ts);
    for (int k = 0; k < plant.p; ++k) {
        CHECK((round.b_at(k) - plant.b_at(k)).norm() == 0.0);
    }
    CHECK((round.q - plant.q).norm() == 0.0);
    CHECK((round.r - plant.r).norm() == 0.0);
}

TEST_CASE("trajectory CSV round trip is exact") {
    plqr::Trajectory traj;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < 10; ++i) {
        plqr::TrajectorySample row;
        row.t = i * 58.6352;
        for (int j = 0; j < 3; ++j) {
            row.omega(j) = dist(rng) * 1e-5;
            row.wheel_speed(j) = dist(rng);
            row.q(j) = dist(rng) * 0.02;
            row.wheel_torque(j) = dist(rng) * 1e-3;
            row.dipole_moment(j) = dist(rng) * 10.0;
            row.field(j) = dist(rng) * 2e-5;
        }
        traj.samples.push_back(row);
    }
    const std::string csv = plqr::trajectory_to_csv(traj);
    const auto round = plqr::trajectory_from_csv(csv);
    REQUIRE(round.samples.size() == traj.samples.size());
    for (size_t i = 0; i < traj.samples.size(); ++i) {
        CHECK(round.samples[i].t == traj.samples[i].t);
        CHECK(round.samples[i].omega == traj.samples[i].omega);
        CHECK(round.samples[i].wheel_speed == traj.samples[i].wheel_speed);
        CHECK(round.samples[i].q == traj.samples[i].q);
        CHECK(round.samples[i].wheel_torque == traj.samples[i].wheel_torque);
        CHECK(round.samples[i].dipole_moment == traj.samples[i].dipole_moment);
        CHECK(round.samples[i].field == traj.samples[i].field);
    }
}

TEST_CASE("trajectory CSV parser reports the offending line") {
    const std::string header(plqr::kTrajectoryCsvHeader);
    CHECK_THROWS_AS(plqr::trajectory_from_csv(""), plqr::IoError);
    CHECK_THROWS_AS(plqr::trajectory_from_csv("bogus\n"), plqr::IoError);

    try {
        plqr::trajectory_from_csv(header + "\n1,2,3\n");
        FAIL("expected an IO error");
    } catch (const plqr::IoError& err) {
        CHECK(std::string(err.what()).find("line 2") != std::string::npos);
    }

    std::string good_row;
    for (int i = 0; i < 19; ++i) good_row += (i ? ",1" : "1");
    try {
        plqr::trajectory_from_csv(header + "\n" + good_row + "\n" + good_row + "\n");
        FAIL("expected an IO error (non-increasing time)");
    } catch (const plqr::IoError& err) {
        CHECK(std::string(err.what()).find("line 3") != std::string::npos);
    }

    try {
        plqr::trajectory_from_csv(header + "\n0,1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,oops\n");
        FAIL("expected an IO error (bad token)");
    } catch (const plqr::IoError& err) {
        CHECK(std::string(err.what()).find("oops") != std::string::npos);
    }
}

TEST_CASE("cli: design, simulate, plot, verify round trip") {
    auto& fixture = designed();
    const std::string out = fixture.dir.path.string();

    CHECK(plqr::run_cli({"simulate", "--config", fixture.config_path, "--schedule",
                         fixture.schedule_path, "--out", out}) == 0);
    const std::string csv_path = fixture.dir.file("trajectory.csv");
    REQUIRE(fs::exists(csv_path));

    CHECK(plqr::run_cli({"plot", "--trajectory", csv_path, "--out", out}) == 0);
    CHECK(fs::exists(fixture.dir.file("rates.svg")));
    CHECK(fs::exists(fixture.dir.file("wheels.svg")));
    CHECK(fs::exists(fixture.dir.file("attitude.svg")));

    CHECK(plqr::run_cli({"verify", "--config", fixture.config_path, "--schedule",
                         fixture.schedule_path, "--vi-periods", "50"}) == 0);
}

TEST_CASE("cli: simulate is deterministic for a fixed seed") {
    auto& fixture = designed();
    TempDir out1, out2;
    json doc = base_config();
    doc["sim"]["mode"] = "nonlinear";
    doc["sim"]["duration_orbits"] = 0.5;
    doc["sim"]["substeps_per_sample"] = 8;
    doc["sim"]["ic_random_halfwidth"]["q"] = {0.02, 0.02, 0.02};
    const std::string config_path = out1.file("config.json");
    write_text(config_path, doc.dump());

    CHECK(plqr::run_cli({"simulate", "--config", config_path, "--schedule",
                         fixture.schedule_path, "--out", out1.path.string(), "--seed", "7"}) == 0);
    CHECK(plqr::run_cli({"simulate", "--config", config_path, "--schedule",
                         fixture.schedule_path, "--out", out2.path.string(), "--seed", "7"}) == 0);
    CHECK(read_text(out1.path / "trajectory.csv") == read_text(out2.path / "trajectory.csv"));

    TempDir out3;
    CHECK(plqr::run_cli({"simulate", "--config", config_path, "--schedule",
                         fixture.schedule_path, "--out", out3.path.string(), "--seed", "8"}) == 0);
    CHECK(read_text(out1.path / "trajectory.csv") != read_text(out3.path / "trajectory.csv"));
}

TEST_CASE("cli: zero-duration simulation writes only the initial row") {
    auto& fixture = designed();
    TempDir out;
    json doc = base_config();
    doc["sim"]["duration_orbits"] = 0.0;
    const std::string config_path = out.file("config.json");
    write_text(config_path, doc.dump());
    CHECK(plqr::run_cli({"simulate", "--config", config_path, "--schedule",
                         fixture.schedule_path, "--out", out.path.string()}) == 0);
    const auto traj = plqr::read_trajectory_csv(out.path / "trajectory.csv");
    CHECK(traj.samples.size() == 1);
}

TEST_CASE("cli: verify fails on a perturbed schedule and names the invariant") {
    auto& fixture = designed();
    TempDir out;
    json doc = plqr::read_json_file(fixture.schedule_path);
    // Perturb one Riccati solution by 1%.
    const double value = doc["riccati"][10][5].get<double>();
    doc["riccati"][10][5] = value * 1.01 + 1e-6;
    const std::string bad_path = out.file("bad_schedule.json");
    plqr::write_json_file(bad_path, doc);

    CHECK(plqr::run_cli({"verify", "--config", fixture.config_path, "--schedule", bad_path}) ==
          3);
}

TEST_CASE("cli: verify fails fast on a period mismatch") {
    auto& fixture = designed();
    TempDir out;
    json doc = base_config();
    doc["discretization"]["samples_per_period"] = 50;
    doc["discretization"]["sample_period_s"] = 2.0 * 58.6352;
    const std::string config_path = out.file("config.json");
    write_text(config_path, doc.dump());
    CHECK(plqr::run_cli({"verify", "--config", config_path, "--schedule",
                         fixture.schedule_path}) == 3);
}

TEST_CASE("cli: exit codes distinguish validation, solver, and IO failures") {
    TempDir dir;
    json doc = base_config();
    doc["spacecraft"].erase("wheel_inertia");
    const std::string bad_config = dir.file("bad.json");
    write_text(bad_config, doc.dump());
    CHECK(plqr::run_cli({"design", "--config", bad_config, "--out", dir.path.string()}) == 2);

    CHECK(plqr::run_cli({"simulate", "--config", designed().config_path, "--schedule",
                         dir.file("nonexistent.json"), "--out", dir.path.string()}) == 4);
}

TEST_CASE("cli: plot rejects a header-only CSV but accepts a single row") {
    TempDir dir;
    const std::string empty_csv = dir.file("empty.csv");
    write_text(empty_csv, std::string(plqr::kTrajectoryCsvHeader) + "\n");
    CHECK(plqr::run_cli({"plot", "--trajectory", empty_csv, "--out", dir.path.string()}) == 4);

    std::string row = "0";
    for (int i = 1; i < 19; ++i) row += ",0.5";
    const std::string single_csv = dir.file("single.csv");
    write_text(single_csv, std::string(plqr::kTrajectoryCsvHeader) + "\n" + row + "\n");
    CHECK(plqr::run_cli({"plot", "--trajectory", single_csv, "--out", dir.path.string()}) == 0);
    CHECK(fs::exists(dir.path / "rates.svg"));
}

TEST_CASE("cli: equatorial design reports the constant-field fast path") {
    TempDir dir;
    json doc = base_config();
    doc["orbit"]["magnetic_inclination_deg"] = 0.0;
    const std::string config_path = dir.file("config.json");
    write_text(config_path, doc.dump());
    CHECK(plqr::run_cli({"design", "--config", config_path, "--out", dir.path.string()}) == 0);

    const json report = plqr::read_json_file(dir.path / "design_report.json");
    CHECK(report["solver"].get<std::string>().find("constant-field") != std::string::npos);
    const json schedule = plqr::read_json_file(dir.path / "schedule.json");
    CHECK(schedule["p"].get<int>() == 1);

    // The broadcast schedule simulates against the full-period config.
    CHECK(plqr::run_cli({"simulate", "--config", config_path, "--schedule",
                         dir.file("schedule.json"), "--out", dir.path.string()}) == 0);
}

TEST_CASE("svg charts are deterministic") {
    std::vector<plqr::PlotSeries> series(2);
    series[0] = {"a", {0.0, 1.0, 2.0}, {0.5, -0.25, 0.125}};
    series[1] = {"b", {0.0, 1.0, 2.0}, {-1.0, 0.0, 1.0}};
    const std::string one = plqr::render_line_chart("t", "x", "y", series);
    const std::string two = plqr::render_line_chart("t", "x", "y", series);
    CHECK(one == two);
    CHECK(one.find("<polyline") != std::string::npos);
}
