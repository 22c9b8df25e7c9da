#include "emq/pipeline.hpp"

#include "emq/metrics.hpp"

#include <json.hpp>

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace emq;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("fixture registry") {
    CHECK(fixtures::names().size() == 4);
    CHECK_NOTHROW(fixtures::verify_checksums());
    CHECK_THROWS_AS(fixtures::raw("nope"), std::invalid_argument);

    SUBCASE("device parameters") {
        CHECK(fixtures::emc_value_hz("g0") == 283.0);
        CHECK(fixtures::emc_value_hz("n_m") == 42.0);
        const auto p = fixtures::emc_device_params();
        CHECK(p.eta() == doctest::Approx(2.59 / 3.0));
        CHECK(fixtures::cqed_value_hz("kappa_c") == 60e3);
    }
    SUBCASE("density matrix blocks") {
        const Matrix in2 = fixtures::density_block(fixtures::StateKind::Input, 2);
        CHECK(in2(0, 0).real() == 0.660);
        CHECK(in2(1, 1).real() == 0.283);
        CHECK(in2(2, 2).real() == 0.042);
        CHECK(in2(0, 1) == cxd(-0.013, -0.039));
    }
    SUBCASE("all fixtures load with reported deficits") {
        for (int k = 1; k <= 4; ++k) {
            for (auto kind : {fixtures::StateKind::Input, fixtures::StateKind::Mechanical}) {
                double deficit = 1.0;
                const auto rho = fixtures::density_matrix(kind, k, 16, false, false, &deficit);
                CHECK(deficit < 0.02);
                CHECK(deficit >= 0.0);
                CHECK(rho.dim() == 16);
            }
        }
    }
    SUBCASE("PSD repair yields sampling-grade states") {
        const auto m4 =
            fixtures::density_matrix(fixtures::StateKind::Mechanical, 4, 16, true, true);
        CHECK(min_eigenvalue(m4.matrix()) > -1e-12);
        CHECK(m4.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("fig-3 states") {
        const auto e = fixtures::fig3_input_state(16);
        CHECK(e.population(1) == doctest::Approx(0.334 / 0.998).epsilon(1e-12));
        const auto m = fixtures::fig3_mechanical_state(16);
        CHECK(m.population(0) == doctest::Approx(0.683 / 0.997).epsilon(1e-12));
    }
}

TEST_CASE("experiment configuration validation") {
    SUBCASE("zero samples is a schema error and writes nothing") {
        auto j = json::parse(pipeline::bundled_config("photon-capture"));
        j["sampling"]["n_samples"] = 0;
        const std::string dir = "/tmp/emq_test_empty_run";
        fs::remove_all(dir);
        CHECK_THROWS_WITH_AS(pipeline::run_experiment(j.dump(), dir),
                             doctest::Contains("n_samples"), std::invalid_argument);
        CHECK(!fs::exists(dir));
    }
    SUBCASE("several errors are reported together") {
        json j;
        j["mode"] = "photon-capture";
        try {
            pipeline::run_experiment(j.dump(), "/tmp/emq_test_never");
            FAIL("expected validation failure");
        } catch (const std::invalid_argument& e) {
            const std::string msg = e.what();
            CHECK(msg.find("sampling") != std::string::npos);
            CHECK(msg.find("state_source") != std::string::npos);
            CHECK(msg.find("tomography") != std::string::npos);
        }
    }
    SUBCASE("not JSON at all") {
        CHECK_THROWS_AS(pipeline::run_experiment("]o{ops", "/tmp/emq_test_never"),
                        std::invalid_argument);
    }
}

TEST_CASE("photon-capture chain at reduced size") {
    auto j = json::parse(pipeline::bundled_config("photon-capture"));
    j["sampling"]["n_samples"] = 24000;
    j["tomography"]["iterations"] = 250;
    j["threads"] = 2;
    const std::string dir = "/tmp/emq_test_capture_run";
    fs::remove_all(dir);
    const auto res = pipeline::run_experiment(j.dump(), dir);

    const auto metrics = json::parse(res.metrics_json);
    // single-photon probabilities of the two reconstructions
    CHECK(metrics["rho_e"]["p1"].get<double>() == doctest::Approx(0.334).epsilon(0.08));
    CHECK(metrics["rho_m"]["p1"].get<double>() == doctest::Approx(0.27).epsilon(0.12));
    CHECK(metrics.contains("g2_mechanical"));

    for (const char* f : {"rho_e_true.json", "rho_e_est.json", "rho_m_model.json",
                          "rho_m_est.json", "samples_e.csv", "samples_m.csv",
                          "metrics.json", "manifest.json"})
        CHECK(fs::exists(fs::path(dir) / f));

    const auto manifest = json::parse(slurp(fs::path(dir) / "manifest.json"));
    CHECK(manifest["config_hash_fnv1a"] == pipeline::fnv1a_hex(j.dump(2)));
    CHECK(manifest["fixture_checksums"].size() == 4);

    SUBCASE("reruns are byte-identical") {
        const std::string dir2 = "/tmp/emq_test_capture_run2";
        fs::remove_all(dir2);
        const auto res2 = pipeline::run_experiment(j.dump(), dir2);
        CHECK(slurp(fs::path(dir) / "metrics.json") == slurp(fs::path(dir2) / "metrics.json"));
        CHECK(slurp(fs::path(dir) / "rho_m_est.json") ==
              slurp(fs::path(dir2) / "rho_m_est.json"));
    }
}

TEST_CASE("fidelity report without bootstrap") {
    auto j = json::parse(pipeline::bundled_config("fidelity"));
    j["bootstrap"]["enabled"] = false;
    const std::string dir = "/tmp/emq_test_fid_run";
    fs::remove_all(dir);
    const auto res = pipeline::run_experiment(j.dump(), dir);
    const auto rep = json::parse(res.metrics_json);
    CHECK(rep["f_avg"].get<double>() == doctest::Approx(0.8257).epsilon(1e-3));
    CHECK(rep["f_avg_uncorrected"].get<double>() == doctest::Approx(0.8440).epsilon(1e-3));
}
