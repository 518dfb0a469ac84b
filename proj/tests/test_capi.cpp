// Exercises the shared library strictly through the C header.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "spinmz.h"

namespace fs = std::filesystem;

namespace {

constexpr double tau = 6.283185307179586476925286766559;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("spinmz_capi_" + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const char* spectrum_cfg =
    "[model]\n"
    "n_ions = 4\n"
    "lambda = 2pi*8kHz\n"
    "[spectrum]\n"
    "bx_max = 2pi*50kHz\n"
    "bx_points = 7\n";

}  // namespace

TEST_CASE("version string is exposed") {
  std::string v = spinmz_version();
  CHECK(v.rfind("spinmz ", 0) == 0);
}

TEST_CASE("physical-parameter calculators") {
  double lambda = 0.0;
  REQUIRE(spinmz_lambda_from_physical(tau * 1e6, 0.1, tau * 1e6, 10,
                                      &lambda) == SPINMZ_OK);
  CHECK(lambda == doctest::Approx(tau * 8000).epsilon(1e-12));

  double gamma0 = 0.0;
  REQUIRE(spinmz_dephasing_rate_from_physical(tau * 0.2, tau * 1e6, tau * 1e7,
                                              &gamma0) == SPINMZ_OK);
  CHECK(gamma0 == doctest::Approx(tau * 0.002).epsilon(1e-12));

  CHECK(spinmz_lambda_from_physical(1.0, 0.1, 1.0, 0, &lambda) ==
        SPINMZ_E_CONFIG);
  CHECK(std::string(spinmz_last_error()).empty() == false);
  CHECK(spinmz_dephasing_rate_from_physical(1.0, 1.0, 0.0, &gamma0) ==
        SPINMZ_E_CONFIG);
}

TEST_CASE("ghz qfi calculator matches the closed form") {
  double f = 0.0;
  REQUIRE(spinmz_ghz_qfi(3, 5e-3, 0.0, &f) == SPINMZ_OK);
  CHECK(f == doctest::Approx(2.25e-4).epsilon(1e-12));
  REQUIRE(spinmz_ghz_qfi(3, 5e-3, 0.0125663706143592, &f) == SPINMZ_OK);
  CHECK(f == doctest::Approx(2.25e-4 * std::exp(-2.0 * 0.0125663706143592 *
                                                5e-3 * 9.0))
                 .epsilon(1e-12));
  CHECK(spinmz_ghz_qfi(0, 1.0, 0.0, &f) == SPINMZ_E_CONFIG);
  CHECK(spinmz_ghz_qfi(3, -1.0, 0.0, &f) == SPINMZ_E_CONFIG);
}

TEST_CASE("spectrum gap calculator") {
  double gap = -1.0;
  REQUIRE(spinmz_spectrum_gap(4, 0.0, 0.0, tau * 8000, &gap) == SPINMZ_OK);
  CHECK(std::abs(gap) <= 1e-9 * tau * 8000);  // exact degeneracy at bx = 0
  REQUIRE(spinmz_spectrum_gap(4, 0.0, tau * 100e3, tau * 8000, &gap) ==
          SPINMZ_OK);
  CHECK(gap > 0.0);
  // diagonal Hamiltonian: gap = N * delta when delta = lambda / 4
  double lambda = tau * 8000;
  REQUIRE(spinmz_spectrum_gap(2, lambda / 4, 0.0, lambda, &gap) == SPINMZ_OK);
  CHECK(gap == doctest::Approx(2 * lambda / 4).epsilon(1e-12));
  CHECK(spinmz_spectrum_gap(0, 0.0, 0.0, 1.0, &gap) == SPINMZ_E_CONFIG);
}

TEST_CASE("null arguments are reported, not crashed on") {
  CHECK(spinmz_ghz_qfi(3, 1.0, 0.0, nullptr) == SPINMZ_E_INTERNAL);
  CHECK(spinmz_run_config_text(nullptr, "x", nullptr, 0, 0, 0, nullptr) ==
        SPINMZ_E_INTERNAL);
  CHECK(spinmz_config_check_text("spectrum", nullptr) == SPINMZ_E_INTERNAL);
  CHECK(spinmz_run_exit_code(nullptr) == 2);
  CHECK(std::string(spinmz_run_id(nullptr)).empty());
  CHECK(std::string(spinmz_run_output_path(nullptr, 0)).empty());
  spinmz_run_free(nullptr);  // must be a no-op
}

TEST_CASE("config check distinguishes good and bad schemas") {
  CHECK(spinmz_config_check_text("spectrum", spectrum_cfg) == SPINMZ_OK);
  CHECK(spinmz_config_check_text("decoherence", spectrum_cfg) ==
        SPINMZ_E_CONFIG);
  CHECK(spinmz_config_check_text("spectrum", "[model]\nwhat = 1\n") ==
        SPINMZ_E_CONFIG);
  std::string err = spinmz_last_error();
  CHECK(err.find("n_ions") != std::string::npos);
}

TEST_CASE("a full run through the c surface") {
  TempDir dir("run");
  spinmz_run* run = nullptr;
  spinmz_status st = spinmz_run_config_text(
      "spectrum", spectrum_cfg, dir.path.c_str(), 2, 1, 42, &run);
  REQUIRE(st == SPINMZ_OK);
  REQUIRE(run != nullptr);
  CHECK(spinmz_run_exit_code(run) == 0);
  CHECK(std::string(spinmz_run_id(run)).size() == 16);
  CHECK(std::string(spinmz_run_message(run)).find("spectrum") !=
        std::string::npos);

  int n = spinmz_run_output_count(run);
  REQUIRE(n == 2);
  for (int i = 0; i < n; ++i) {
    fs::path p = spinmz_run_output_path(run, i);
    CHECK(fs::exists(p));
  }
  CHECK(std::string(spinmz_run_output_path(run, n)).empty());

  auto summary = nlohmann::json::parse(spinmz_run_summary_json(run));
  CHECK(summary["command"] == "spectrum");
  CHECK(summary["seed"] == 42);
  CHECK(summary["bx_points"] == 7);
  spinmz_run_free(run);
}

TEST_CASE("config problems come back as E_CONFIG with no run handle") {
  TempDir dir("bad");
  spinmz_run* run = reinterpret_cast<spinmz_run*>(0x1);
  spinmz_status st = spinmz_run_config_text(
      "spectrum", "[model]\nn_ions = 4\n", dir.path.c_str(), 0, 0, 0, &run);
  CHECK(st == SPINMZ_E_CONFIG);
  CHECK(run == nullptr);
  CHECK(std::string(spinmz_last_error()).empty() == false);

  st = spinmz_run_config_file("spectrum", (dir.path / "nope.ini").c_str(),
                              dir.path.c_str(), 0, 0, 0, &run);
  CHECK(st == SPINMZ_E_CONFIG);
  CHECK(run == nullptr);
}

TEST_CASE("physics failures keep the run handle and map to E_VALIDATION") {
  TempDir dir("quench");
  const char* quench_cfg =
      "[model]\n"
      "n_ions = 4\n"
      "lambda = 2pi*8kHz\n"
      "[protocol]\n"
      "alpha = 2pi*100kHz\n"
      "beta = 2pi*500000kHz/ms\n"
      "delta_recombine = 2pi*1kHz\n"
      "phase = 0.3\n";
  spinmz_run* run = nullptr;
  spinmz_status st = spinmz_run_config_text("protocol", quench_cfg,
                                            dir.path.c_str(), 1, 0, 0, &run);
  CHECK(st == SPINMZ_E_VALIDATION);
  REQUIRE(run != nullptr);
  CHECK(spinmz_run_exit_code(run) == 1);
  CHECK(spinmz_run_output_count(run) == 1);  // summary still written
  auto summary = nlohmann::json::parse(spinmz_run_summary_json(run));
  CHECK(summary["record"]["adiabatic"] == false);
  spinmz_run_free(run);
}

TEST_CASE("identical seeds give identical bytes through the c surface") {
  TempDir d1("det1"), d2("det2");
  auto run_into = [&](const fs::path& dir) {
    spinmz_run* run = nullptr;
    REQUIRE(spinmz_run_config_text("spectrum", spectrum_cfg, dir.c_str(), 1,
                                   1, 7, &run) == SPINMZ_OK);
    std::string csv_path;
    for (int i = 0; i < spinmz_run_output_count(run); ++i) {
      std::string p = spinmz_run_output_path(run, i);
      if (p.size() > 4 && p.substr(p.size() - 4) == ".csv") csv_path = p;
    }
    spinmz_run_free(run);
    REQUIRE(!csv_path.empty());
    std::ifstream in(csv_path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  CHECK(run_into(d1.path) == run_into(d2.path));
}
