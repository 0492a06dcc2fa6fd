#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "pulselab.h"

namespace {

std::filesystem::path sandbox() {
  auto p = std::filesystem::temp_directory_path() / "pulselab_capi_test";
  std::filesystem::create_directories(p);
  return p;
}

std::string write_config(const char* name, const char* text) {
  const auto path = sandbox() / name;
  std::ofstream f(path);
  f << text;
  return path.string();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

}  // namespace

TEST_SUITE_BEGIN("capi");

TEST_CASE("reaction handles expose metadata and values") {
  plab_reaction* r = nullptr;
  REQUIRE(plab_reaction_create(R"({"kind":"family_1d","tau":0.5,"sigma":0.1})", &r) ==
          PLAB_OK);
  CHECK(plab_reaction_dim(r) == 1);
  CHECK(plab_reaction_num_levels(r) == 2);
  double levels[2], period[1];
  CHECK(plab_reaction_levels(r, levels) == PLAB_OK);
  CHECK(levels[0] == 0.0);
  CHECK(levels[1] == 1.0);
  CHECK(plab_reaction_period(r, period) == PLAB_OK);
  CHECK(period[0] == 1.0);
  CHECK(plab_reaction_gamma(r) == doctest::Approx(-0.5));
  CHECK(plab_reaction_delta0(r) == doctest::Approx(0.05));

  const double x = 0.3;
  double v = 0.0, dv = 0.0;
  CHECK(plab_reaction_value(r, &x, 0.0, &v) == PLAB_OK);
  CHECK(v == 0.0);
  CHECK(plab_reaction_deriv_u(r, &x, 0.0, &dv) == PLAB_OK);
  CHECK(dv == doctest::Approx(-0.5));

  double integral = 0.0;
  int sign = 0;
  CHECK(plab_integral_sign(r, &integral, &sign) == PLAB_OK);
  CHECK(sign == 1);
  plab_reaction_free(r);

  plab_reaction* bad = nullptr;
  CHECK(plab_reaction_create(R"({"kind":"nope"})", &bad) == PLAB_CONFIG_ERROR);
  CHECK(bad == nullptr);
  CHECK(std::string(plab_last_error()).find("kind") != std::string::npos);
  CHECK(plab_reaction_create(R"({"kind":"family_1d","sig":1})", &bad) ==
        PLAB_CONFIG_ERROR);
}

TEST_CASE("membership, rational directions and the envelope") {
  const double L[2] = {1.0, 1.0};
  int member = 0;
  double quantum = 0.0;
  const double axis[2] = {1.0, 0.0};
  CHECK(plab_membership_sl(axis, L, 2, &member, &quantum) == PLAB_OK);
  CHECK(member == 1);
  CHECK(quantum == doctest::Approx(1.0));
  const double irr[2] = {std::cos(1.0), std::sin(1.0)};
  CHECK(plab_membership_sl(irr, L, 2, &member, &quantum) == PLAB_OK);
  CHECK(member == 0);

  double dirs[10];
  CHECK(plab_rational_directions(5, dirs) == PLAB_OK);
  CHECK(dirs[0] == 1.0);
  CHECK(dirs[1] == 0.0);

  const double sdirs[4] = {1.0, 0.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  const double speeds[2] = {1.0, 0.6};
  const double query[2] = {1.0, 0.0};
  double w = 0.0;
  CHECK(plab_fg_envelope(sdirs, speeds, 2, 2, query, 1, &w) == PLAB_OK);
  CHECK(w == doctest::Approx(0.6 * std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("plab_run drives experiments and reports config errors") {
  const auto out = sandbox() / "fg_out";
  auto cfg = write_config("fg.json", R"({
    "fg": {
      "samples": [{"dir": [1, 0], "speed": 1.0},
                   {"dir": [0.7071067811865476, 0.7071067811865476], "speed": 0.6}],
      "queries": [[1, 0]]
    }
  })");
  CHECK(plab_run("fg", cfg.c_str(), out.string().c_str(), 1, 1) == PLAB_OK);
  const std::string csv = slurp(out / "fg.csv");
  CHECK(csv.find("e_1,e_2,wstar") != std::string::npos);
  CHECK(csv.find("0.848528137424") != std::string::npos);

  // byte-reproducibility of a rerun
  CHECK(plab_run("fg", cfg.c_str(), (sandbox() / "fg_out2").string().c_str(), 1, 1) ==
        PLAB_OK);
  CHECK(slurp(sandbox() / "fg_out2" / "fg.csv") == csv);

  auto missing = write_config("missing_period.json", R"({
    "reaction": {"kind": "family_multidir", "tau": [0.5, 0.5], "sigma": 0.1,
                  "dirs": [[1, 0], [0, 1]]}
  })");
  CHECK(plab_run("speed", missing.c_str(), out.string().c_str(), 1, 1) ==
        PLAB_CONFIG_ERROR);

  auto unknown = write_config("unknown_key.json",
                              R"({"reaction": {"kind": "cubic"}, "solver": {"dx": 1}})");
  CHECK(plab_run("speed", unknown.c_str(), out.string().c_str(), 1, 1) ==
        PLAB_CONFIG_ERROR);
  CHECK(plab_run("frobnicate", cfg.c_str(), out.string().c_str(), 1, 1) ==
        PLAB_CONFIG_ERROR);
  CHECK(plab_run("fg", "/nonexistent/file.json", out.string().c_str(), 1, 1) ==
        PLAB_CONFIG_ERROR);
}

TEST_CASE("plab_run certify on the homogeneous cubic") {
  auto cfg = write_config("certify.json", R"({
    "reaction": {"kind": "cubic"},
    "spectra": {"harvest_runs": 4, "harvest_t_time": 8.0, "cell_nodes": 128}
  })");
  const auto out = sandbox() / "certify_out";
  CHECK(plab_run("certify", cfg.c_str(), out.string().c_str(), 1, 7) == PLAB_OK);
  const std::string csv = slurp(out / "certification.csv");
  CHECK(csv.find("state_id,max,min,lambda1,tag") != std::string::npos);
  CHECK(csv.find("unstable") != std::string::npos);
  CHECK(slurp(out / "summary.txt").find("certified") != std::string::npos);
}

TEST_SUITE_END();
