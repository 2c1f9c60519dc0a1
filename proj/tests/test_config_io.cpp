#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "tidal/config_io.hpp"

using namespace tidal;

namespace {

const char* kReference =
    "# reference scenario\n"
    "number_of_bodies = 4\n"
    "mass_of_planet = 2e27\n"
    "mass_of_satellite = 3e22\n"
    "initial_time_step = 10\n"
    "total_simulation_time = 125000\n"
    "body_chosen_as_origin = 1\n"
    "tolerance = 100   # metres\n"
    "initial_distance_of_satellite = 1e8\n"
    "unstretched_length_of_spring = 1e6\n"
    "initial_eccentricity = 0.6\n";

}  // namespace

TEST(ConfigParse, ReferenceFileResolvesDefaults) {
  const auto c = parse_config(kReference);
  const auto ref = reference_config();
  EXPECT_EQ(c.number_of_bodies, 4);
  EXPECT_EQ(c.mass_of_planet, ref.mass_of_planet);
  EXPECT_EQ(c.tolerance, 100.0);
  EXPECT_EQ(c.spring_constant, ref.spring_constant);
  EXPECT_EQ(c.damping_coefficient, ref.damping_coefficient);
  EXPECT_EQ(c.output_interval, ref.output_interval);
  EXPECT_EQ(c.constants.gravitational_constant, 6.667e-11);
}

TEST(ConfigParse, OptionalKeysOverride) {
  const auto c = parse_config(std::string(kReference) +
                              "spring_constant = 5\n"
                              "damping_coefficient = 0\n"
                              "output_interval = 25\n"
                              "gravitational_constant = 1\n");
  EXPECT_EQ(c.spring_constant, 5.0);
  EXPECT_EQ(c.damping_coefficient, 0.0);
  EXPECT_EQ(c.output_interval, 25.0);
  EXPECT_EQ(c.constants.gravitational_constant, 1.0);
}

TEST(ConfigParse, Errors) {
  EXPECT_THROW(parse_config(std::string(kReference) + "spin = 3\n"), ConfigError);
  EXPECT_THROW(parse_config(std::string(kReference) + "tolerance = 5\n"), ConfigError);
  EXPECT_THROW(parse_config("number_of_bodies = 4\n"), ConfigError);
  EXPECT_THROW(parse_config(std::string(kReference) + "output_interval = ten\n"),
               ConfigError);
  EXPECT_THROW(parse_config(std::string(kReference) + "just words\n"), ConfigError);
  try {
    parse_config(std::string(kReference) + "spin = 3\n");
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 12"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("spin"), std::string::npos);
  }
  try {
    parse_config("tolerance = 1\n");
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("initial_eccentricity"), std::string::npos);
  }
}

TEST(ConfigParse, FormatRoundTripsExactly) {
  auto c = parse_config(kReference);
  c.tolerance = 0.1;  // not exactly representable
  c.initial_eccentricity = 1.0 / 3.0;
  const auto back = parse_config(format_config(c));
  EXPECT_EQ(back.tolerance, c.tolerance);
  EXPECT_EQ(back.initial_eccentricity, c.initial_eccentricity);
  EXPECT_EQ(back.spring_constant, c.spring_constant);
  EXPECT_EQ(format_config(back), format_config(c));
}

TEST(FormatDouble, RoundTripsRandomValues) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
  std::uniform_int_distribution<int> exponent(-300, 300);
  for (int i = 0; i < 10000; ++i) {
    const double v = std::ldexp(mantissa(rng), exponent(rng));
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(AtomicWrite, ReplacesContentAndLeavesNoTemporary) {
  const auto dir = std::filesystem::temp_directory_path() / "tidal_atomic_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.txt";
  write_file_atomic(path, "first");
  write_file_atomic(path, "second");
  EXPECT_EQ(read_file(path), "second");
  EXPECT_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
  std::filesystem::remove_all(dir);
}

TEST(AtomicWrite, UnwritableDirectoryThrows) {
  EXPECT_ANY_THROW(write_file_atomic("/nonexistent-dir/x.txt", "x"));
}
