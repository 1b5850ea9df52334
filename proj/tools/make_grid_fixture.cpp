// Generates a synthetic measurement table in the ingest format, for use as a
// stand-in where no real dataset is available.

#include "dynsen/random.hpp"
#include "dynsen/testing/grid_fixture.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"write a synthetic lat/lon/time measurement table"};
  std::string out = "fixture.csv";
  int points = 200;
  int times = 60;
  std::uint64_t seed = 1;
  app.add_option("--out", out, "output CSV path")->capture_default_str();
  app.add_option("--points", points, "number of locations")->capture_default_str();
  app.add_option("--times", times, "number of time columns")->capture_default_str();
  app.add_option("--seed", seed, "generator seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    dynsen::Rng rng(seed);
    dynsen::testing::write_grid_fixture(out, points, times, rng);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << "wrote " << out << "\n";
  return 0;
}
