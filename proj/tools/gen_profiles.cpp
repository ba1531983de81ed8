// Regenerates the synthetic per-unit profile CSVs shipped with the example
// decks. Deterministic for a fixed seed.

#include <cstdint>
#include <iostream>
#include <string>

#include "../src/synthgen.hpp"
#include "../src/util.hpp"

int main(int argc, char** argv) {
  int days = 365, hours = 24;
  uint64_t seed = 777;
  std::string out_dir = ".";
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    auto next = [&] { return std::string(argv[++i]); };
    if (a == "--days") days = std::stoi(next());
    else if (a == "--hours") hours = std::stoi(next());
    else if (a == "--seed") seed = std::stoull(next());
    else if (a == "--out-dir") out_dir = next();
    else {
      std::cerr << "usage: gen_profiles [--days N] [--hours T] [--seed S] [--out-dir D]\n";
      return 2;
    }
  }
  auto p = hyplan::generate_synthetic_year(days, hours, seed);
  hyplan::write_csv(out_dir + "/wt.csv", p.wt);
  hyplan::write_csv(out_dir + "/pv.csv", p.pv);
  hyplan::write_csv(out_dir + "/load.csv", p.load);
  std::cout << "wrote " << days << "-day profiles to " << out_dir << "\n";
  return 0;
}
