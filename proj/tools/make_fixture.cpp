// Regenerates the bundled synthetic corpus: make_fixture <output-dir> [seed]
#include "riskrel/error.hpp"
#include "riskrel/synthetic.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  if (argc < 2 || argc > 3) {
    std::cerr << "usage: make_fixture <output-dir> [seed]\n";
    return 2;
  }
  riskrel::synthetic::FixtureOptions options;
  if (argc == 3) options.seed = std::strtoull(argv[2], nullptr, 10);
  try {
    const auto fixture = riskrel::synthetic::generate_fixture(options);
    riskrel::synthetic::write_fixture(fixture, argv[1]);
    std::cout << "wrote " << fixture.files.size() << " files for " << fixture.tickers.size() << " firms\n";
  } catch (const riskrel::Error& e) {
    std::cerr << "make_fixture: error[" << riskrel::to_string(e.code()) << "]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
