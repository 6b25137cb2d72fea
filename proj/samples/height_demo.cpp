// Walks through the library on the standard family y^2 = x^3 + t x + 1,
// P = (0, 1): the height over Q(t), a few fiber heights, and a small census.

#include <cmath>
#include <iostream>

#include "canheight/format.hpp"
#include "canheight/specialization.hpp"
#include "canheight/zhang_scan.hpp"

using namespace canheight;

int main(int argc, char** argv) {
  std::string path = argc > 1 ? argv[1] : std::string(CANHEIGHT_DATA_DIR) + "/families/standard.json";
  Family fam = load_family(path);

  Rational hff = canonical_height_ff_exact(fam.curve, fam.section);
  std::cout << "family " << fam.label << ": canonical height over Q(t) = " << hff << "\n";

  for (long t0 : {1L, 2L, 3L, -1L}) {
    try {
      auto est = fiber_height(fam, Rational(t0));
      std::cout << "  t0 = " << t0 << "  hhat = " << format_real(est.value) << "  (m = " << est.m_used()
                << ", bound " << format_real(est.error_bound) << ")\n";
    } catch (const BadReduction& e) {
      std::cout << "  t0 = " << t0 << "  bad fiber (" << to_string(e.cause()) << ")\n";
    }
  }

  auto report = zhang_scan(fam, std::log(3.0), 0.0, ScanOptions{});
  std::cout << "census at B = log 3: " << report.census_size << " parameters, small set {";
  for (std::size_t i = 0; i < report.small_set.size(); ++i)
    std::cout << (i ? ", " : "") << report.small_set[i].t0;
  std::cout << "}\n";
  std::cout << "sandwich [" << format_real(report.sandwich_low) << ", " << format_real(report.sandwich_high)
            << "], verdict " << report.bigness_verdict << "\n";
}
