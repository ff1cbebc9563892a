// Offset balls next to the graph of a critical Weierstrass function, and how far
// the Vitali selection thins them out.

#include <iostream>

#include "zyg/zyg.hpp"

int main() {
  using namespace zyg;
  const auto f = ScalarField::parse("weierstrass:a=0.5,b=2,N=48");

  const auto family = random_ball_family(1, 128, 4, 12, 1);
  const double M = estimate_M(f, std::span<const Ball>(family)).clamped;
  std::cout << "field " << f.spec() << ", M = " << format_real(M) << "\n";

  LemmaParams params;
  params.delta = 0.5;
  params.M = M;
  params.r = 1.0 / 128;
  for (double x : {0.1, 0.37, 0.8}) {
    const double x0[] = {x};
    const auto p = construct_offset_ball(f, std::span<const double>(x0, 1), params);
    std::cout << "x0 = " << x << ": " << to_string(p.case_tag) << " case, offset centre (" << p.offset.center[0]
              << ", " << p.offset.center[1] << "), radius " << p.offset.radius << ", clearance "
              << p.disjointness.margin << "\n";
  }

  const auto cover = cover_graph(f, Box::unit(1), params);
  std::vector<Ball> offsets;
  for (const auto& p : cover.pairs) offsets.push_back(p.offset);
  const auto kept = vitali_subcover(std::span<const Ball>(offsets));
  std::cout << cover.pairs.size() << " offset balls, " << kept.size() << " kept by the greedy Vitali pass\n";
}
