// Doubling constant of a seeded dyadic measure and the mass it gives to
// shrinking neighbourhoods of a Zygmund graph.

#include <iostream>

#include "zyg/zyg.hpp"

int main() {
  using namespace zyg;
  const auto tree = DyadicMeasureTree::parse("dyadic:n=2,depth=12,beta=0.1,seed=7");
  const auto doubling = verify_doubling(tree, DoublingPlan{.samples = 100});
  std::cout << tree.spec() << ": doubling C <= " << format_real(doubling.C) << "\n";

  const auto emb = embed_in_unit_cube(ScalarField::parse("weierstrass:a=0.5,b=2,N=48"));
  std::vector<double> deltas;
  for (int k = 3; k <= 8; ++k) deltas.push_back(std::exp2(-k));
  for (const auto& row : neighborhood_mass_profile(emb.field, tree, deltas)) {
    std::cout << "delta " << row.delta << ": mass in [" << row.mass.lower << ", " << row.mass.upper << "]\n";
  }
}
