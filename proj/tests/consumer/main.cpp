#include <pivm/solver.hpp>

int main() {
  const auto cp = pivm::CouplingParams::make(pivm::PrimeContext(5, 8), 2, 5, 5);
  return pivm::solve_translation_invariant(cp).size() == 3 ? 0 : 1;
}
