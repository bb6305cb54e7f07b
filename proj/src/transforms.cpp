#include <chrono>
#include <stdexcept>

#include "aigforge/transforms.hpp"

namespace aigforge {

Aig apply_transform(const Aig& aig, Transform t) {
  switch (t) {
    case Transform::balance: return balance(aig);
    case Transform::rewrite: return rewrite(aig, false);
    case Transform::rewrite_z: return rewrite(aig, true);
    case Transform::refactor: return refactor(aig, false);
    case Transform::refactor_z: return refactor(aig, true);
    case Transform::resub: return resub(aig, false);
    case Transform::resub_z: return resub(aig, true);
  }
  throw std::invalid_argument("unknown transform");
}

SynthesisResult apply_recipe(const Aig& aig, const Recipe& recipe) {
  const auto start = std::chrono::steady_clock::now();
  SynthesisResult result;
  result.trajectory.reserve(recipe.size() + 1);
  result.trajectory.push_back(stats(aig));
  Aig current = aig;
  for (const Transform t : recipe) {
    current = apply_transform(current, t);
    result.trajectory.push_back(stats(current));
  }
  result.final = recipe.empty() ? sweep(current) : std::move(current);
  const auto end = std::chrono::steady_clock::now();
  result.wall_time = std::chrono::duration<double>(end - start).count();
  return result;
}

uint64_t qor(const SynthesisResult& result) { return stats(result.final).nodes; }

}  // namespace aigforge
