#include "aigforge/recipe.hpp"

#include <stdexcept>

namespace aigforge {

namespace {

const std::array<std::string, kNumTransforms> kTokens = {
    "balance", "rewrite", "rewrite -z", "refactor", "refactor -z", "resub", "resub -z"};

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Transform transform_from_id(int id) {
  if (id < 0 || id >= static_cast<int>(kNumTransforms))
    throw std::out_of_range("transform id must be 0..6");
  return static_cast<Transform>(id);
}

const std::string& transform_token(Transform t) {
  const int id = transform_id(t);
  if (id < 0 || id >= static_cast<int>(kNumTransforms))
    throw std::out_of_range("transform id must be 0..6");
  return kTokens[id];
}

Transform transform_from_token(const std::string& token) {
  for (size_t i = 0; i < kNumTransforms; ++i)
    if (kTokens[i] == token) return static_cast<Transform>(i);
  throw std::invalid_argument("unknown transform token '" + token + "'");
}

Recipe parse_recipe(const std::string& text) {
  Recipe recipe;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find_first_of(";\n", pos);
    if (end == std::string::npos) end = text.size();
    const std::string token = trim(text.substr(pos, end - pos));
    if (!token.empty()) recipe.push_back(transform_from_token(token));
    if (end == text.size()) break;
    pos = end + 1;
  }
  return recipe;
}

std::string format_recipe(const Recipe& recipe) {
  std::string out;
  for (size_t i = 0; i < recipe.size(); ++i) {
    if (i) out += "; ";
    out += transform_token(recipe[i]);
  }
  return out;
}

const Recipe& resyn2() {
  static const Recipe r = {
      Transform::balance,  Transform::rewrite,   Transform::refactor, Transform::balance,
      Transform::rewrite,  Transform::rewrite_z, Transform::balance,  Transform::refactor_z,
      Transform::rewrite_z, Transform::balance};
  return r;
}

Recipe resyn2_seed(size_t length) {
  const Recipe& base = resyn2();
  Recipe out;
  out.reserve(length);
  for (size_t i = 0; i < length; ++i) out.push_back(base[i % base.size()]);
  return out;
}

}  // namespace aigforge
