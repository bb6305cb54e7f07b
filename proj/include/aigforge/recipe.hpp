/*!
  \file recipe.hpp
  \brief Synthesis transform tokens and recipe text format
*/

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace aigforge {

/*! \brief The seven transform tokens; the enum value is the wire encoding. */
enum class Transform : uint8_t {
  balance = 0,
  rewrite = 1,
  rewrite_z = 2,
  refactor = 3,
  refactor_z = 4,
  resub = 5,
  resub_z = 6,
};

inline constexpr size_t kNumTransforms = 7;

inline constexpr std::array<Transform, kNumTransforms> all_transforms{
    Transform::balance,   Transform::rewrite,    Transform::rewrite_z, Transform::refactor,
    Transform::refactor_z, Transform::resub,     Transform::resub_z};

constexpr int transform_id(Transform t) { return static_cast<int>(t); }
Transform transform_from_id(int id);

const std::string& transform_token(Transform t);
Transform transform_from_token(const std::string& token);

/*! \brief Ordered transform sequence; searches use fixed length L (default 20). */
using Recipe = std::vector<Transform>;

inline constexpr size_t kDefaultRecipeLength = 20;

/*! \brief Parses semicolon- or newline-separated tokens. */
Recipe parse_recipe(const std::string& text);

/*! \brief Renders as "token; token; ..." on one line. */
std::string format_recipe(const Recipe& recipe);

/*! \brief The standard 10-step resyn2 script. */
const Recipe& resyn2();

/*! \brief resyn2 cycled to the requested length (the annealer's start seed). */
Recipe resyn2_seed(size_t length = kDefaultRecipeLength);

}  // namespace aigforge
