#include "patmine/transforms.hpp"

namespace patmine {

std::string to_string(Transform t) {
  switch (t) {
    case Transform::Identity: return "none";
    case Transform::L2Normalize: return "l2";
    case Transform::ElementwiseSqrt: return "sqrt";
  }
  return "none";
}

Transform transform_from_string(const std::string& name) {
  if (name == "none" || name == "identity") return Transform::Identity;
  if (name == "l2") return Transform::L2Normalize;
  if (name == "sqrt") return Transform::ElementwiseSqrt;
  throw std::invalid_argument("unknown transform: " + name);
}

}  // namespace patmine
