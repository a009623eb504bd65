#include "qsync/common.hpp"

namespace qsync {

std::string_view to_string(Model model) {
  switch (model) {
    case Model::Lcm:
      return "lcm";
    case Model::Gcm:
      return "gcm";
    case Model::Me:
      return "me";
  }
  return "unknown";
}

Model parse_model(std::string_view tag) {
  if (tag == "lcm") return Model::Lcm;
  if (tag == "gcm") return Model::Gcm;
  if (tag == "me") return Model::Me;
  throw std::invalid_argument("unknown model tag '" + std::string(tag) + "' (expected lcm, gcm or me)");
}

}  // namespace qsync
