#include "aqs/backends.hpp"

namespace aqs {

std::string ScorerBackend::detokenize(
    const std::vector<std::string>& surfaces) const {
  std::string out;
  for (size_t i = 0; i < surfaces.size(); ++i) {
    if (i > 0) out += ' ';
    out += surfaces[i];
  }
  return out;
}

}  // namespace aqs
