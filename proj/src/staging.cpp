#include "refmargin/staging.hpp"

#include <string>

#include "refmargin/ensemble.hpp"
#include "refmargin/error.hpp"

namespace refmargin {

std::vector<MarginProfile> staged_snapshots(const RawEnsemble& ensemble, const Dataset& data,
                                            std::span<const std::size_t> stages) {
  std::vector<MarginProfile> out;
  out.reserve(stages.size());
  for (auto t : stages) {
    if (t < 1 || t > ensemble.size()) {
      throw Error(ErrorCode::StageOutOfRange,
                  "stage " + std::to_string(t) + " outside [1, " + std::to_string(ensemble.size()) + "]");
    }
    out.push_back(margin_profile(normalize(ensemble.prefix(t)), data));
  }
  return out;
}

}  // namespace refmargin
