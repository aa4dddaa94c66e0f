#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "refmargin/boosting.hpp"
#include "refmargin/bounds.hpp"

namespace refmargin {

/// Margin profile on `data` of the normalized length-t prefix, for every t in
/// `stages`. Stages must lie in [1, ensemble.size()].
std::vector<MarginProfile> staged_snapshots(const RawEnsemble& ensemble, const Dataset& data,
                                            std::span<const std::size_t> stages);

}  // namespace refmargin
