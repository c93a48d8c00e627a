#pragma once

#include <cstdint>
#include <iosfwd>

#include "revival/propagate.hpp"

namespace revival::cli {

/// Self-contained polyline plot of |A(t)|^2 against t.
void write_trace_svg(std::ostream& out, const AutocorrTrace& trace,
                     std::uint64_t config_hash);

}  // namespace revival::cli
