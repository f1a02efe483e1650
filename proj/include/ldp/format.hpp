#pragma once

#include <string>

namespace ldp {

// Shortest round-trip decimal; "inf" / "-inf" / "nan" for non-finite values.
std::string fmt(double v);

} // namespace ldp
