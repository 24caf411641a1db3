#pragma once

#include <string_view>

namespace renn {

/// Training-set role of a sample: in-distribution, out-of-distribution, or boundary.
enum class Partition { In, Ood, Bod };

std::string_view to_string(Partition p);
/// Accepts "IN", "OOD", "BOD". Throws FormatError otherwise.
Partition parse_partition(std::string_view text);

}  // namespace renn
