#pragma once

#include <cstddef>
#include <cstdint>

namespace molcert::detail {

extern const std::size_t kSobolDimensions;
/// Primitive polynomial per dimension, including the leading and trailing 1 bits.
extern const std::uint32_t kSobolPoly[];
/// Initial direction integers m_1..m_s of dimension i live at
/// kSobolInit[kSobolInitOffset[i] .. kSobolInitOffset[i + 1]).
extern const std::uint32_t kSobolInitOffset[];
extern const std::uint32_t kSobolInit[];

}  // namespace molcert::detail
