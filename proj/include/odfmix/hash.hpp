#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>

#include "odfmix/quaternion.hpp"

namespace odfmix {

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;

/// 64-bit FNV-1a over raw bytes, continuing from h.
inline std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h = kFnvOffset) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) h = (h ^ p[i]) * 0x100000001b3ULL;
    return h;
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = kFnvOffset) {
    return fnv1a(s.data(), s.size(), h);
}

/// Hash of the bit patterns of the coordinates.
inline std::uint64_t fnv1a(std::span<const Vec4> pts, std::uint64_t h = kFnvOffset) {
    for (const auto& p : pts) h = fnv1a(p.data(), sizeof(double) * 4, h);
    return h;
}

}  // namespace odfmix
