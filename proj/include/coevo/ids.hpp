#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>

namespace coevo {

namespace detail {

template <class Tag>
struct StrongIndex {
    static constexpr std::uint32_t kInvalid = std::numeric_limits<std::uint32_t>::max();

    std::uint32_t value{kInvalid};

    constexpr StrongIndex() = default;
    constexpr explicit StrongIndex(std::uint32_t v) : value(v) {}

    [[nodiscard]] constexpr bool valid() const { return value != kInvalid; }
    [[nodiscard]] constexpr std::size_t index() const { return value; }

    friend constexpr auto operator<=>(StrongIndex, StrongIndex) = default;
};

}  // namespace detail

/// Handle of a classifier (class or enumeration) inside a MetamodelSet.
using ClassifierId = detail::StrongIndex<struct ClassifierTag>;
/// Handle of a structural feature inside a MetamodelSet.
using FeatureId = detail::StrongIndex<struct FeatureTag>;
/// Handle of an element inside one Model. The persisted identity is the
/// element's string id; handles are never reused within a model.
using ElementId = detail::StrongIndex<struct ElementTag>;

/// Upper bound value meaning "unbounded" ("*" in the file formats).
inline constexpr std::int64_t kUnbounded = -1;

}  // namespace coevo

template <class Tag>
struct std::hash<coevo::detail::StrongIndex<Tag>> {
    std::size_t operator()(coevo::detail::StrongIndex<Tag> id) const noexcept {
        return std::hash<std::uint32_t>{}(id.value);
    }
};
