#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coevo/metamodel.hpp"
#include "coevo/model.hpp"

namespace coevo {

/// `bench.bench.Node` with a containment `children` list, a cross
/// reference list `links` and an optional `label`.
[[nodiscard]] std::shared_ptr<const MetamodelSet> bench_metamodels();

/// A random containment tree of `size` nodes with 0..4 links per node.
[[nodiscard]] Model bench_model(std::size_t size, std::uint64_t seed);

struct InverseBench {
    std::size_t model_size{0};
    std::size_t queries{0};
    std::uint64_t seed{0};
    /// Ids of the queried elements: forward then inverse target, per query.
    std::vector<std::string> query_elements;
    std::optional<double> forward_median_ns;
    std::optional<double> inverse_median_ns;

    /// Empty object when there were no queries.
    [[nodiscard]] json to_json() const;
};

/// Times `queries` reads of a random element's `links` slot against the
/// same number of get_inverse calls on random elements.
[[nodiscard]] InverseBench bench_inverse(std::size_t model_size, std::size_t queries, std::uint64_t seed);

}  // namespace coevo
