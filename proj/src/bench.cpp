#include "coevo/bench.hpp"

#include <algorithm>
#include <chrono>
#include <random>

namespace coevo {

std::shared_ptr<const MetamodelSet> bench_metamodels() {
    static const auto set = std::make_shared<const MetamodelSet>(load_metamodel(R"({
      "name": "bench",
      "packages": [{"name": "bench", "classifiers": [
        {"kind": "class", "name": "Node", "abstract": false, "super": [], "features": [
          {"kind": "reference", "name": "children", "target": "bench.bench.Node", "containment": true, "lower": 0, "upper": "*"},
          {"kind": "reference", "name": "links", "target": "bench.bench.Node", "containment": false, "lower": 0, "upper": "*"},
          {"kind": "attribute", "name": "label", "type": "string", "lower": 0, "upper": 1}
        ]}
      ]}]
    })"));
    return set;
}

Model bench_model(std::size_t size, std::uint64_t seed) {
    auto mm = bench_metamodels();
    const auto node = mm->resolve_class("bench.bench.Node");
    const auto children = mm->resolve_feature("bench.bench.Node.children");
    const auto links = mm->resolve_feature("bench.bench.Node.links");
    std::mt19937_64 rng(seed);
    Model m(mm);
    if (size == 0) return m;
    std::vector<ElementId> nodes{m.create_element("bench", node)};
    while (nodes.size() < size) nodes.push_back(m.create_child(nodes[rng() % nodes.size()], children, node));
    for (auto n : nodes) {
        auto fanout = rng() % 5;
        for (std::uint64_t i = 0; i < fanout; ++i) {
            auto t = nodes[rng() % nodes.size()];
            if (m.references(n, links).end() == std::find(m.references(n, links).begin(), m.references(n, links).end(), t)) {
                m.add_reference(n, links, t);
            }
        }
    }
    return m;
}

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    auto n = v.size();
    return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

InverseBench bench_inverse(std::size_t model_size, std::size_t queries, std::uint64_t seed) {
    InverseBench report;
    report.model_size = model_size;
    report.queries = queries;
    report.seed = seed;
    if (queries == 0 || model_size == 0) return report;

    auto m = bench_model(model_size, seed);
    const auto links = m.metamodels().resolve_feature("bench.bench.Node.links");
    const auto elements = m.elements();
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<ElementId> forward_q(queries), inverse_q(queries);
    for (std::size_t i = 0; i < queries; ++i) {
        forward_q[i] = elements[rng() % elements.size()];
        inverse_q[i] = elements[rng() % elements.size()];
        report.query_elements.push_back(m.id_of(forward_q[i]));
        report.query_elements.push_back(m.id_of(inverse_q[i]));
    }

    (void)m.get_inverse(elements.front(), links);  // builds the document order once

    using clock = std::chrono::steady_clock;
    std::vector<double> forward(queries), inverse(queries);
    std::size_t sink = 0;
    for (std::size_t i = 0; i < queries; ++i) {
        auto t0 = clock::now();
        auto refs = m.references(forward_q[i], links);
        std::vector<ElementId> copy(refs.begin(), refs.end());
        sink += copy.size();
        auto t1 = clock::now();
        auto inv = m.get_inverse(inverse_q[i], links);
        sink += inv.size();
        auto t2 = clock::now();
        forward[i] = std::chrono::duration<double, std::nano>(t1 - t0).count();
        inverse[i] = std::chrono::duration<double, std::nano>(t2 - t1).count();
    }
    if (sink == static_cast<std::size_t>(-1)) report.seed = 0;
    report.forward_median_ns = median(std::move(forward));
    report.inverse_median_ns = median(std::move(inverse));
    return report;
}

json InverseBench::to_json() const {
    if (queries == 0 || !forward_median_ns) return json::object();
    return {{"modelSize", model_size},
            {"queries", queries},
            {"seed", seed},
            {"forwardMedianNs", *forward_median_ns},
            {"inverseMedianNs", *inverse_median_ns},
            {"ratio", *forward_median_ns > 0 ? *inverse_median_ns / *forward_median_ns : 0.0}};
}

}  // namespace coevo
