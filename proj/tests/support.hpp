#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "coevo/model.hpp"

namespace coevo::testkit {

std::string fixture_path(const std::string& name);
std::string read_text(const std::string& path);

/// g.g: abstract Node{label, links 0..* Node, children cont 0..* Node},
/// Leaf <: Node, Box <: Node{first 0..1 Leaf, parts cont 0..* Leaf},
/// Tag{owner 0..1 Box, refs 0..* Node}.
std::shared_ptr<const MetamodelSet> graph_metamodels();
/// Random resources, containment, cross references, deletions and moves;
/// at most max_elements live elements, some of them detached.
Model random_graph_model(std::mt19937_64& rng, std::size_t max_elements);

/// {x | e in x.slots[f]} by scanning every element in document order.
std::vector<ElementId> brute_force_inverse(const Model& model, ElementId element, FeatureId feature);
/// Checks every (element, reference) pair; returns the first mismatch or "".
std::string inverse_mismatch(const Model& model);

/// shop.shop: enum Color{Red, Green, Blue}, Store{items cont 0..* Item},
/// Item{name 1..1, next 0..1 Item, color Color 1..1}.
std::shared_ptr<const MetamodelSet> shop_metamodels();
Model random_shop_model(std::mt19937_64& rng, std::size_t max_items);

/// Serialized metamodels and models; equal iff bit-identical state.
std::string workspace_image(const MetamodelSet& metamodels, const std::vector<Model>& models);

}  // namespace coevo::testkit
