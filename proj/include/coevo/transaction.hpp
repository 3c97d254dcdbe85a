#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "coevo/conformance.hpp"
#include "coevo/metamodel.hpp"
#include "coevo/model.hpp"

namespace coevo {

/// A metamodel set together with the models bound to it. Every model in
/// `models` shares `metamodels`.
struct Workspace {
    std::shared_ptr<MetamodelSet> metamodels;
    std::vector<Model> models;

    explicit Workspace(MetamodelSet set = {});

    /// Binds a model to this workspace's metamodels (by name) and adds it.
    Model& attach(const Model& model);
    /// Copies every model and the metamodel set; the copies share a new set.
    [[nodiscard]] Workspace clone() const;
};

/// Runs `body` with softened conformance and checks full conformance at
/// the boundary. Models must conform on entry. On a violation or an
/// exception from the body, the metamodels and models are restored to
/// their entry state; violations are reported as TransactionError.
void execute_transaction(Workspace& workspace, const std::function<void(Workspace&)>& body);

/// Conformance messages of every model, prefixed with the model index when
/// there is more than one.
[[nodiscard]] std::vector<std::string> conformance_messages(std::span<const Model> models,
                                                           RuleSet suppressed = {});

}  // namespace coevo
