#include "coevo/transaction.hpp"

#include "coevo/error.hpp"

namespace coevo {

Workspace::Workspace(MetamodelSet set) : metamodels(std::make_shared<MetamodelSet>(std::move(set))) {}

Model& Workspace::attach(const Model& model) {
    if (model.metamodels_ptr() == metamodels) {
        models.push_back(model);
    } else {
        models.push_back(rebind(model, metamodels));
    }
    return models.back();
}

Workspace Workspace::clone() const {
    Workspace out(*metamodels);
    for (const auto& m : models) out.models.push_back(rebind(m, out.metamodels));
    return out;
}

std::vector<std::string> conformance_messages(std::span<const Model> models, RuleSet suppressed) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < models.size(); ++i) {
        for (const auto& v : check_conformance(models[i], suppressed)) {
            auto text = format_violation(v);
            out.push_back(models.size() > 1 ? "model " + std::to_string(i) + ": " + text : text);
        }
    }
    return out;
}

void execute_transaction(Workspace& workspace, const std::function<void(Workspace&)>& body) {
    if (auto entry = conformance_messages(workspace.models); !entry.empty()) {
        throw TransactionError("models do not conform at transaction entry", std::move(entry));
    }

    // Model copies keep pointing at the shared set, so restoring the set in
    // place is enough to rebind them.
    const MetamodelSet saved_metamodels = *workspace.metamodels;
    const std::vector<Model> saved_models = workspace.models;
    auto restore = [&] {
        *workspace.metamodels = saved_metamodels;
        workspace.models = saved_models;
    };

    try {
        for (auto& m : workspace.models) m.set_softened(true);
        body(workspace);
        workspace.metamodels->validate();
        for (auto& m : workspace.models) {
            m.set_softened(false);
            m.drop_inapplicable_slots();
        }
    } catch (...) {
        restore();
        throw;
    }

    if (auto exit = conformance_messages(workspace.models); !exit.empty()) {
        restore();
        throw TransactionError("conformance violated at transaction boundary; rolled back", std::move(exit));
    }
}

}  // namespace coevo
