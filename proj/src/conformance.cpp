#include "coevo/conformance.hpp"

#include <algorithm>

namespace coevo {

namespace {

bool scalar_fits(const MetamodelSet& mm, const Feature& f, const Scalar& value) {
    switch (f.value_type) {
        case ValueType::String: return std::holds_alternative<std::string>(value);
        case ValueType::Boolean: return std::holds_alternative<bool>(value);
        case ValueType::Integer: return std::holds_alternative<std::int64_t>(value);
        case ValueType::Enumeration: {
            const auto* lit = std::get_if<std::string>(&value);
            if (lit == nullptr || !mm.alive(f.enum_type)) return false;
            const auto& literals = mm.classifier(f.enum_type).literals;
            return std::find(literals.begin(), literals.end(), *lit) != literals.end();
        }
    }
    return false;
}

}  // namespace

std::string_view to_string(Rule rule) {
    switch (rule) {
        case Rule::UnknownClass: return "unknown-class";
        case Rule::AbstractInstantiation: return "abstract-instantiation";
        case Rule::MissingSlotType: return "missing-slot-type";
        case Rule::MultiplicityLower: return "multiplicity-lower";
        case Rule::MultiplicityUpper: return "multiplicity-upper";
        case Rule::DanglingReference: return "dangling-reference";
        case Rule::ContainmentViolation: return "containment-violation";
    }
    return "?";
}

RuleSet softened_rules() {
    return {Rule::MultiplicityLower, Rule::DanglingReference, Rule::AbstractInstantiation};
}

std::vector<ConformanceViolation> check_conformance(const Model& model, RuleSet suppressed) {
    const auto& mm = model.metamodels();
    std::vector<ConformanceViolation> out;
    auto report = [&](ElementId e, std::optional<std::string> feature, Rule rule, std::string message) {
        if (suppressed.contains(rule)) return;
        out.push_back({model.id_of(e), std::move(feature), rule, std::move(message)});
    };

    for (auto e : model.elements()) {
        const auto cls = model.class_of(e);
        const auto& id = model.id_of(e);
        if (!mm.alive(cls) || !mm.classifier(cls).is_class()) {
            report(e, std::nullopt, Rule::UnknownClass, "element '" + id + "' is an instance of an unknown class");
            continue;
        }
        const auto class_name = mm.fqn(cls);
        const auto prefix = "element '" + id + "' (" + class_name + ")";
        if (mm.classifier(cls).abstract) {
            report(e, std::nullopt, Rule::AbstractInstantiation, prefix + " instantiates an abstract class");
        }
        if (!model.container(e) && !model.root_resource(e)) {
            report(e, std::nullopt, Rule::ContainmentViolation,
                   prefix + " is neither a resource root nor contained by another element");
        }

        for (auto f : model.set_features(e)) {
            if (!mm.alive(f) || !mm.has_feature(cls, f)) {
                report(e, mm.alive(f) ? std::optional(mm.fqn(f)) : std::nullopt, Rule::MissingSlotType,
                       prefix + " has a slot for " + (mm.alive(f) ? "feature '" + mm.fqn(f) + "'" : std::string("a deleted feature")) +
                           " which its class does not define");
                continue;
            }
            const auto& feature = mm.feature(f);
            const auto fname = mm.fqn(f);
            if (feature.is_attribute()) {
                const auto* value = model.attribute(e, f);
                if (value == nullptr || !scalar_fits(mm, feature, *value)) {
                    report(e, fname, Rule::MissingSlotType, prefix + " holds a value of the wrong type in '" + fname + "'");
                }
                continue;
            }
            if (model.attribute(e, f) != nullptr) {
                report(e, fname, Rule::MissingSlotType, prefix + " holds a scalar in reference '" + fname + "'");
                continue;
            }
            for (auto t : model.references(e, f)) {
                if (!model.contains(t)) {
                    report(e, fname, Rule::DanglingReference, prefix + " references a deleted element through '" + fname + "'");
                    continue;
                }
                if (!mm.is_subtype(model.class_of(t), feature.target)) {
                    report(e, fname, Rule::MissingSlotType,
                           prefix + " references '" + model.id_of(t) + "' which is not a '" + mm.fqn(feature.target) +
                               "' through '" + fname + "'");
                }
                if (!feature.containment && !model.attached(t)) {
                    report(e, fname, Rule::DanglingReference,
                           prefix + " references '" + model.id_of(t) + "' which is not in any resource through '" + fname + "'");
                }
            }
        }

        for (auto f : mm.all_features(cls)) {
            const auto& feature = mm.feature(f);
            std::int64_t count = 0;
            if (feature.is_attribute()) {
                count = model.attribute(e, f) != nullptr ? 1 : 0;
            } else {
                count = static_cast<std::int64_t>(model.references(e, f).size());
            }
            const auto fname = mm.fqn(f);
            if (count < feature.lower) {
                report(e, fname, Rule::MultiplicityLower,
                       prefix + ": '" + fname + "' requires at least " + std::to_string(feature.lower) + " value(s), has " +
                           std::to_string(count));
            }
            if (feature.upper != kUnbounded && count > feature.upper) {
                report(e, fname, Rule::MultiplicityUpper,
                       prefix + ": '" + fname + "' allows at most " + std::to_string(feature.upper) + " value(s), has " +
                           std::to_string(count));
            }
        }
    }
    return out;
}

std::string format_violation(const ConformanceViolation& violation) {
    return "[" + std::string(to_string(violation.rule)) + "] " + violation.message;
}

json violation_to_json(const ConformanceViolation& violation) {
    json out = {{"element", violation.element}, {"rule", to_string(violation.rule)}, {"message", violation.message}};
    out["feature"] = violation.feature ? json(*violation.feature) : json(nullptr);
    return out;
}

}  // namespace coevo
