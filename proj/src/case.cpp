#include "coevo/case.hpp"

#include <cstdio>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "coevo/error.hpp"

namespace coevo::reeng {

std::shared_ptr<const MetamodelSet> case_metamodels() {
    static const auto set = [] {
        std::vector<std::string> texts{java_metamodel_text(), sm_metamodel_text()};
        return std::make_shared<const MetamodelSet>(MetamodelSet::parse(texts));
    }();
    return set;
}

namespace {

const std::string* string_slot(const Model& m, ElementId e, FeatureId f) {
    const auto* v = m.attribute(e, f);
    return v != nullptr ? std::get_if<std::string>(v) : nullptr;
}

std::optional<ElementId> single(const Model& m, ElementId e, FeatureId f) {
    auto refs = m.references(e, f);
    if (refs.empty()) return std::nullopt;
    return refs.front();
}

ElementId machine_of(const Model& m) {
    const auto* res = m.find_resource("statemachine");
    if (res == nullptr || res->roots.empty()) throw MigrationError("resource 'statemachine' has no state machine");
    return res->roots.front();
}

std::string millis(double ms) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", ms);
    return buf;
}

void extract_states(MigrationContext& ctx) {
    auto& m = ctx.model();
    const auto& mm = ctx.metamodels();
    const auto java_class = ctx.resolve_class("java.java.Class");
    const auto class_name = ctx.resolve_feature("java.java.Class.name");
    const auto class_abstract = ctx.resolve_feature("java.java.Class.abstract");
    const auto super_class = ctx.resolve_feature("java.java.Class.superClass");
    const auto machine_cls = ctx.resolve_class("sm.sm.StateMachine");
    const auto states = ctx.resolve_feature("sm.sm.StateMachine.states");
    const auto state_cls = ctx.resolve_class("sm.sm.State");
    const auto state_name = ctx.resolve_feature("sm.sm.State.name");
    const auto trace = ctx.resolve_feature("sm.sm.State.class");

    auto is_abstract = [&](ElementId c) {
        const auto* v = m.attribute(c, class_abstract);
        return v != nullptr && std::get<bool>(*v);
    };

    std::optional<ElementId> base;
    for (auto e : m.elements()) {
        if (!mm.is_subtype(m.class_of(e), java_class)) continue;
        const auto* name = string_slot(m, e, class_name);
        if (name == nullptr || *name != "State" || !is_abstract(e)) continue;
        if (base) throw MigrationError("more than one abstract class is named 'State'");
        base = e;
    }
    if (!base) throw MigrationError("no abstract class named 'State'");
    if (m.find_resource("statemachine")) throw MigrationError("resource 'statemachine' already exists");

    // Pre-order walk down the inheritance tree, children in document order.
    std::vector<ElementId> concrete;
    std::unordered_set<ElementId> seen{*base};
    std::vector<ElementId> stack{*base};
    while (!stack.empty()) {
        auto c = stack.back();
        stack.pop_back();
        if (c != *base && !is_abstract(c)) concrete.push_back(c);
        auto subs = m.get_inverse(c, super_class);
        for (auto it = subs.rbegin(); it != subs.rend(); ++it) {
            if (seen.insert(*it).second) stack.push_back(*it);
        }
    }

    auto machine = m.create_element("statemachine", machine_cls);
    for (auto c : concrete) {
        auto s = m.create_child(machine, states, state_cls);
        m.set_attribute(s, state_name, *string_slot(m, c, class_name));
        m.set_references(s, trace, {c});
    }
}

void extract_transitions(MigrationContext& ctx) {
    auto& m = ctx.model();
    const auto java_class = ctx.resolve_class("java.java.Class");
    const auto call_cls = ctx.resolve_class("java.java.MethodCall");
    const auto method_name = ctx.resolve_feature("java.java.MethodCall.methodName");
    const auto ref_target = ctx.resolve_feature("java.java.ElementReference.target");
    const auto states = ctx.resolve_feature("sm.sm.StateMachine.states");
    const auto transitions = ctx.resolve_feature("sm.sm.StateMachine.transitions");
    const auto state_trace = ctx.resolve_feature("sm.sm.State.class");
    const auto transition_cls = ctx.resolve_class("sm.sm.Transition");
    const auto source = ctx.resolve_feature("sm.sm.Transition.source");
    const auto target = ctx.resolve_feature("sm.sm.Transition.target");
    const auto ref_trace = ctx.resolve_feature("sm.sm.Transition.reference");

    const auto machine = machine_of(m);
    const auto state_list = std::vector<ElementId>(m.references(machine, states).begin(), m.references(machine, states).end());
    std::unordered_map<ElementId, ElementId> state_of_class;
    for (auto s : state_list) {
        if (auto c = single(m, s, state_trace)) state_of_class.emplace(*c, s);
    }

    struct Found {
        ElementId from, to, reference;
    };
    std::vector<Found> found;
    for (auto s_t : state_list) {
        auto c_t = single(m, s_t, state_trace);
        if (!c_t) continue;
        for (auto r : m.get_inverse(*c_t, ref_target)) {
            auto call = m.get_container_of_type(r, call_cls);
            if (!call) continue;
            const auto* name = string_slot(m, *call, method_name);
            if (name == nullptr || *name != "activate") continue;
            auto c_s = m.get_container_of_type(r, java_class);
            if (!c_s) continue;
            auto s_s = state_of_class.find(*c_s);
            if (s_s == state_of_class.end()) continue;
            found.push_back({s_s->second, s_t, r});
        }
    }

    for (const auto& f : found) {
        auto t = m.create_child(machine, transitions, transition_cls);
        m.set_references(t, source, {f.from});
        m.set_references(t, target, {f.to});
        m.set_references(t, ref_trace, {f.reference});
    }
}

// First call named `name` among `roots` and their descendants (document
// order) that has a string literal argument; returns that literal.
std::optional<std::string> first_call_literal(const Model& m, std::span<const ElementId> roots,
                                              const std::string& name) {
    const auto& mm = m.metamodels();
    const auto call_cls = mm.resolve_class("java.java.MethodCall");
    const auto method_name = mm.resolve_feature("java.java.MethodCall.methodName");
    const auto arguments = mm.resolve_feature("java.java.MethodCall.arguments");
    const auto literal_cls = mm.resolve_class("java.java.StringLiteral");
    const auto literal_value = mm.resolve_feature("java.java.StringLiteral.value");
    for (auto root : roots) {
        for (auto x : m.subtree(root)) {
            if (!mm.is_subtype(m.class_of(x), call_cls)) continue;
            const auto* n = string_slot(m, x, method_name);
            if (n == nullptr || *n != name) continue;
            for (auto a : m.references(x, arguments)) {
                if (!mm.is_subtype(m.class_of(a), literal_cls)) continue;
                if (const auto* v = string_slot(m, a, literal_value)) return *v;
            }
        }
    }
    return std::nullopt;
}

template <class Scope>
void annotate_transitions(MigrationContext& ctx, const char* attribute, Scope scope_of) {
    auto& m = ctx.model();
    const auto transitions = ctx.resolve_feature("sm.sm.StateMachine.transitions");
    const auto ref_trace = ctx.resolve_feature("sm.sm.Transition.reference");
    const auto slot = ctx.resolve_feature(std::string("sm.sm.Transition.") + attribute);
    const auto machine = machine_of(m);
    std::vector<std::pair<ElementId, std::string>> values;
    for (auto t : m.references(machine, transitions)) {
        auto r = single(m, t, ref_trace);
        if (!r) continue;
        if (auto v = scope_of(*r)) values.emplace_back(t, std::move(*v));
    }
    for (auto& [t, v] : values) m.set_attribute(t, slot, std::move(v));
}

void extract_triggers(MigrationContext& ctx) {
    const auto& m = ctx.model();
    const auto if_cls = ctx.resolve_class("java.java.IfStatement");
    const auto condition = ctx.resolve_feature("java.java.IfStatement.condition");
    annotate_transitions(ctx, "trigger", [&](ElementId r) -> std::optional<std::string> {
        auto guard = m.get_container_of_type(r, if_cls);
        if (!guard) return std::nullopt;
        return first_call_literal(m, m.references(*guard, condition), "equals");
    });
}

void extract_actions(MigrationContext& ctx) {
    const auto& m = ctx.model();
    const auto if_cls = ctx.resolve_class("java.java.IfStatement");
    const auto method_cls = ctx.resolve_class("java.java.Method");
    annotate_transitions(ctx, "action", [&](ElementId r) -> std::optional<std::string> {
        auto scope = m.get_container_of_type(r, if_cls);
        if (!scope) scope = m.get_container_of_type(r, method_cls);
        if (!scope) return std::nullopt;
        ElementId root = *scope;
        return first_call_literal(m, std::span<const ElementId>(&root, 1), "send");
    });
}

void print_time(MigrationContext& ctx) {
    if (ctx.model_index() != 0) return;
    for (const auto& s : ctx.run().steps) ctx.report("step " + s.step + " " + millis(s.millis));
    ctx.report("total " + millis(ctx.run().elapsed_millis()));
}

}  // namespace

const MigrationRegistry& case_registry() {
    static const MigrationRegistry registry = [] {
        MigrationRegistry r;
        r.add("ExtractStates", extract_states);
        r.add("ExtractTransitions", extract_transitions);
        r.add("ExtractTriggers", extract_triggers);
        r.add("ExtractActions", extract_actions);
        r.add("PrintTime", print_time);
        return r;
    }();
    return registry;
}

History build_case_history() {
    Recorder rec(*case_metamodels(), &case_registry());
    rec.apply_operation("createReference", {{"class", std::string("sm.sm.State")},
                                            {"name", std::string("class")},
                                            {"target", std::string("java.java.Class")},
                                            {"containment", false},
                                            {"lower", std::int64_t{0}},
                                            {"upper", std::int64_t{1}}});
    rec.record_custom({}, "ExtractStates");
    rec.apply_operation("createReference", {{"class", std::string("sm.sm.Transition")},
                                            {"name", std::string("reference")},
                                            {"target", std::string("java.java.ElementReference")},
                                            {"containment", false},
                                            {"lower", std::int64_t{0}},
                                            {"upper", std::int64_t{1}}});
    rec.record_custom({}, "ExtractTransitions");
    rec.record_custom({}, "ExtractTriggers");
    rec.record_custom({}, "ExtractActions");
    rec.record_custom({}, "PrintTime");
    rec.apply_operation("deleteFeature", {{"feature", std::string("sm.sm.State.class")}});
    rec.apply_operation("deleteFeature", {{"feature", std::string("sm.sm.Transition.reference")}});
    rec.release();
    return rec.history();
}

CaseResult run_case(const Model& program) {
    static const History history = build_case_history();
    std::vector<Model> input{program};
    auto result = migrate(input, history, case_registry());
    std::vector<std::string> uris{"statemachine"};
    auto machine = result.models.front().extract(uris);
    return {rebind(machine, case_metamodels()), std::move(result.report.lines)};
}

// -- program models -----------------------------------------------------------

JavaBuilder::JavaBuilder(std::shared_ptr<const MetamodelSet> metamodels, const std::string& uri)
    : model_(std::move(metamodels)) {
    const auto& mm = model_.metamodels();
    class_ = mm.resolve_class("java.java.Class");
    method_ = mm.resolve_class("java.java.Method");
    expr_stmt_ = mm.resolve_class("java.java.ExpressionStatement");
    if_ = mm.resolve_class("java.java.IfStatement");
    call_ = mm.resolve_class("java.java.MethodCall");
    ref_ = mm.resolve_class("java.java.ElementReference");
    literal_ = mm.resolve_class("java.java.StringLiteral");
    classes_ = mm.resolve_feature("java.java.Model.classes");
    class_name_ = mm.resolve_feature("java.java.Class.name");
    class_abstract_ = mm.resolve_feature("java.java.Class.abstract");
    super_ = mm.resolve_feature("java.java.Class.superClass");
    methods_ = mm.resolve_feature("java.java.Class.methods");
    method_name_ = mm.resolve_feature("java.java.Method.name");
    method_statements_ = mm.resolve_feature("java.java.Method.statements");
    expression_ = mm.resolve_feature("java.java.ExpressionStatement.expression");
    condition_ = mm.resolve_feature("java.java.IfStatement.condition");
    if_then_ = mm.resolve_feature("java.java.IfStatement.then");
    if_else_ = mm.resolve_feature("java.java.IfStatement.else");
    method_name_attr_ = mm.resolve_feature("java.java.MethodCall.methodName");
    arguments_ = mm.resolve_feature("java.java.MethodCall.arguments");
    ref_target_ = mm.resolve_feature("java.java.ElementReference.target");
    literal_value_ = mm.resolve_feature("java.java.StringLiteral.value");
    root_ = model_.create_element(uri, mm.resolve_class("java.java.Model"));
}

ElementId JavaBuilder::add_class(const std::string& name, bool is_abstract) {
    auto c = model_.create_child(root_, classes_, class_);
    model_.set_attribute(c, class_name_, name);
    model_.set_attribute(c, class_abstract_, is_abstract);
    return c;
}

void JavaBuilder::set_super(ElementId cls, ElementId super) { model_.set_references(cls, super_, {super}); }

ElementId JavaBuilder::add_method(ElementId cls, const std::string& name) {
    auto m = model_.create_child(cls, methods_, method_);
    model_.set_attribute(m, method_name_, name);
    return m;
}

ElementId JavaBuilder::call_statement(Block block, const std::string& name) {
    auto stmt = model_.create_child(block.owner, block.feature, expr_stmt_);
    auto call = model_.create_child(stmt, expression_, call_);
    model_.set_attribute(call, method_name_attr_, name);
    return call;
}

ElementId JavaBuilder::if_statement(Block block, const std::optional<std::string>& equals_literal) {
    auto stmt = model_.create_child(block.owner, block.feature, if_);
    auto call = model_.create_child(stmt, condition_, call_);
    model_.set_attribute(call, method_name_attr_, std::string(equals_literal ? "equals" : "check"));
    if (equals_literal) string_argument(call, *equals_literal);
    return stmt;
}

ElementId JavaBuilder::condition(ElementId if_stmt) const { return model_.references(if_stmt, condition_).front(); }

ElementId JavaBuilder::call_argument(ElementId call, const std::string& name) {
    auto inner = model_.create_child(call, arguments_, call_);
    model_.set_attribute(inner, method_name_attr_, name);
    return inner;
}

ElementId JavaBuilder::string_argument(ElementId call, const std::string& value) {
    auto lit = model_.create_child(call, arguments_, literal_);
    model_.set_attribute(lit, literal_value_, value);
    return lit;
}

ElementId JavaBuilder::reference_argument(ElementId call, ElementId cls) {
    auto ref = model_.create_child(call, arguments_, ref_);
    model_.set_references(ref, ref_target_, {cls});
    return ref;
}

std::vector<std::string> state_names(std::size_t states) {
    std::vector<std::string> names;
    if (states == 0) return names;
    names.emplace_back("Idle");
    if (states == 1) return names;
    if (states == 3) {
        names.emplace_back("Active");
    } else {
        for (std::size_t i = 1; i + 1 < states; ++i) names.push_back("Active" + std::to_string(i));
    }
    names.emplace_back("Done");
    return names;
}

namespace {

struct Pattern {
    std::string trigger;
    std::string action;
};

Pattern transition_pattern(std::size_t from, std::size_t to, std::size_t j, std::size_t states) {
    Pattern p;
    if (from == 0) {
        p = {"start", "started"};
    } else if (to + 1 == states) {
        p = {"stop", "stopped"};
    } else {
        p = {"step" + std::to_string(from), "stepped" + std::to_string(from)};
    }
    if (j > 0) {
        p.trigger += std::to_string(j);
        p.action += std::to_string(j);
    }
    return p;
}

}  // namespace

Model gen_fixture(std::size_t states, std::size_t transitions_per_state, std::size_t pad_classes, std::uint64_t seed) {
    if (states == 0) throw Error("gen_fixture needs at least one state");
    std::mt19937_64 rng(seed);
    auto pick = [&](std::size_t bound) { return static_cast<std::size_t>(rng() % bound); };

    // Slot 0 is the base class; 1..states the states; pads after that.
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i <= states; ++i) order.push_back(i);
    for (std::size_t p = 0; p < pad_classes; ++p) {
        auto pos = 1 + pick(order.size());
        order.insert(order.begin() + static_cast<std::ptrdiff_t>(pos), states + 1 + p);
    }

    const auto names = state_names(states);
    JavaBuilder b;
    std::vector<ElementId> cls(states + 1 + pad_classes);
    for (auto slot : order) {
        if (slot == 0) {
            cls[slot] = b.add_class("State", true);
        } else if (slot <= states) {
            cls[slot] = b.add_class(names[slot - 1]);
        } else {
            cls[slot] = b.add_class("Pad" + std::to_string(slot - states - 1));
        }
    }
    const auto base = cls[0];
    b.add_method(base, "handle");

    for (std::size_t i = 0; i < states; ++i) {
        auto c = cls[i + 1];
        b.set_super(c, base);
        auto method = b.add_method(c, "handle");
        for (std::size_t j = 0; j < transitions_per_state; ++j) {
            auto to = i + 1 + j;
            if (to >= states) break;
            auto pattern = transition_pattern(i, to, j, states);
            auto guard = b.if_statement(b.body(method), pattern.trigger);
            b.string_argument(b.call_statement(b.then_of(guard), "send"), pattern.action);
            b.reference_argument(b.call_statement(b.then_of(guard), "activate"), cls[to + 1]);
        }
    }

    for (std::size_t p = 0; p < pad_classes; ++p) {
        auto c = cls[states + 1 + p];
        if (p > 0 && pick(3) == 0) b.set_super(c, cls[states + 1 + pick(p)]);
        auto method = b.add_method(c, "run");
        auto statements = 1 + pick(3);
        for (std::size_t s = 0; s < statements; ++s) {
            auto any = cls[pick(cls.size())];
            switch (pick(3)) {
                case 0: {
                    auto log = b.call_statement(b.body(method), "log");
                    b.string_argument(log, "pad");
                    b.reference_argument(log, any);
                    break;
                }
                case 1: {
                    auto guard = b.if_statement(b.body(method), "noise" + std::to_string(p));
                    b.string_argument(b.call_statement(b.then_of(guard), "send"), "noise");
                    b.reference_argument(b.call_statement(b.else_of(guard), "log"), any);
                    break;
                }
                default: {
                    auto print = b.call_statement(b.body(method), "print");
                    b.reference_argument(b.call_argument(print, "toString"), any);
                    break;
                }
            }
        }
    }
    return std::move(b.model());
}

}  // namespace coevo::reeng
