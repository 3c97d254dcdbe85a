#include "coevo/model.hpp"

#include <algorithm>
#include <unordered_set>

#include "coevo/error.hpp"

namespace coevo {

namespace {

template <class Pair>
auto find_by_feature(std::vector<Pair>& list, FeatureId feature) {
    return std::lower_bound(list.begin(), list.end(), feature,
                            [](const Pair& p, FeatureId f) { return p.first < f; });
}

template <class Pair>
auto find_by_feature(const std::vector<Pair>& list, FeatureId feature) {
    return std::lower_bound(list.begin(), list.end(), feature,
                            [](const Pair& p, FeatureId f) { return p.first < f; });
}

std::string describe(const Scalar& value) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(v);
            } else {
                return "\"" + v + "\"";
            }
        },
        value);
}

}  // namespace

Model::Model(std::shared_ptr<const MetamodelSet> metamodels)
    : metamodels_(std::move(metamodels)), order_(std::make_unique<OrderCache>()) {
    if (!metamodels_) throw ModelError("model requires a metamodel set");
}

Model::Model(const Model& other)
    : metamodels_(other.metamodels_),
      resources_(other.resources_),
      records_(other.records_),
      by_id_(other.by_id_),
      live_count_(other.live_count_),
      id_counter_(other.id_counter_),
      softened_(other.softened_),
      order_(std::make_unique<OrderCache>()) {
    std::lock_guard lock(other.order_->mutex);
    order_->generation = other.order_->generation;
    order_->rank = other.order_->rank;
    order_->valid.store(other.order_->valid.load());
}

Model& Model::operator=(const Model& other) {
    if (this != &other) {
        Model copy(other);
        *this = std::move(copy);
    }
    return *this;
}

Model::Model(Model&&) noexcept = default;
Model& Model::operator=(Model&&) noexcept = default;
Model::~Model() = default;

// -- record access ------------------------------------------------------------

Model::Record& Model::record(ElementId element) {
    if (!element.valid() || element.index() >= records_.size() || !records_[element.index()].alive) {
        throw ModelError("unknown element #" + std::to_string(element.value));
    }
    return records_[element.index()];
}

const Model::Record& Model::record(ElementId element) const {
    if (!element.valid() || element.index() >= records_.size() || !records_[element.index()].alive) {
        throw ModelError("unknown element #" + std::to_string(element.value));
    }
    return records_[element.index()];
}

const Feature& Model::applicable_feature(const Record& rec, FeatureId feature) const {
    const auto& mm = *metamodels_;
    if (!mm.alive(feature)) throw ModelError("unknown or deleted feature #" + std::to_string(feature.value));
    if (!mm.has_feature(rec.cls, feature)) {
        throw ModelError("feature '" + mm.fqn(feature) + "' is not applicable to element '" + rec.id + "' of class '" +
                         (mm.alive(rec.cls) ? mm.fqn(rec.cls) : std::string("<deleted>")) + "'");
    }
    return mm.feature(feature);
}

Model::SlotValue* Model::slot(Record& rec, FeatureId feature) {
    auto it = find_by_feature(rec.slots, feature);
    if (it == rec.slots.end() || it->first != feature) return nullptr;
    return &it->second;
}

const Model::SlotValue* Model::slot(const Record& rec, FeatureId feature) const {
    auto it = find_by_feature(rec.slots, feature);
    if (it == rec.slots.end() || it->first != feature) return nullptr;
    return &it->second;
}

void Model::erase_slot(Record& rec, FeatureId feature) {
    auto it = find_by_feature(rec.slots, feature);
    if (it != rec.slots.end() && it->first == feature) rec.slots.erase(it);
}

std::string Model::next_id() {
    while (true) {
        auto candidate = "e" + std::to_string(++id_counter_);
        if (!by_id_.contains(candidate)) return candidate;
    }
}

ElementId Model::allocate(ClassifierId cls, std::string id) {
    if (id.empty()) id = next_id();
    if (by_id_.contains(id)) throw ModelError("duplicate element id '" + id + "'");
    ElementId handle(static_cast<std::uint32_t>(records_.size()));
    Record rec;
    rec.alive = true;
    rec.id = id;
    rec.cls = cls;
    records_.push_back(std::move(rec));
    by_id_.emplace(std::move(id), handle);
    ++live_count_;
    invalidate_order();
    return handle;
}

// -- inverse index ------------------------------------------------------------

void Model::index_add(ElementId target, FeatureId feature, ElementId source) {
    auto& incoming = record(target).incoming;
    auto it = find_by_feature(incoming, feature);
    if (it == incoming.end() || it->first != feature) it = incoming.insert(it, {feature, {}});
    it->second.push_back(source);
}

void Model::index_remove(ElementId target, FeatureId feature, ElementId source) {
    auto& incoming = record(target).incoming;
    auto it = find_by_feature(incoming, feature);
    if (it == incoming.end() || it->first != feature) return;
    auto& sources = it->second;
    auto pos = std::find(sources.begin(), sources.end(), source);
    if (pos != sources.end()) sources.erase(pos);
    if (sources.empty()) incoming.erase(it);
}

void Model::invalidate_order() {
    order_->valid.store(false, std::memory_order_release);
}

void Model::traverse(ElementId root, std::vector<ElementId>& out) const {
    const auto& mm = *metamodels_;
    std::vector<ElementId> stack{root};
    std::vector<ElementId> children;
    while (!stack.empty()) {
        auto current = stack.back();
        stack.pop_back();
        out.push_back(current);
        const auto& rec = records_[current.index()];
        children.clear();
        auto collect = [&](FeatureId f) {
            const auto* value = slot(rec, f);
            if (value == nullptr) return;
            const auto* list = std::get_if<std::vector<ElementId>>(value);
            if (list == nullptr) return;
            for (auto child : *list) {
                const auto& crec = records_[child.index()];
                if (crec.container == current && crec.container_feature == f) children.push_back(child);
            }
        };
        std::vector<FeatureId> seen;
        if (mm.alive(rec.cls)) {
            for (auto f : mm.all_features(rec.cls)) {
                collect(f);
                seen.push_back(f);
            }
        }
        // Containment slots of features that are no longer applicable.
        for (const auto& [f, value] : rec.slots) {
            if (std::find(seen.begin(), seen.end(), f) == seen.end()) collect(f);
        }
        stack.insert(stack.end(), children.rbegin(), children.rend());
    }
}

void Model::ensure_order() const {
    auto generation = metamodels_->generation();
    if (order_->valid.load(std::memory_order_acquire) && order_->generation == generation) return;
    std::lock_guard lock(order_->mutex);
    if (order_->valid.load(std::memory_order_acquire) && order_->generation == generation) return;
    auto order = elements();
    order_->rank.assign(records_.size(), 0);
    for (std::size_t i = 0; i < order.size(); ++i) order_->rank[order[i].index()] = static_cast<std::uint32_t>(i);
    order_->generation = generation;
    order_->valid.store(true, std::memory_order_release);
}

std::vector<ElementId> Model::get_inverse(ElementId element, FeatureId feature) const {
    const auto& rec = record(element);
    const auto& mm = *metamodels_;
    if (!mm.alive(feature)) throw ModelError("unknown or deleted feature #" + std::to_string(feature.value));
    if (!mm.feature(feature).is_reference()) {
        throw ModelError("feature '" + mm.fqn(feature) + "' is an attribute; inverse navigation needs a reference");
    }
    auto it = find_by_feature(rec.incoming, feature);
    if (it == rec.incoming.end() || it->first != feature) return {};
    std::vector<ElementId> out = it->second;
    if (out.size() > 1) {
        ensure_order();
        const auto& rank = order_->rank;
        std::sort(out.begin(), out.end(), [&](ElementId a, ElementId b) { return rank[a.index()] < rank[b.index()]; });
    }
    return out;
}

// -- resources ----------------------------------------------------------------

const Resource* Model::find_resource(std::string_view uri) const {
    for (const auto& r : resources_) {
        if (r.uri == uri) return &r;
    }
    return nullptr;
}

const Resource& Model::add_resource(std::string uri) {
    if (const auto* existing = find_resource(uri)) return *existing;
    if (uri.empty()) throw ModelError("resource uri must not be empty");
    resources_.push_back({std::move(uri), {}});
    return resources_.back();
}

// -- elements -----------------------------------------------------------------

ElementId Model::create_element(std::string_view uri, ClassifierId cls) {
    const auto& mm = *metamodels_;
    const auto& c = mm.classifier(cls);
    if (!c.is_class()) throw ModelError("cannot instantiate enumeration '" + mm.fqn(cls) + "'");
    if (c.abstract && !softened_) throw ModelError("cannot instantiate abstract class '" + mm.fqn(cls) + "'");
    add_resource(std::string(uri));
    auto handle = allocate(cls);
    for (std::size_t i = 0; i < resources_.size(); ++i) {
        if (resources_[i].uri == uri) {
            resources_[i].roots.push_back(handle);
            records_[handle.index()].resource = static_cast<std::int32_t>(i);
        }
    }
    return handle;
}

ElementId Model::create_child(ElementId parent, FeatureId containment, ClassifierId cls) {
    const auto& mm = *metamodels_;
    const auto& f = applicable_feature(record(parent), containment);
    if (!f.is_containment()) throw ModelError("feature '" + mm.fqn(containment) + "' is not a containment reference");
    const auto& c = mm.classifier(cls);
    if (!c.is_class()) throw ModelError("cannot instantiate enumeration '" + mm.fqn(cls) + "'");
    if (c.abstract && !softened_) throw ModelError("cannot instantiate abstract class '" + mm.fqn(cls) + "'");
    if (!mm.is_subtype(cls, f.target)) {
        throw ModelError("type mismatch: '" + mm.fqn(cls) + "' is not a '" + mm.fqn(f.target) + "' for feature '" +
                         mm.fqn(containment) + "'");
    }
    auto child = allocate(cls);
    add_reference(parent, containment, child);
    return child;
}

void Model::remove_from_parent(ElementId element) {
    auto& rec = record(element);
    if (rec.container.valid()) {
        auto parent = rec.container;
        auto feature = rec.container_feature;
        auto& prec = record(parent);
        if (auto* value = slot(prec, feature)) {
            auto& list = std::get<std::vector<ElementId>>(*value);
            list.erase(std::remove(list.begin(), list.end(), element), list.end());
            if (list.empty()) erase_slot(prec, feature);
        }
        index_remove(element, feature, parent);
        rec.container = ElementId{};
        rec.container_feature = FeatureId{};
    }
    if (rec.resource >= 0) {
        auto& roots = resources_[static_cast<std::size_t>(rec.resource)].roots;
        roots.erase(std::remove(roots.begin(), roots.end(), element), roots.end());
        rec.resource = -1;
    }
    invalidate_order();
}

void Model::detach(ElementId element) {
    remove_from_parent(element);
}

void Model::move_to_resource(ElementId element, std::string_view uri) {
    remove_from_parent(element);
    add_resource(std::string(uri));
    for (std::size_t i = 0; i < resources_.size(); ++i) {
        if (resources_[i].uri == uri) {
            resources_[i].roots.push_back(element);
            record(element).resource = static_cast<std::int32_t>(i);
        }
    }
}

void Model::retype(ElementId element, ClassifierId cls) {
    const auto& mm = *metamodels_;
    const auto& c = mm.classifier(cls);
    if (!c.is_class()) throw ModelError("cannot instantiate enumeration '" + mm.fqn(cls) + "'");
    if (c.abstract && !softened_) throw ModelError("cannot instantiate abstract class '" + mm.fqn(cls) + "'");
    record(element).cls = cls;
    invalidate_order();
}

void Model::delete_element(ElementId element) {
    auto doomed = subtree(element);
    std::unordered_set<ElementId> in_subtree(doomed.begin(), doomed.end());

    for (auto x : doomed) {
        auto& rec = records_[x.index()];
        // Incoming references from surviving elements.
        for (const auto& [feature, sources] : rec.incoming) {
            for (auto source : sources) {
                if (in_subtree.contains(source)) continue;
                if (rec.container == source && rec.container_feature == feature) continue;
                auto& srec = records_[source.index()];
                if (auto* value = slot(srec, feature)) {
                    auto& list = std::get<std::vector<ElementId>>(*value);
                    list.erase(std::remove(list.begin(), list.end(), x), list.end());
                    if (list.empty()) erase_slot(srec, feature);
                }
            }
        }
        // Outgoing references into the surviving part of the model.
        for (const auto& [feature, value] : rec.slots) {
            const auto* list = std::get_if<std::vector<ElementId>>(&value);
            if (list == nullptr) continue;
            for (auto target : *list) {
                if (!in_subtree.contains(target)) index_remove(target, feature, x);
            }
        }
    }
    remove_from_parent(element);
    for (auto x : doomed) {
        auto& rec = records_[x.index()];
        by_id_.erase(rec.id);
        rec = Record{};
        --live_count_;
    }
    invalidate_order();
}

bool Model::contains(ElementId element) const {
    return element.valid() && element.index() < records_.size() && records_[element.index()].alive;
}

std::optional<ElementId> Model::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

ElementId Model::at(std::string_view id) const {
    if (auto e = find(id)) return *e;
    throw ModelError("unknown element id '" + std::string(id) + "'");
}

const std::string& Model::id_of(ElementId element) const { return record(element).id; }

ClassifierId Model::class_of(ElementId element) const { return record(element).cls; }

std::optional<ElementId> Model::container(ElementId element) const {
    const auto& rec = record(element);
    if (!rec.container.valid()) return std::nullopt;
    return rec.container;
}

std::optional<FeatureId> Model::containing_feature(ElementId element) const {
    const auto& rec = record(element);
    if (!rec.container.valid()) return std::nullopt;
    return rec.container_feature;
}

std::optional<std::string> Model::root_resource(ElementId element) const {
    const auto& rec = record(element);
    if (rec.resource < 0) return std::nullopt;
    return resources_[static_cast<std::size_t>(rec.resource)].uri;
}

bool Model::attached(ElementId element) const {
    auto current = element;
    while (true) {
        const auto& rec = record(current);
        if (rec.resource >= 0) return true;
        if (!rec.container.valid()) return false;
        current = rec.container;
    }
}

std::vector<ElementId> Model::elements() const {
    std::vector<ElementId> out;
    out.reserve(live_count_);
    for (const auto& res : resources_) {
        for (auto root : res.roots) traverse(root, out);
    }
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto& rec = records_[i];
        if (rec.alive && rec.resource < 0 && !rec.container.valid()) {
            traverse(ElementId(static_cast<std::uint32_t>(i)), out);
        }
    }
    return out;
}

std::vector<ElementId> Model::instances_of(ClassifierId cls) const {
    std::vector<ElementId> out;
    const auto& mm = *metamodels_;
    for (auto e : elements()) {
        if (mm.is_subtype(records_[e.index()].cls, cls)) out.push_back(e);
    }
    return out;
}

std::vector<ElementId> Model::subtree(ElementId element) const {
    (void)record(element);
    std::vector<ElementId> out;
    traverse(element, out);
    return out;
}

std::optional<ElementId> Model::get_container_of_type(ElementId element, ClassifierId cls) const {
    const auto& mm = *metamodels_;
    (void)mm.classifier(cls);
    std::optional<ElementId> current = element;
    (void)record(element);
    while (current) {
        if (mm.is_subtype(records_[current->index()].cls, cls)) return current;
        current = container(*current);
    }
    return std::nullopt;
}

// -- slots --------------------------------------------------------------------

void Model::set_attribute(ElementId element, FeatureId feature, Scalar value) {
    auto& rec = record(element);
    const auto& mm = *metamodels_;
    const auto& f = applicable_feature(rec, feature);
    if (!f.is_attribute()) throw ModelError("feature '" + mm.fqn(feature) + "' is a reference, not an attribute");
    bool ok = false;
    switch (f.value_type) {
        case ValueType::String: ok = std::holds_alternative<std::string>(value); break;
        case ValueType::Boolean: ok = std::holds_alternative<bool>(value); break;
        case ValueType::Integer: ok = std::holds_alternative<std::int64_t>(value); break;
        case ValueType::Enumeration: {
            const auto* lit = std::get_if<std::string>(&value);
            const auto& literals = mm.classifier(f.enum_type).literals;
            ok = lit != nullptr && std::find(literals.begin(), literals.end(), *lit) != literals.end();
            break;
        }
    }
    if (!ok) {
        throw ModelError("type mismatch: value " + describe(value) + " does not fit '" + mm.fqn(feature) + "' of type " +
                         (f.value_type == ValueType::Enumeration ? mm.fqn(f.enum_type)
                                                                 : std::string(to_string(f.value_type))));
    }
    if (auto* existing = slot(rec, feature)) {
        *existing = std::move(value);
    } else {
        auto it = find_by_feature(rec.slots, feature);
        rec.slots.insert(it, {feature, SlotValue(std::move(value))});
    }
}

void Model::set_references(ElementId element, FeatureId feature, std::vector<ElementId> targets) {
    const auto& mm = *metamodels_;
    const auto& f = applicable_feature(record(element), feature);
    if (!f.is_reference()) throw ModelError("feature '" + mm.fqn(feature) + "' is an attribute, not a reference");

    std::unordered_set<ElementId> unique;
    for (auto t : targets) {
        const auto& trec = record(t);
        if (!unique.insert(t).second) {
            throw ModelError("duplicate reference to '" + trec.id + "' in '" + mm.fqn(feature) + "'");
        }
        if (!mm.is_subtype(trec.cls, f.target)) {
            throw ModelError("type mismatch: element '" + trec.id + "' is not a '" + mm.fqn(f.target) +
                             "' for feature '" + mm.fqn(feature) + "'");
        }
    }
    if (f.containment) {
        for (std::optional<ElementId> up = element; up; up = container(*up)) {
            if (unique.contains(*up)) {
                throw ModelError("containment cycle: '" + record(*up).id + "' would contain itself");
            }
        }
    }

    std::vector<ElementId> old;
    if (const auto* value = slot(record(element), feature)) old = std::get<std::vector<ElementId>>(*value);
    std::unordered_set<ElementId> old_set(old.begin(), old.end());

    if (f.containment) {
        for (auto t : targets) {
            const auto& trec = record(t);
            if (trec.container == element && trec.container_feature == feature) continue;
            remove_from_parent(t);
        }
        for (auto o : old) {
            if (!unique.contains(o)) {
                auto& orec = record(o);
                orec.container = ElementId{};
                orec.container_feature = FeatureId{};
            }
        }
        for (auto t : targets) {
            auto& trec = record(t);
            trec.container = element;
            trec.container_feature = feature;
        }
        invalidate_order();
    }

    for (auto o : old) {
        if (!unique.contains(o)) index_remove(o, feature, element);
    }
    for (auto t : targets) {
        if (!old_set.contains(t)) index_add(t, feature, element);
    }

    auto& rec = record(element);
    if (targets.empty()) {
        erase_slot(rec, feature);
    } else if (auto* existing = slot(rec, feature)) {
        *existing = std::move(targets);
    } else {
        auto it = find_by_feature(rec.slots, feature);
        rec.slots.insert(it, {feature, SlotValue(std::move(targets))});
    }
}

void Model::add_reference(ElementId element, FeatureId feature, ElementId target) {
    auto refs = references(element, feature);
    if (std::find(refs.begin(), refs.end(), target) != refs.end()) return;
    const auto& mm = *metamodels_;
    const auto& f = applicable_feature(record(element), feature);
    if (!f.is_reference()) throw ModelError("feature '" + mm.fqn(feature) + "' is an attribute, not a reference");
    const auto& trec = record(target);
    if (!mm.is_subtype(trec.cls, f.target)) {
        throw ModelError("type mismatch: element '" + trec.id + "' is not a '" + mm.fqn(f.target) + "' for feature '" +
                         mm.fqn(feature) + "'");
    }
    if (f.containment) {
        for (std::optional<ElementId> up = element; up; up = container(*up)) {
            if (*up == target) throw ModelError("containment cycle: '" + trec.id + "' would contain itself");
        }
        remove_from_parent(target);
        auto& t = record(target);
        t.container = element;
        t.container_feature = feature;
    }
    auto& rec = record(element);
    if (auto* value = slot(rec, feature)) {
        std::get<std::vector<ElementId>>(*value).push_back(target);
    } else {
        auto it = find_by_feature(rec.slots, feature);
        rec.slots.insert(it, {feature, SlotValue(std::vector<ElementId>{target})});
    }
    index_add(target, feature, element);
}

void Model::remove_reference(ElementId element, FeatureId feature, ElementId target) {
    auto refs = references(element, feature);
    if (std::find(refs.begin(), refs.end(), target) == refs.end()) return;
    std::vector<ElementId> next;
    for (auto r : refs) {
        if (r != target) next.push_back(r);
    }
    set_references(element, feature, std::move(next));
}

void Model::unset(ElementId element, FeatureId feature) {
    auto& rec = record(element);
    const auto* value = slot(rec, feature);
    if (value == nullptr) return;
    if (std::holds_alternative<Scalar>(*value)) {
        erase_slot(rec, feature);
        return;
    }
    if (metamodels_->alive(feature) && metamodels_->has_feature(rec.cls, feature)) {
        set_references(element, feature, {});
        return;
    }
    // Slot of a feature that no longer applies: unlink by hand.
    auto list = std::get<std::vector<ElementId>>(*value);
    erase_slot(rec, feature);
    for (auto t : list) {
        auto& trec = record(t);
        if (trec.container == element && trec.container_feature == feature) {
            trec.container = ElementId{};
            trec.container_feature = FeatureId{};
            invalidate_order();
        }
        index_remove(t, feature, element);
    }
}

bool Model::is_set(ElementId element, FeatureId feature) const {
    return slot(record(element), feature) != nullptr;
}

const Scalar* Model::attribute(ElementId element, FeatureId feature) const {
    const auto* value = slot(record(element), feature);
    if (value == nullptr) return nullptr;
    return std::get_if<Scalar>(value);
}

std::span<const ElementId> Model::references(ElementId element, FeatureId feature) const {
    const auto* value = slot(record(element), feature);
    if (value == nullptr) return {};
    if (const auto* list = std::get_if<std::vector<ElementId>>(value)) return *list;
    return {};
}

std::vector<FeatureId> Model::set_features(ElementId element) const {
    std::vector<FeatureId> out;
    for (const auto& [f, value] : record(element).slots) out.push_back(f);
    return out;
}

void Model::drop_inapplicable_slots() {
    const auto& mm = *metamodels_;
    std::vector<std::pair<ElementId, FeatureId>> stale;
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const auto& rec = records_[i];
        if (!rec.alive) continue;
        for (const auto& [f, value] : rec.slots) {
            if (!mm.alive(f) || !mm.has_feature(rec.cls, f)) stale.emplace_back(ElementId(static_cast<std::uint32_t>(i)), f);
        }
    }
    for (auto [element, feature] : stale) {
        if (!contains(element)) continue;
        std::vector<ElementId> children;
        for (auto t : references(element, feature)) {
            const auto& trec = record(t);
            if (trec.container == element && trec.container_feature == feature) children.push_back(t);
        }
        for (auto c : children) {
            if (contains(c)) delete_element(c);
        }
        if (contains(element)) unset(element, feature);
    }
}

Model Model::extract(std::span<const std::string> uris) const {
    Model copy(*this);
    std::unordered_set<ElementId> kept;
    for (const auto& res : resources_) {
        if (std::find(uris.begin(), uris.end(), res.uri) == uris.end()) continue;
        for (auto root : res.roots) {
            for (auto e : subtree(root)) kept.insert(e);
        }
    }
    for (auto e : kept) {
        for (const auto& [f, value] : records_[e.index()].slots) {
            const auto* list = std::get_if<std::vector<ElementId>>(&value);
            if (list == nullptr) continue;
            for (auto t : *list) {
                if (!kept.contains(t)) {
                    throw ModelError("element '" + records_[e.index()].id + "' references '" + records_[t.index()].id +
                                     "' outside the extracted resources");
                }
            }
        }
    }
    for (std::size_t i = 0; i < copy.records_.size(); ++i) {
        ElementId e(static_cast<std::uint32_t>(i));
        if (!copy.contains(e) || kept.contains(e)) continue;
        const auto& rec = copy.records_[i];
        if (rec.container.valid() && copy.contains(rec.container)) continue;  // deleted with its root
        copy.delete_element(e);
    }
    std::vector<Resource> resources;
    for (const auto& res : copy.resources_) {
        if (std::find(uris.begin(), uris.end(), res.uri) != uris.end()) resources.push_back(res);
    }
    copy.resources_ = std::move(resources);
    for (std::size_t r = 0; r < copy.resources_.size(); ++r) {
        for (auto root : copy.resources_[r].roots) copy.records_[root.index()].resource = static_cast<std::int32_t>(r);
    }
    copy.invalidate_order();
    return copy;
}

}  // namespace coevo
