#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "coevo/ids.hpp"
#include "coevo/metamodel.hpp"

namespace coevo {

/// Attribute value. Enumeration values are stored as their literal name.
using Scalar = std::variant<bool, std::int64_t, std::string>;

struct Resource {
    std::string uri;
    std::vector<ElementId> roots;
};

/// A set of resources holding typed elements with attribute slots and
/// ordered reference slots. Containment forms a forest whose roots are the
/// resource roots; detached subtrees are allowed transiently and reported
/// by the conformance check.
///
/// Every slot mutation keeps an inverse index up to date, so
/// get_inverse() answers in time proportional to the result once the
/// document order is known. Document order is depth-first containment
/// traversal of the resources in declaration order (features in
/// all_features() order), followed by detached subtrees in creation order.
///
/// Reference slots never hold duplicates; an empty reference slot and an
/// absent one are the same thing.
///
/// Single writer. Const member functions may be called concurrently on a
/// model that is not being mutated.
class Model {
public:
    explicit Model(std::shared_ptr<const MetamodelSet> metamodels);

    Model(const Model& other);
    Model& operator=(const Model& other);
    Model(Model&&) noexcept;
    Model& operator=(Model&&) noexcept;
    ~Model();

    [[nodiscard]] const MetamodelSet& metamodels() const { return *metamodels_; }
    [[nodiscard]] const std::shared_ptr<const MetamodelSet>& metamodels_ptr() const { return metamodels_; }

    // -- resources ---------------------------------------------------------

    [[nodiscard]] std::span<const Resource> resources() const { return resources_; }
    [[nodiscard]] const Resource* find_resource(std::string_view uri) const;
    /// Adds an empty resource; returns the existing one if the uri is taken.
    const Resource& add_resource(std::string uri);

    // -- elements ----------------------------------------------------------

    /// New root of the resource (created when missing). Abstract classes
    /// are rejected unless instantiation rules are softened.
    ElementId create_element(std::string_view uri, ClassifierId cls);
    /// New element appended to a containment slot of the parent.
    ElementId create_child(ElementId parent, FeatureId containment, ClassifierId cls);
    /// Removes the element and its containment subtree. Incoming
    /// references from surviving elements are removed from their slots.
    void delete_element(ElementId element);
    /// Removes the element from its container or resource without deleting it.
    void detach(ElementId element);
    /// Detaches the element and appends it to the roots of a resource.
    void move_to_resource(ElementId element, std::string_view uri);
    /// Changes the class of an element, keeping its slots.
    void retype(ElementId element, ClassifierId cls);

    [[nodiscard]] bool contains(ElementId element) const;
    [[nodiscard]] std::optional<ElementId> find(std::string_view id) const;
    [[nodiscard]] ElementId at(std::string_view id) const;
    [[nodiscard]] const std::string& id_of(ElementId element) const;
    [[nodiscard]] ClassifierId class_of(ElementId element) const;
    [[nodiscard]] std::optional<ElementId> container(ElementId element) const;
    [[nodiscard]] std::optional<FeatureId> containing_feature(ElementId element) const;
    /// Resource uri whose root is the element, if any.
    [[nodiscard]] std::optional<std::string> root_resource(ElementId element) const;
    /// True when the element hangs (transitively) below a resource root.
    [[nodiscard]] bool attached(ElementId element) const;
    [[nodiscard]] std::size_t size() const { return live_count_; }

    /// Live elements in document order.
    [[nodiscard]] std::vector<ElementId> elements() const;
    /// Live elements whose class equals or specializes cls, document order.
    [[nodiscard]] std::vector<ElementId> instances_of(ClassifierId cls) const;
    /// The element and its containment descendants, document order.
    [[nodiscard]] std::vector<ElementId> subtree(ElementId element) const;
    /// Nearest of the element itself and its containers whose class equals
    /// or specializes cls.
    [[nodiscard]] std::optional<ElementId> get_container_of_type(ElementId element, ClassifierId cls) const;

    // -- slots -------------------------------------------------------------

    void set_attribute(ElementId element, FeatureId feature, Scalar value);
    /// Replaces the list. For containment features the children are moved
    /// out of their previous container or resource.
    void set_references(ElementId element, FeatureId feature, std::vector<ElementId> targets);
    void add_reference(ElementId element, FeatureId feature, ElementId target);
    void remove_reference(ElementId element, FeatureId feature, ElementId target);
    /// Clears the slot. Children of a cleared containment slot are detached.
    void unset(ElementId element, FeatureId feature);

    [[nodiscard]] bool is_set(ElementId element, FeatureId feature) const;
    [[nodiscard]] const Scalar* attribute(ElementId element, FeatureId feature) const;
    [[nodiscard]] std::span<const ElementId> references(ElementId element, FeatureId feature) const;
    /// All set slots, in feature-id order; may include features that are no
    /// longer applicable after a metamodel change.
    [[nodiscard]] std::vector<FeatureId> set_features(ElementId element) const;

    /// Elements whose `feature` slot contains `element`, document order.
    [[nodiscard]] std::vector<ElementId> get_inverse(ElementId element, FeatureId feature) const;

    // -- transactions ------------------------------------------------------

    /// While softened, abstract classes may be instantiated.
    void set_softened(bool softened) { softened_ = softened; }
    [[nodiscard]] bool softened() const { return softened_; }

    /// Removes slots of deleted or no longer applicable features. Orphaned
    /// containment children are deleted.
    void drop_inapplicable_slots();

    /// Keeps only the given resources (and the elements below them). Throws
    /// ModelError if a kept element references a dropped one.
    [[nodiscard]] Model extract(std::span<const std::string> uris) const;

private:
    using SlotValue = std::variant<Scalar, std::vector<ElementId>>;
    using Slot = std::pair<FeatureId, SlotValue>;
    using Incoming = std::pair<FeatureId, std::vector<ElementId>>;

    struct Record {
        bool alive{false};
        std::string id;
        ClassifierId cls;
        ElementId container;
        FeatureId container_feature;
        std::int32_t resource{-1};
        std::vector<Slot> slots;  // sorted by feature id
        std::vector<Incoming> incoming;  // sorted by feature id
    };

    struct OrderCache {
        mutable std::mutex mutex;
        mutable std::atomic<bool> valid{false};
        mutable std::uint64_t generation{0};
        mutable std::vector<std::uint32_t> rank;  // by handle
    };

    Record& record(ElementId element);
    const Record& record(ElementId element) const;
    const Feature& applicable_feature(const Record& rec, FeatureId feature) const;
    ElementId allocate(ClassifierId cls, std::string id = {});
    std::string next_id();

    SlotValue* slot(Record& rec, FeatureId feature);
    const SlotValue* slot(const Record& rec, FeatureId feature) const;
    void erase_slot(Record& rec, FeatureId feature);

    void index_add(ElementId target, FeatureId feature, ElementId source);
    void index_remove(ElementId target, FeatureId feature, ElementId source);
    void remove_from_parent(ElementId element);
    void invalidate_order();
    void ensure_order() const;
    void traverse(ElementId root, std::vector<ElementId>& out) const;

    std::shared_ptr<const MetamodelSet> metamodels_;
    std::vector<Resource> resources_;
    std::vector<Record> records_;
    std::unordered_map<std::string, ElementId> by_id_;
    std::size_t live_count_{0};
    std::uint64_t id_counter_{0};
    bool softened_{false};
    std::unique_ptr<OrderCache> order_;

    friend Model load_model(std::shared_ptr<const MetamodelSet>, const json&);
};

// -- serialization ------------------------------------------------------------

/// `{resources:[{uri, roots}], elements:[{id, class, slots}]}`; elements in
/// document order, object keys sorted.
[[nodiscard]] json save_model(const Model& model);
[[nodiscard]] std::string dump_model(const Model& model);
[[nodiscard]] Model load_model(std::shared_ptr<const MetamodelSet> metamodels, const json& document);
[[nodiscard]] Model parse_model(std::shared_ptr<const MetamodelSet> metamodels, const std::string& text);

/// The model document with element ids replaced by their document-order
/// position. Two models are isomorphic iff their canonical forms are equal.
[[nodiscard]] json canonical_form(const Model& model);
[[nodiscard]] std::string canonical_text(const Model& model);
[[nodiscard]] bool isomorphic(const Model& a, const Model& b);
/// Human readable description of the first difference between the
/// canonical forms, or nullopt when isomorphic.
[[nodiscard]] std::optional<std::string> first_difference(const Model& a, const Model& b);

/// Re-binds a model to another metamodel set by name (save + load).
[[nodiscard]] Model rebind(const Model& model, std::shared_ptr<const MetamodelSet> metamodels);

}  // namespace coevo
