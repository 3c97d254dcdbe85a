#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coevo/case.hpp"
#include "coevo/conformance.hpp"
#include "coevo/error.hpp"
#include "coevo/history.hpp"

namespace py = pybind11;
using namespace coevo;

namespace {

std::shared_ptr<const MetamodelSet> metamodels_from(const std::optional<std::vector<std::string>>& texts) {
    if (!texts) return reeng::case_metamodels();
    return std::make_shared<const MetamodelSet>(MetamodelSet::parse(*texts));
}

std::vector<std::string> dump_all(const MetamodelSet& mm) {
    std::vector<std::string> out;
    for (const auto& name : mm.metamodel_names()) out.push_back(mm.dump(name));
    return out;
}

Bindings bindings_from(const py::dict& d) {
    Bindings out;
    for (auto item : d) {
        auto key = py::cast<std::string>(item.first);
        auto value = py::reinterpret_borrow<py::object>(item.second);
        if (py::isinstance<py::bool_>(value)) {
            out.insert_or_assign(key, value.cast<bool>());
        } else if (py::isinstance<py::int_>(value)) {
            out.insert_or_assign(key, value.cast<std::int64_t>());
        } else {
            out.insert_or_assign(key, py::str(value).cast<std::string>());
        }
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Coupled metamodel and model evolution engine";

    auto base = py::register_exception<Error>(m, "CoevoError", PyExc_RuntimeError);
    py::register_exception<ConstraintError>(m, "ConstraintError", base.ptr());
    py::register_exception<TransactionError>(m, "TransactionError", base.ptr());
    py::register_exception<BindingError>(m, "BindingError", base.ptr());
    py::register_exception<HistoryError>(m, "HistoryError", base.ptr());

    m.def("case_metamodels", [] { return dump_all(*reeng::case_metamodels()); },
          "Metamodel documents of the case (java, sm).");
    m.def("gen_fixture",
          [](std::size_t states, std::size_t transitions, std::size_t pad, std::uint64_t seed) {
              return dump_model(reeng::gen_fixture(states, transitions, pad, seed));
          },
          py::arg("states") = 3, py::arg("transitions") = 1, py::arg("pad") = 0, py::arg("seed") = 42);
    m.def("case_history", [] { return reeng::build_case_history().dump(); });
    m.def("run_case",
          [](const std::string& program) {
              auto result = reeng::run_case(parse_model(reeng::case_metamodels(), program));
              return py::make_tuple(dump_model(result.statemachine), result.report);
          },
          py::arg("program"), "Returns (statemachine model, report lines).");

    m.def("check_conformance",
          [](const std::string& model, const std::optional<std::vector<std::string>>& metamodels) {
              std::vector<std::string> out;
              for (const auto& v : check_conformance(parse_model(metamodels_from(metamodels), model)))
                  out.push_back(format_violation(v));
              return out;
          },
          py::arg("model"), py::arg("metamodels") = py::none());
    m.def("isomorphic",
          [](const std::string& a, const std::string& b, const std::optional<std::vector<std::string>>& metamodels) {
              auto mm = metamodels_from(metamodels);
              return isomorphic(parse_model(mm, a), parse_model(mm, b));
          },
          py::arg("a"), py::arg("b"), py::arg("metamodels") = py::none());
    m.def("canonical",
          [](const std::string& model, const std::optional<std::vector<std::string>>& metamodels) {
              return canonical_text(parse_model(metamodels_from(metamodels), model));
          },
          py::arg("model"), py::arg("metamodels") = py::none());

    m.def("migrate",
          [](const std::string& history_text, const std::vector<std::string>& models, std::size_t from,
             std::optional<std::size_t> to) {
              auto history = History::parse(history_text);
              auto mm = std::make_shared<const MetamodelSet>(reconstruct_metamodels(history, from));
              std::vector<Model> input;
              for (const auto& t : models) input.push_back(parse_model(mm, t));
              MigrationResult result;
              {
                  py::gil_scoped_release release;
                  result = migrate(input, history, reeng::case_registry(), from, to);
              }
              std::vector<std::string> out;
              for (const auto& model : result.models) out.push_back(dump_model(model));
              return py::make_tuple(out, result.report.lines);
          },
          py::arg("history"), py::arg("models"), py::arg("from_release") = 0, py::arg("to_release") = py::none(),
          "Returns (migrated models, report lines).");

    py::class_<Recorder>(m, "Recorder")
        .def(py::init([](const std::optional<std::vector<std::string>>& metamodels) {
                 return std::make_unique<Recorder>(*metamodels_from(metamodels), &reeng::case_registry());
             }),
             py::arg("metamodels") = py::none())
        .def_static("from_history",
                    [](const std::string& text) {
                        return std::make_unique<Recorder>(History::parse(text), &reeng::case_registry());
                    })
        .def("attach", [](Recorder& r, const std::string& model) {
            r.attach(parse_model(std::make_shared<const MetamodelSet>(r.metamodels()), model));
        })
        .def("models",
             [](const Recorder& r) {
                 std::vector<std::string> out;
                 for (const auto& model : r.models()) out.push_back(dump_model(model));
                 return out;
             })
        .def("metamodels", [](const Recorder& r) { return dump_all(r.metamodels()); })
        .def("apply",
             [](Recorder& r, const std::string& name, const py::dict& bindings) {
                 return r.apply_operation(name, bindings_from(bindings)).label();
             },
             py::arg("name"), py::arg("bindings") = py::dict())
        .def("record_custom",
             [](Recorder& r, const std::string& primitives, std::optional<std::string> migration) {
                 auto doc = parse_json(primitives);
                 if (!doc.is_array()) throw FormatError("primitives must be a JSON array");
                 std::vector<PrimitiveChange> changes;
                 for (const auto& p : doc) changes.push_back(PrimitiveChange::from_json(p));
                 return r.record_custom(std::move(changes), std::move(migration)).label();
             },
             py::arg("primitives") = "[]", py::arg("migration") = py::none())
        .def("release", &Recorder::release, py::arg("force") = false)
        .def("history", [](const Recorder& r) { return r.history().dump(); })
        .def("report", [](const Recorder& r) { return r.last_report().lines; })
        .def("offers",
             [](const Recorder& r, const std::vector<std::string>& selection) {
                 py::list out;
                 for (const auto& offer : offer_operations(r.catalog(), r.metamodels(), r.models(), selection)) {
                     py::dict d;
                     d["name"] = offer.operation->name();
                     d["prefilled"] = dump_json(bindings_to_json(offer.prefilled));
                     d["applicable"] = offer.applicable;
                     d["messages"] = offer.messages;
                     out.append(d);
                 }
                 return out;
             },
             py::arg("selection") = std::vector<std::string>{});
}
