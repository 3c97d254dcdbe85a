#include "coevo/cli.hpp"

#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "coevo/bench.hpp"
#include "coevo/case.hpp"
#include "coevo/conformance.hpp"
#include "coevo/error.hpp"
#include "coevo/history.hpp"
#include "coevo/service.hpp"

namespace coevo {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) throw Error("cannot write '" + path + "'");
}

Bindings parse_bindings(const std::vector<std::string>& items) {
    Bindings out;
    for (const auto& item : items) {
        auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw BindingError("binding '" + item + "' is not of the form name=value");
        out.insert_or_assign(item.substr(0, eq), item.substr(eq + 1));
    }
    return out;
}

// Where models get their metamodels from: explicit files, the current
// state of a history, or the case metamodels.
struct MetamodelSource {
    std::vector<std::string> files;
    std::string history;

    void add_options(CLI::App* app) {
        app->add_option("--metamodel", files, "metamodel document (repeatable)");
        app->add_option("--history", history, "use the current metamodels of this history");
    }

    [[nodiscard]] std::shared_ptr<const MetamodelSet> load() const {
        if (!history.empty()) {
            auto h = History::parse(read_file(history));
            return std::make_shared<const MetamodelSet>(reconstruct_metamodels(h, h.releases().size()));
        }
        if (files.empty()) return reeng::case_metamodels();
        std::vector<std::string> texts;
        for (const auto& f : files) texts.push_back(read_file(f));
        return std::make_shared<const MetamodelSet>(MetamodelSet::parse(texts));
    }
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Coupled metamodel and model evolution", "coevo"};
    app.require_subcommand(1);
    std::function<void()> action;

    // -- history --------------------------------------------------------------
    auto* history = app.add_subcommand("history", "create, extend, release and replay histories");
    history->require_subcommand(1);

    std::vector<std::string> init_mms;
    std::string init_out;
    auto* init = history->add_subcommand("init", "start a history from metamodels");
    init->add_option("--metamodel", init_mms, "metamodel document (repeatable)")->required();
    init->add_option("-o,--output", init_out, "history file to write")->required();
    init->callback([&] {
        action = [&] {
            std::vector<std::string> texts;
            for (const auto& f : init_mms) texts.push_back(read_file(f));
            auto h = History::create(MetamodelSet::parse(texts));
            write_file(init_out, h.dump());
        };
    });

    std::string hist_file, hist_out;
    bool force = false;
    auto* rel = history->add_subcommand("release", "seal the open release");
    rel->add_option("--history", hist_file, "history file")->required();
    rel->add_option("-o,--output", hist_out, "output file (default: in place)");
    rel->add_flag("--force", force, "release even when empty");
    rel->callback([&] {
        action = [&] {
            auto h = History::parse(read_file(hist_file));
            h.release(force);
            write_file(hist_out.empty() ? hist_file : hist_out, h.dump());
        };
    });

    std::string op_name;
    std::vector<std::string> binds;
    auto apply_action = [&] {
        Recorder rec(History::parse(read_file(hist_file)), &reeng::case_registry());
        const auto& record = rec.apply_operation(op_name, parse_bindings(binds));
        write_file(hist_out.empty() ? hist_file : hist_out, rec.history().dump());
        out << record.label() << "\n";
    };
    auto add_apply = [&](CLI::App* parent) {
        auto* cmd = parent->add_subcommand("apply", "apply a reusable operation and record it");
        cmd->add_option("--history", hist_file, "history file")->required();
        cmd->add_option("--name", op_name, "operation name")->required();
        cmd->add_option("--bind", binds, "parameter binding name=value (repeatable)");
        cmd->add_option("-o,--output", hist_out, "output file (default: in place)");
        cmd->callback([&] { action = apply_action; });
    };
    add_apply(history);

    std::string prim_file, migration_id;
    auto* custom = history->add_subcommand("custom", "record primitive metamodel changes");
    custom->add_option("--history", hist_file, "history file")->required();
    custom->add_option("--primitives", prim_file, "JSON array of primitive changes")->required();
    custom->add_option("--migration", migration_id, "registered migration id");
    custom->add_option("-o,--output", hist_out, "output file (default: in place)");
    custom->callback([&] {
        action = [&] {
            Recorder rec(History::parse(read_file(hist_file)), &reeng::case_registry());
            auto doc = parse_json(read_file(prim_file));
            if (!doc.is_array()) throw FormatError("primitives file must hold an array");
            std::vector<PrimitiveChange> prims;
            for (const auto& p : doc) prims.push_back(PrimitiveChange::from_json(p));
            std::optional<std::string> mig;
            if (!migration_id.empty()) mig = migration_id;
            const auto& record = rec.record_custom(std::move(prims), mig);
            write_file(hist_out.empty() ? hist_file : hist_out, rec.history().dump());
            out << record.label() << "\n";
        };
    });

    std::string model_file, model_out, report_file;
    std::size_t from = 0;
    std::optional<std::size_t> to;
    auto* mig = history->add_subcommand("migrate", "replay a history over a model");
    mig->add_option("--history", hist_file, "history file")->required();
    mig->add_option("--model", model_file, "input model")->required();
    mig->add_option("-o,--output", model_out, "migrated model")->required();
    mig->add_option("--from", from, "first release to replay (default 0)");
    mig->add_option("--to", to, "release to stop before (default: all, including the open one)");
    mig->add_option("--report", report_file, "write the migration report here");
    mig->callback([&] {
        action = [&] {
            auto h = History::parse(read_file(hist_file));
            auto mm = std::make_shared<const MetamodelSet>(reconstruct_metamodels(h, from));
            std::vector<Model> input{parse_model(mm, read_file(model_file))};
            auto result = migrate(input, h, reeng::case_registry(), from, to);
            write_file(model_out, dump_model(result.models.front()));
            std::string report;
            for (const auto& l : result.report.lines) report += l + "\n";
            if (!report_file.empty()) write_file(report_file, report);
            out << report;
        };
    });

    // -- op -------------------------------------------------------------------
    auto* op = app.add_subcommand("op", "reusable coupled operations");
    op->require_subcommand(1);
    add_apply(op);
    std::vector<std::string> selection;
    auto* list = op->add_subcommand("list", "list operations with their applicability");
    list->add_option("--history", hist_file, "history file (default: case metamodels)");
    list->add_option("--select", selection, "selected FQN (repeatable)");
    list->callback([&] {
        action = [&] {
            std::unique_ptr<Recorder> rec;
            if (hist_file.empty()) {
                rec = std::make_unique<Recorder>(*reeng::case_metamodels());
            } else {
                rec = std::make_unique<Recorder>(History::parse(read_file(hist_file)));
            }
            json ops = json::array();
            for (const auto& offer : offer_operations(rec->catalog(), rec->metamodels(), rec->models(), selection)) {
                ops.push_back({{"name", offer.operation->name()},
                               {"prefilled", bindings_to_json(offer.prefilled)},
                               {"applicable", offer.applicable},
                               {"messages", offer.messages}});
            }
            out << dump_json(ops);
        };
    });

    // -- model ----------------------------------------------------------------
    auto* model = app.add_subcommand("model", "inspect models");
    model->require_subcommand(1);
    MetamodelSource source;
    auto* check = model->add_subcommand("check", "report conformance violations");
    source.add_options(check);
    check->add_option("--model", model_file, "model file")->required();
    int status = 0;
    check->callback([&] {
        action = [&] {
            auto m = parse_model(source.load(), read_file(model_file));
            auto violations = check_conformance(m);
            for (const auto& v : violations) out << format_violation(v) << "\n";
            if (violations.empty()) {
                out << "conforms\n";
            } else {
                status = 1;
            }
        };
    });
    std::string left, right;
    auto* diff = model->add_subcommand("diff", "compare two models up to element ids");
    source.add_options(diff);
    diff->add_option("left", left, "first model")->required();
    diff->add_option("right", right, "second model")->required();
    diff->callback([&] {
        action = [&] {
            auto mm = source.load();
            auto a = parse_model(mm, read_file(left));
            auto b = parse_model(mm, read_file(right));
            if (auto d = first_difference(a, b)) {
                out << *d << "\n";
                status = 1;
            } else {
                out << "isomorphic\n";
            }
        };
    });

    // -- case -----------------------------------------------------------------
    auto* cs = app.add_subcommand("case", "the statemachine extraction case");
    cs->require_subcommand(1);
    auto* run = cs->add_subcommand("run", "extract the statemachine from a program model");
    run->add_option("--model", model_file, "program model")->required();
    run->add_option("-o,--output", model_out, "statemachine model")->required();
    run->add_option("--report", report_file, "write the migration report here");
    run->callback([&] {
        action = [&] {
            auto result = reeng::run_case(parse_model(reeng::case_metamodels(), read_file(model_file)));
            write_file(model_out, dump_model(result.statemachine));
            std::string report;
            for (const auto& l : result.report) report += l + "\n";
            if (!report_file.empty()) write_file(report_file, report);
            out << report;
        };
    });
    std::size_t states = 3, per_state = 1, pad = 0;
    std::uint64_t seed = 42;
    auto* gen = cs->add_subcommand("gen", "generate a program model");
    gen->add_option("--states", states, "number of states (default 3)")->check(CLI::PositiveNumber);
    gen->add_option("--transitions", per_state, "transitions per state (default 1)");
    gen->add_option("--pad", pad, "unrelated padding classes (default 0)");
    gen->add_option("--seed", seed, "random seed (default 42)");
    gen->add_option("-o,--output", model_out, "output model")->required();
    gen->callback([&] {
        action = [&] { write_file(model_out, dump_model(reeng::gen_fixture(states, per_state, pad, seed))); };
    });
    auto* ch = cs->add_subcommand("history", "write the case history");
    ch->add_option("-o,--output", hist_out, "history file")->required();
    ch->callback([&] { action = [&] { write_file(hist_out, reeng::build_case_history().dump()); }; });

    // -- bench ----------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "benchmarks");
    bench->require_subcommand(1);
    std::size_t size = 10000, queries = 10000;
    std::uint64_t bench_seed = 1;
    auto* inv = bench->add_subcommand("inverse", "forward slot reads against get_inverse");
    inv->add_option("--size", size, "model size (default 10000)");
    inv->add_option("--queries", queries, "queries per kind (default 10000)");
    inv->add_option("--seed", bench_seed, "random seed (default 1)");
    inv->callback([&] { action = [&] { out << dump_json(bench_inverse(size, queries, bench_seed).to_json()); }; });

    // -- serve ----------------------------------------------------------------
    std::string host = "127.0.0.1", save_dir;
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "run the browser service");
    serve->add_option("--host", host, "bind address (default 127.0.0.1)");
    serve->add_option("--port", port, "port (default 8080)");
    serve->add_option("--save-dir", save_dir, "directory the save endpoint may write to");
    serve->callback([&] {
        action = [&] {
            std::optional<std::filesystem::path> dir;
            if (!save_dir.empty()) dir = save_dir;
            BrowserService service(dir);
            err << "serving on " << host << ":" << port << "\n";
            if (!service.serve(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
        };
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (action) action();
        return status;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace coevo
