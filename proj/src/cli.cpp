#include "promptrouter/cli.hpp"

#include "promptrouter/advantage.hpp"
#include "promptrouter/catalog.hpp"
#include "promptrouter/config.hpp"
#include "promptrouter/errors.hpp"
#include "promptrouter/model_tree.hpp"
#include "promptrouter/scorers.hpp"
#include "promptrouter/service.hpp"
#include "promptrouter/text.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <csignal>
#include <fstream>
#include <optional>
#include <pthread.h>

namespace promptrouter {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CommonOptions {
    std::string config;
    std::string catalog;
    std::string db;
    std::string tree;
    std::string templates;
    std::string lexicon;
};

void add_common(CLI::App& cmd, CommonOptions& o) {
    cmd.add_option("--config", o.config, "Config JSON (default: $PROMPTROUTER_CONFIG or ./promptrouter.json)");
    cmd.add_option("--catalog", o.catalog, "Catalog directory, .jsonl or .json file");
    cmd.add_option("--db", o.db, "Advantage DB file");
    cmd.add_option("--tree", o.tree, "Model tree JSON file");
    cmd.add_option("--templates", o.templates, "Reasoner template directory");
    cmd.add_option("--lexicon", o.lexicon, "Lexicon JSON file");
}

ServiceConfig resolve_config(const CommonOptions& o) {
    ServiceConfig config;
    if (!o.config.empty()) {
        config = load_config(o.config);
    } else if (const auto path = default_config_path(); fs::exists(path)) {
        config = load_config(path);
    }
    if (!o.catalog.empty()) config.catalog_dir = o.catalog;
    if (!o.db.empty()) config.db_path = o.db;
    if (!o.tree.empty()) config.tree_path = o.tree;
    if (!o.templates.empty()) config.templates_dir = o.templates;
    if (!o.lexicon.empty()) config.lexicon_path = o.lexicon;
    config.validate();
    return config;
}

std::vector<std::string> read_corpus(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw AdvantageError("cannot open corpus " + path.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        out.emplace_back(t);
    }
    return out;
}

std::pair<std::string, int> split_listen(const std::string& addr) {
    const auto colon = addr.rfind(':');
    if (colon == std::string::npos) throw ConfigError("listen address must be host:port");
    try {
        return {addr.substr(0, colon), std::stoi(addr.substr(colon + 1))};
    } catch (const std::exception&) {
        throw ConfigError("bad port in listen address '" + addr + "'");
    }
}

// Blocks until SIGINT or SIGTERM. The signals are masked first so the
// server's worker threads never receive them.
void serve_until_signal(HttpService& service, const std::string& host, int port, std::ostream& out) {
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);
    const int bound = service.start(host, port);
    out << "listening on " << host << ':' << bound << std::endl;
    int received = 0;
    sigwait(&signals, &received);
    service.stop();
    pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Routes text-to-image prompts to expert generative models", "promptrouter"};
    app.require_subcommand(1);

    CommonOptions common;
    bool no_timings = false;
    std::string prompt;

    auto* route_cmd = app.add_subcommand("route", "Route a prompt and print the routing decision as JSON");
    add_common(*route_cmd, common);
    route_cmd->add_option("prompt", prompt, "Raw user input")->required();
    route_cmd->add_flag("--no-timings", no_timings, "Omit per-stage timings from the output");

    GenerationParams gen;
    std::optional<int> width, height, steps;
    std::string artifact_dir;
    auto* generate_cmd = app.add_subcommand("generate", "Route a prompt and generate with the selected model");
    add_common(*generate_cmd, common);
    generate_cmd->add_option("prompt", prompt, "Raw user input")->required();
    generate_cmd->add_option("--seed", gen.seed, "Generation seed")->check(CLI::NonNegativeNumber);
    generate_cmd->add_option("--width", width, "Image width in pixels");
    generate_cmd->add_option("--height", height, "Image height in pixels");
    generate_cmd->add_option("--steps", steps, "Sampling steps");
    generate_cmd->add_option("--artifact-dir", artifact_dir, "Where the mock backend writes artifacts");
    generate_cmd->add_flag("--no-timings", no_timings, "Omit per-stage timings from the output");

    std::string out_path;
    auto* tree_cmd = app.add_subcommand("build-tree", "Build the model tree for a catalog");
    add_common(*tree_cmd, common);
    tree_cmd->add_option("--out", out_path, "Write the tree here instead of stdout");

    std::string corpus_path;
    std::string scorer_spec;
    std::optional<std::size_t> k_prompts, k_models;
    auto* db_cmd = app.add_subcommand("build-advantage-db", "Score every catalog model on a prompt corpus");
    add_common(*db_cmd, common);
    db_cmd->add_option("--corpus", corpus_path, "Corpus file, one prompt per line")->required();
    db_cmd->add_option("--scorer", scorer_spec, "'synthetic' or the URL of a reward endpoint")->required();
    db_cmd->add_option("--out", out_path, "Output DB file")->required();
    db_cmd->add_option("--k-prompts", k_prompts, "Grid rows recorded in the DB")->check(CLI::PositiveNumber);
    db_cmd->add_option("--k-models", k_models, "Grid columns recorded in the DB")->check(CLI::PositiveNumber);

    std::string card_path;
    auto* add_cmd = app.add_subcommand("add-model", "Add a model card to a catalog directory and its tree");
    add_common(*add_cmd, common);
    add_cmd->add_option("card", card_path, "Model card JSON file")->required();

    std::string listen;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
    add_common(*serve_cmd, common);
    serve_cmd->add_option("--listen", listen, "host:port, overriding the config");

    if (argc > 1 && argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
        err << "unknown subcommand '" << argv[1] << "'\n" << app.help();
        return 1;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        err << app.help();
        return 1;
    }

    try {
        auto config = resolve_config(common);

        if (route_cmd->parsed()) {
            Engine engine(config);
            out << to_json(engine.route(prompt), !no_timings).dump(2) << '\n';
            return 0;
        }

        if (generate_cmd->parsed()) {
            if (!artifact_dir.empty()) config.artifact_dir = artifact_dir;
            Engine engine(config);
            auto params = engine.default_params();
            params.width = width.value_or(params.width);
            params.height = height.value_or(params.height);
            params.steps = steps.value_or(params.steps);
            params.seed = gen.seed;
            const auto outcome = engine.generate(prompt, params);
            out << json{{"decision", to_json(outcome.decision, !no_timings)}, {"generation", outcome.result}}.dump(2)
                << '\n';
            return 0;
        }

        if (tree_cmd->parsed()) {
            const auto lexicon = Lexicon::load(config.lexicon_path);
            const auto reasoner = make_reasoner(config, lexicon);
            const auto tree = build_tree(load_catalog(config.catalog_dir), *reasoner);
            if (out_path.empty()) {
                out << json(tree).dump(2) << '\n';
            } else {
                save_tree(tree, out_path);
            }
            return 0;
        }

        if (db_cmd->parsed()) {
            std::unique_ptr<Scorer> scorer;
            if (scorer_spec == "synthetic") {
                scorer = std::make_unique<SyntheticAffinityScorer>(Lexicon::load(config.lexicon_path));
            } else if (scorer_spec.rfind("http://", 0) == 0) {
                scorer = std::make_unique<RemoteScorer>(scorer_spec);
            } else {
                err << "--scorer must be 'synthetic' or an http:// URL\n" << db_cmd->help();
                return 1;
            }
            const auto catalog = load_catalog(config.catalog_dir);
            const auto corpus = read_corpus(corpus_path);
            const auto embedder = make_embedder(config);
            const DbOptions options{k_prompts.value_or(config.k_prompts), k_models.value_or(config.k_models)};
            const auto db = build_db(corpus, catalog, *scorer, *embedder, options);
            if (fs::path(out_path).has_parent_path()) fs::create_directories(fs::path(out_path).parent_path());
            db.save(out_path);
            out << json{{"out", out_path},
                        {"prompts", db.prompt_count()},
                        {"models", db.model_count()},
                        {"embedder_id", db.embedder_id()}}
                       .dump(2)
                << '\n';
            return 0;
        }

        if (add_cmd->parsed()) {
            if (!fs::is_directory(config.catalog_dir)) {
                throw CatalogError("add-model needs a catalog directory, got " + config.catalog_dir.string());
            }
            std::ifstream in(card_path);
            if (!in) throw CatalogError("cannot open card " + card_path);
            ModelCard card;
            try {
                card = json::parse(in).get<ModelCard>();
            } catch (const json::exception& e) {
                throw CatalogError(std::string("malformed card file: ") + e.what());
            }
            const auto lexicon = Lexicon::load(config.lexicon_path);
            const auto reasoner = make_reasoner(config, lexicon);
            const auto catalog = load_catalog(config.catalog_dir);
            const auto next = add_model(catalog, card);
            auto tree = !config.tree_path.empty() && fs::exists(config.tree_path)
                            ? reconcile_tree(load_tree(config.tree_path), catalog, *reasoner)
                            : build_tree(catalog, *reasoner);
            tree = insert_model(tree, card, *reasoner);
            const auto leaf = tree.leaf_of(card.id);
            save_catalog(next, config.catalog_dir);
            if (!config.tree_path.empty()) save_tree(tree, config.tree_path);
            const json report{{"model_id", card.id},
                              {"catalog_version", next.version()},
                              {"leaf", {{"subject", leaf->first}, {"style", leaf->second}}}};
            out << report.dump(2) << '\n';
            return 0;
        }

        if (serve_cmd->parsed()) {
            if (!listen.empty()) config.listen_addr = listen;
            const auto [host, port] = split_listen(config.listen_addr);
            Engine engine(config);
            HttpService service(engine);
            serve_until_signal(service, host, port, out);
            return 0;
        }
    } catch (const Error& e) {
        err << "error [" << e.stage() << "]: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    err << app.help();
    return 1;
}

}  // namespace promptrouter
