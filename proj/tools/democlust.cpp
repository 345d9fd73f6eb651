#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "democlust/data_table.hpp"
#include "democlust/error.hpp"
#include "democlust/features.hpp"
#include "democlust/json_io.hpp"
#include "democlust/layout.hpp"
#include "democlust/search.hpp"
#include "democlust/service.hpp"
#include "democlust/session.hpp"

namespace fs = std::filesystem;
using namespace democlust;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

struct RunArgs {
    std::string input;
    std::vector<std::string> features;
    std::vector<double> weights;
    int k = 0;
    std::string demonstrations;
    std::string out;
    std::size_t top = kDefaultTopF;
    std::uint64_t seed = 0;
    std::string mode;
    int components = 2;
    char delimiter = ',';
    unsigned threads = 0;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << content)) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
}

FeatureSpec make_spec(const RunArgs& a, const DataTable& table) {
    if (a.mode == "pca") return pca_features(table, a.components);
    if (a.mode == "select_k_best") return default_features(table);
    if (!a.mode.empty() && a.mode != "user") {
        throw Error(ErrorCode::kInvalidArgument, "unknown mode '" + a.mode + "'");
    }
    if (a.features.empty() && a.weights.empty() && a.mode.empty()) return default_features(table);

    std::vector<std::string> names = a.features;
    if (names.empty()) {
        for (const auto& c : table.columns()) names.push_back(c.name);
    }
    if (!a.weights.empty() && a.weights.size() != names.size()) {
        throw Error(ErrorCode::kInvalidArgument, "--weights has " + std::to_string(a.weights.size()) +
                                                     " values for " + std::to_string(names.size()) + " features");
    }
    std::vector<WeightedFeature> sel;
    for (std::size_t i = 0; i < names.size(); ++i) {
        sel.push_back({names[i], a.weights.empty() ? 1.0 : a.weights[i]});
    }
    auto spec = user_features(std::move(sel));
    spec.validate(table);
    return spec;
}

std::string report(const RecommendationSet& recs) {
    std::string out;
    char buf[64];
    std::snprintf(buf, sizeof buf, "generation %llu\n", static_cast<unsigned long long>(recs.generation));
    out += buf;
    if (recs.mismatch) out += "no model reproduces the demonstrated clusters; showing the nearest one\n";
    for (std::size_t rank = 0; rank < recs.size(); ++rank) {
        const auto& r = recs.at_rank(rank);
        out += rank == 0 ? "shown" : "rank " + std::to_string(rank);
        out += ": " + r.candidate.label() + ": " + r.description.sentence + "\n";
    }
    return out;
}

int run(const RunArgs& a) {
    const auto table = ingest_csv(read_file(a.input), {a.delimiter});
    auto spec = make_spec(a, table);

    WorkingLayout layout(table.n_rows());
    if (!a.demonstrations.empty()) {
        layout = WorkingLayout::replay(table.n_rows(), ops_from_jsonl(read_file(a.demonstrations)));
        if (!layout.weights().empty()) {
            spec = user_features(layout.weights());
            spec.validate(table);
        }
    }

    SearchOptions options;
    options.top_f = a.top;
    options.seed = a.seed;
    options.threads = a.threads;
    if (a.k > 0) options.constraints.desired_k = a.k;

    RecommendationSet recs;
    if (layout.assigned_count() > 0) {
        recs = rerank_on_demonstration(table, layout, spec, options, 1);
    } else {
        auto matrix = apply_weights(spec, table);
        if (!layout.deleted().empty()) matrix = matrix.select_items(layout.active_items());
        recs = search(table, spec, matrix, enumerate_space(matrix.rows(), options.constraints, options.seed),
                      nullptr, options, 1);
    }

    fs::create_directories(a.out);
    write_file(fs::path(a.out) / "ranked.json", to_json(recs).dump(2) + "\n");
    layout.apply(recommendation_op(*recs.current_shown));
    write_file(fs::path(a.out) / "assignments.csv", export_csv(layout, table, a.delimiter));
    write_file(fs::path(a.out) / "report.txt", report(recs));
    std::cout << report(recs);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interactive clustering engine"};
    app.require_subcommand(1);

    RunArgs a;
    std::string delimiter = ",";
    auto* run_cmd = app.add_subcommand("run", "search the model space for a CSV file and write the ranking");
    run_cmd->add_option("--input", a.input, "CSV file with a header row")->required();
    run_cmd->add_option("--features", a.features, "columns to cluster on")->delimiter(',');
    run_cmd->add_option("--weights", a.weights, "one weight per feature")->delimiter(',');
    run_cmd->add_option("--k", a.k, "pin the number of clusters");
    run_cmd->add_option("--demonstrations", a.demonstrations, "JSON lines file of demonstration ops");
    run_cmd->add_option("--out", a.out, "output directory")->required();
    run_cmd->add_option("--top", a.top, "number of recommendations besides the shown model");
    run_cmd->add_option("--seed", a.seed, "random seed");
    run_cmd->add_option("--mode", a.mode, "user, select_k_best or pca");
    run_cmd->add_option("--components", a.components, "PCA components");
    run_cmd->add_option("--delimiter", delimiter, "field delimiter");
    run_cmd->add_option("--threads", a.threads, "worker threads, 0 for all cores");

    auto config = ServiceConfig::from_env();
    auto* serve_cmd = app.add_subcommand("serve", "start the HTTP service");
    serve_cmd->add_option("--bind", config.bind, "listen address");
    serve_cmd->add_option("--port", config.port, "listen port");
    serve_cmd->add_option("--seed", config.seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (run_cmd->parsed()) {
            if (delimiter.size() != 1) throw Error(ErrorCode::kInvalidArgument, "delimiter must be one character");
            a.delimiter = delimiter[0];
            return run(a);
        }
        Service service(config);
        std::fprintf(stderr, "listening on %s:%d\n", config.bind.c_str(), config.port);
        return service.run() ? 0 : 1;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s (row %zu, column %zu)\n", e.what(), e.row(), e.column());
        return kExitValidation;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.code() == ErrorCode::kNumericFailure ? kExitNumeric : kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    }
}
