#include "democlust/service.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "httplib.h"

#include "democlust/data_table.hpp"
#include "democlust/error.hpp"
#include "democlust/features.hpp"
#include "democlust/json_io.hpp"
#include "democlust/layout.hpp"
#include "democlust/search.hpp"
#include "democlust/selection.hpp"
#include "democlust/session.hpp"

namespace democlust {

namespace fs = std::filesystem;

ServiceConfig ServiceConfig::from_env() {
    ServiceConfig c;
    if (const char* v = std::getenv("DEMOCLUST_BIND"); v && *v) {
        std::string s = v;
        const auto colon = s.rfind(':');
        if (colon != std::string::npos) {
            c.bind = s.substr(0, colon);
            c.port = std::atoi(s.c_str() + colon + 1);
        } else {
            c.bind = s;
        }
    }
    if (const char* v = std::getenv("DEMOCLUST_MAX_UPLOAD"); v && *v) c.max_upload = std::strtoull(v, nullptr, 10);
    if (const char* v = std::getenv("DEMOCLUST_TOP_F"); v && *v) c.top_f = std::strtoull(v, nullptr, 10);
    if (const char* v = std::getenv("DEMOCLUST_EPS_FRACTION"); v && *v) c.eps_fraction = std::strtod(v, nullptr);
    if (const char* v = std::getenv("DEMOCLUST_STATE_DIR"); v && *v) c.state_dir = v;
    return c;
}

namespace {

struct Reply {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

class HttpError : public std::runtime_error {
public:
    HttpError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

int status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::kParse:
    case ErrorCode::kEmptyInput:
    case ErrorCode::kUnknownFeature:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kUnknownItem:
        return 400;
    case ErrorCode::kUnknownCluster:
        return 404;
    case ErrorCode::kNumericFailure:
    case ErrorCode::kCancelled:
        return 500;
    default:
        return 422;
    }
}

Reply json_reply(int status, const Json& j) { return {status, j.dump(), "application/json"}; }

Reply error_reply(int status, std::string_view code, const std::string& message) {
    return json_reply(status, {{"error", code}, {"message", message}});
}

std::string random_id() {
    std::random_device rd;
    std::string id;
    char buf[9];
    for (int i = 0; i < 4; ++i) {
        std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(rd()));
        id += buf;
    }
    return id;
}

std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

Json parse_body(const std::string& body) {
    if (body.empty()) return Json::object();
    try {
        auto j = Json::parse(body);
        if (!j.is_object()) throw HttpError(400, "body must be a JSON object");
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw HttpError(400, std::string("invalid JSON: ") + e.what());
    }
}

struct SessionState {
    std::string id;
    std::int64_t created_at = 0;
    std::shared_ptr<const DataTable> table;
    std::string dataset;

    std::mutex mutex;  // serializes mutating requests
    WorkingLayout layout;
    FeatureSpec spec;
    std::optional<int> desired_k;
    std::uint64_t layout_generation = 0;
    RecommendationStore recs;
    std::map<std::string, Reply> replies;  // by idempotency key

    std::jthread worker;  // last member: joins before the rest is destroyed
};

// Rows of the table that are not deleted, encoded with the session spec.
EncodedMatrix active_matrix(const DataTable& table, const FeatureSpec& spec, const WorkingLayout& layout) {
    auto full = apply_weights(spec, table);
    if (layout.deleted().empty()) return full;
    return full.select_items(layout.active_items());
}

}  // namespace

struct Service::Impl {
    ServiceConfig config;
    httplib::Server server;
    std::thread thread;
    std::mutex sessions_mutex;
    std::map<std::string, std::shared_ptr<SessionState>> sessions;
    std::mutex replies_mutex;
    std::map<std::string, Reply> create_replies;

    explicit Impl(ServiceConfig c) : config(std::move(c)) {
        load_state();
        routes();
    }

    SearchOptions search_options(const SessionState& s) const {
        SearchOptions o;
        o.top_f = config.top_f;
        o.seed = config.seed;
        o.threads = config.threads;
        o.constraints.desired_k = s.desired_k;
        return o;
    }

    std::shared_ptr<SessionState> session(const std::string& id) {
        std::lock_guard lock(sessions_mutex);
        auto it = sessions.find(id);
        if (it == sessions.end()) throw HttpError(404, "unknown session " + id);
        return it->second;
    }

    // ------------------------------------------------------------ persistence

    void persist(const SessionState& s) const {
        if (config.state_dir.empty()) return;
        std::ofstream(fs::path(config.state_dir) / (s.id + ".jsonl"), std::ios::binary)
            << ops_to_jsonl(s.layout.history());
    }

    void persist_dataset(const SessionState& s) const {
        if (config.state_dir.empty()) return;
        fs::create_directories(config.state_dir);
        std::ofstream(fs::path(config.state_dir) / (s.id + ".csv"), std::ios::binary) << s.dataset;
        persist(s);
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void load_state() {
        if (config.state_dir.empty() || !fs::is_directory(config.state_dir)) return;
        for (const auto& entry : fs::directory_iterator(config.state_dir)) {
            if (entry.path().extension() != ".csv") continue;
            auto s = std::make_shared<SessionState>();
            s->id = entry.path().stem().string();
            try {
                s->dataset = slurp(entry.path());
                s->table = std::make_shared<const DataTable>(ingest_csv(s->dataset));
                auto history_path = entry.path();
                history_path.replace_extension(".jsonl");
                const auto history = fs::exists(history_path) ? ops_from_jsonl(slurp(history_path))
                                                               : std::vector<DemonstrationOp>{};
                s->layout = WorkingLayout::replay(s->table->n_rows(), history);
                s->spec = s->layout.weights().empty() ? default_features(*s->table)
                                                      : user_features(s->layout.weights());
                s->layout_generation = history.size();
                sessions.emplace(s->id, s);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "skipping stored session %s: %s\n", s->id.c_str(), e.what());
            }
        }
    }

    // ------------------------------------------------------------- handlers

    Json layout_payload(SessionState& s) {
        Json j;
        j["session_id"] = s.id;
        j["layout_generation"] = s.layout_generation;
        j["generation"] = s.recs.requested();
        j["layout"] = to_json(s.layout);
        j["coords"] = s.layout.clusters().empty()
                          ? to_json(LayoutCoordinates{})
                          : to_json(layout_coords(s.layout, apply_weights(s.spec, *s.table)));
        return j;
    }

    void start_rerank(SessionState& s) {
        const auto generation = s.recs.next_generation();
        auto table = s.table;
        auto layout = s.layout;
        auto spec = s.spec;
        auto options = search_options(s);
        auto* recs = &s.recs;
        s.worker = std::jthread([=](std::stop_token stop) {
            try {
                RecommendationSet r;
                if (layout.assigned_count() > 0) {
                    r = rerank_on_demonstration(*table, layout, spec, options, generation, stop);
                } else {
                    const auto matrix = active_matrix(*table, spec, layout);
                    const auto cands = enumerate_space(matrix.rows(), options.constraints, options.seed);
                    r = search(*table, spec, matrix, cands, nullptr, options, generation, stop);
                }
                recs->publish(std::move(r));
            } catch (const Error& e) {
                if (e.code() != ErrorCode::kCancelled) recs->publish_failure(generation, e.what());
            } catch (const std::exception& e) {
                recs->publish_failure(generation, e.what());
            }
        });
    }

    Reply create_session(const httplib::Request& req) {
        std::string doc;
        if (req.is_multipart_form_data()) {
            if (req.has_file("file")) {
                doc = req.get_file_value("file").content;
            } else if (!req.files.empty()) {
                doc = req.files.begin()->second.content;
            } else {
                throw HttpError(400, "multipart body has no file");
            }
        } else {
            doc = req.body;
        }
        if (doc.size() > config.max_upload) throw HttpError(413, "upload exceeds the size limit");
        char delimiter = ',';
        if (req.has_param("delimiter") && req.get_param_value("delimiter").size() == 1) {
            delimiter = req.get_param_value("delimiter")[0];
        }

        auto s = std::make_shared<SessionState>();
        s->id = random_id();
        s->created_at = now_ms();
        s->table = std::make_shared<const DataTable>(ingest_csv(doc, {delimiter}));
        s->dataset = std::move(doc);
        s->layout = WorkingLayout(s->table->n_rows());
        s->spec = default_features(*s->table);
        persist_dataset(*s);

        Json columns = Json::array();
        for (const auto& c : s->table->columns()) {
            Json col{{"name", c.name}, {"kind", to_string(c.kind)}, {"missing", c.missing_count}};
            if (c.kind == ColumnKind::kNumeric) {
                col["min"] = c.min;
                col["max"] = c.max;
            } else {
                col["categories"] = c.categories;
            }
            columns.push_back(std::move(col));
        }
        Json out{{"session_id", s->id},
                 {"dataset_id", s->table->id()},
                 {"n_rows", s->table->n_rows()},
                 {"columns", std::move(columns)}};
        {
            std::lock_guard lock(sessions_mutex);
            sessions.emplace(s->id, s);
        }
        return json_reply(201, out);
    }

    Reply table_page(SessionState& s, const httplib::Request& req) {
        std::size_t offset = 0, limit = 100;
        try {
            if (req.has_param("offset")) offset = std::stoull(req.get_param_value("offset"));
            if (req.has_param("limit")) limit = std::stoull(req.get_param_value("limit"));
        } catch (const std::exception&) {
            throw HttpError(400, "offset and limit must be non-negative integers");
        }
        std::lock_guard lock(s.mutex);
        const auto& t = *s.table;
        Json names = Json::array();
        for (const auto& c : t.columns()) names.push_back(c.name);
        Json rows = Json::array();
        for (std::size_t i = offset; i < t.n_rows() && i < offset + limit; ++i) {
            Json cells = Json::array();
            for (std::size_t c = 0; c < t.n_columns(); ++c) cells.push_back(t.raw(i, c));
            Json cluster = nullptr;
            if (s.layout.is_deleted(i)) cluster = "deleted";
            else if (auto id = s.layout.cluster_of(i)) cluster = *id;
            rows.push_back({{"item_id", i}, {"cells", std::move(cells)}, {"cluster", cluster}});
        }
        return json_reply(200, {{"offset", offset},
                                {"limit", limit},
                                {"n_rows", t.n_rows()},
                                {"columns", std::move(names)},
                                {"rows", std::move(rows)}});
    }

    Reply select_similar(SessionState& s, const Json& body) {
        if (!body.contains("item_id") || !body.contains("column")) {
            throw HttpError(400, "item_id and column are required");
        }
        std::optional<SelectionSet> active;
        if (body.contains("intersect_with") && !body.at("intersect_with").is_null()) {
            active = SelectionSet::make(body.at("intersect_with").get<std::vector<ItemId>>(),
                                        SelectionProvenance::kCellClick, s.table->n_rows());
        }
        SimilarityConfig cfg;
        cfg.eps_fraction = body.value("eps_fraction", config.eps_fraction);
        const auto sel = similar_by_cell(*s.table, body.at("item_id").get<ItemId>(),
                                         body.at("column").get<std::string>(), active, cfg);
        return json_reply(200, to_json(sel));
    }

    FeatureSpec spec_from_body(const SessionState& s, const Json& body) {
        const auto& t = *s.table;
        const std::string mode = body.value("mode", body.contains("features") ? "user" : "");
        if (mode.empty()) return s.spec;
        switch (feature_mode_from_string(mode)) {
        case FeatureMode::kPca:
            return pca_features(t, body.value("pca_components", std::min<int>(2, static_cast<int>(t.n_columns()))));
        case FeatureMode::kSelectKBest:
            return select_k_best(t, body.value("k_best", std::min<int>(8, static_cast<int>(t.n_columns()))));
        case FeatureMode::kUser:
            break;
        }
        std::vector<WeightedFeature> sel;
        if (body.contains("features")) {
            const auto names = body.at("features").get<std::vector<std::string>>();
            std::vector<double> weights(names.size(), 1.0);
            if (body.contains("weights")) {
                weights = body.at("weights").get<std::vector<double>>();
                if (weights.size() != names.size()) {
                    throw HttpError(400, "weights and features differ in length");
                }
            }
            for (std::size_t i = 0; i < names.size(); ++i) sel.push_back({names[i], weights[i]});
        } else if (body.contains("weights") && body.at("weights").is_object()) {
            for (const auto& [name, w] : body.at("weights").items()) sel.push_back({name, w.get<double>()});
        } else {
            sel = all_features(t);
        }
        auto spec = user_features(std::move(sel));
        spec.validate(t);
        return spec;
    }

    Reply cluster(SessionState& s, const Json& body) {
        std::lock_guard lock(s.mutex);
        auto spec = spec_from_body(s, body);
        std::optional<int> desired_k;
        if (body.contains("desired_k") && !body.at("desired_k").is_null()) desired_k = body.at("desired_k").get<int>();

        const auto generation = s.recs.next_generation();
        s.worker = std::jthread();  // supersede any background rerank
        const auto matrix = active_matrix(*s.table, spec, s.layout);
        auto options = search_options(s);
        options.constraints.desired_k = desired_k;
        RecommendationSet recs;
        try {
            recs = search(*s.table, spec, matrix,
                          enumerate_space(matrix.rows(), options.constraints, options.seed), nullptr,
                          options, generation);
        } catch (const std::exception& e) {
            s.recs.publish_failure(generation, e.what());
            throw;
        }
        s.desired_k = desired_k;
        s.spec = spec;
        if (spec.mode == FeatureMode::kUser) {
            auto op = DemonstrationOp::set_weights(spec.selected);
            op.timestamp = now_ms();
            s.layout.apply(std::move(op));
        }
        auto op = recommendation_op(*recs.current_shown);
        op.timestamp = now_ms();
        s.layout.apply(std::move(op));
        ++s.layout_generation;
        s.recs.publish(recs);
        persist(s);
        auto out = layout_payload(s);
        out["recommendations"] = to_json(recs, false);
        return json_reply(200, out);
    }

    void check_base_generation(const SessionState& s, const Json& body) {
        if (body.contains("base_generation") && !body.at("base_generation").is_null()) {
            const auto base = body.at("base_generation").get<std::uint64_t>();
            if (base != s.layout_generation) {
                throw HttpError(409, "op based on layout generation " + std::to_string(base) +
                                         ", current is " + std::to_string(s.layout_generation));
            }
        }
    }

    Reply apply_op(SessionState& s, const Json& body) {
        std::lock_guard lock(s.mutex);
        check_base_generation(s, body);
        auto op = op_from_json(body);
        if (op.timestamp == 0) op.timestamp = now_ms();
        if (op.kind == OpKind::kSetWeights) user_features(op.weights).validate(*s.table);
        const auto kind = op.kind;
        const auto weights = op.weights;
        const auto result = s.layout.apply(std::move(op));
        if (!result.no_op) {
            ++s.layout_generation;
            if (kind == OpKind::kSetWeights) s.spec = user_features(weights);
            if (kind != OpKind::kLoadRecommendation) start_rerank(s);
            persist(s);
        }
        auto out = layout_payload(s);
        out["no_op"] = result.no_op;
        out["created"] = result.created ? Json(*result.created) : Json(nullptr);
        return json_reply(200, out);
    }

    Reply recommendations(SessionState& s, const httplib::Request& req) {
        std::uint64_t wanted = 1;
        if (req.has_param("generation")) {
            try {
                wanted = std::stoull(req.get_param_value("generation"));
            } catch (const std::exception&) {
                throw HttpError(400, "generation must be an integer");
            }
        }
        if (auto recs = s.recs.latest(); recs && recs->generation >= wanted) {
            return json_reply(200, to_json(*recs));
        }
        if (auto f = s.recs.failure(); f && f->first >= wanted) {
            return error_reply(422, "search_failed", f->second);
        }
        return json_reply(202, {{"status", "pending"}, {"requested", s.recs.requested()}});
    }

    Reply apply_recommendation(SessionState& s, std::size_t rank) {
        std::lock_guard lock(s.mutex);
        auto recs = s.recs.latest();
        if (!recs || rank >= recs->size()) throw HttpError(404, "no recommendation at rank " + std::to_string(rank));
        auto op = recommendation_op(recs->at_rank(rank));
        for (auto& g : op.groups) std::erase_if(g, [&](ItemId i) { return s.layout.is_deleted(i); });
        std::erase_if(op.groups, [](const auto& g) { return g.empty(); });
        op.timestamp = now_ms();
        s.layout.apply(std::move(op));
        ++s.layout_generation;
        persist(s);
        auto out = layout_payload(s);
        out["applied"] = to_json(recs->at_rank(rank), false);
        out["rank"] = rank;
        return json_reply(200, out);
    }

    Reply subcluster(SessionState& s, ClusterId cid, const Json& body) {
        std::lock_guard lock(s.mutex);
        if (!body.contains("feature")) throw HttpError(400, "feature is required");
        const auto feature = body.at("feature").get<std::string>();
        const auto matrix = apply_weights(s.spec, *s.table);
        auto view = open_subpanel(s.layout, *s.table, matrix, cid, feature, config.seed);
        return json_reply(200, {{"subcluster", to_json(view.model)}, {"histogram", to_json(view.histogram)}});
    }

    Reply export_table(SessionState& s) {
        std::lock_guard lock(s.mutex);
        return {200, export_csv(s.layout, *s.table), "text/csv"};
    }

    Reply get_layout(SessionState& s) {
        std::lock_guard lock(s.mutex);
        return json_reply(200, layout_payload(s));
    }

    // --------------------------------------------------------------- wiring

    template <class F>
    httplib::Server::Handler guarded(F f, bool idempotent) {
        return [this, f, idempotent](const httplib::Request& req, httplib::Response& res) {
            const std::string key =
                idempotent && req.has_header("Idempotency-Key")
                    ? req.method + " " + req.path + " " + req.get_header_value("Idempotency-Key")
                    : std::string();
            if (!key.empty()) {
                std::lock_guard lock(replies_mutex);
                if (auto it = create_replies.find(key); it != create_replies.end()) {
                    res.status = it->second.status;
                    res.set_content(it->second.body, it->second.content_type);
                    return;
                }
            }
            Reply r;
            try {
                r = f(req);
            } catch (const HttpError& e) {
                r = error_reply(e.status(), "http_error", e.what());
            } catch (const ParseError& e) {
                Json j{{"error", to_string(e.code())}, {"message", e.what()}, {"row", e.row()}, {"column", e.column()}};
                r = json_reply(400, j);
            } catch (const NumericFailure& e) {
                Json j{{"error", to_string(e.code())}, {"message", e.what()}, {"residual", e.residual()}};
                r = json_reply(500, j);
            } catch (const Error& e) {
                r = error_reply(status_for(e.code()), to_string(e.code()), e.what());
            } catch (const nlohmann::json::exception& e) {
                r = error_reply(400, "invalid_argument", e.what());
            } catch (const std::exception& e) {
                r = error_reply(500, "internal", e.what());
            }
            if (!key.empty()) {
                std::lock_guard lock(replies_mutex);
                create_replies.emplace(key, r);
            }
            res.status = r.status;
            res.set_content(r.body, r.content_type);
            if (r.content_type == "text/csv") {
                res.set_header("Content-Disposition", "attachment; filename=\"export.csv\"");
            }
        };
    }

    void routes() {
        server.set_payload_max_length(config.max_upload + 64 * 1024);
        server.Post("/sessions", guarded([this](const auto& req) { return create_session(req); }, true));
        server.Get(R"(/sessions/([0-9a-f]+)/table)", guarded([this](const auto& req) {
                       return table_page(*session(req.matches[1]), req);
                   }, false));
        server.Get(R"(/sessions/([0-9a-f]+)/layout)", guarded([this](const auto& req) {
                       return get_layout(*session(req.matches[1]));
                   }, false));
        server.Post(R"(/sessions/([0-9a-f]+)/select/similar)", guarded([this](const auto& req) {
                        return select_similar(*session(req.matches[1]), parse_body(req.body));
                    }, false));
        server.Post(R"(/sessions/([0-9a-f]+)/cluster)", guarded([this](const auto& req) {
                        return cluster(*session(req.matches[1]), parse_body(req.body));
                    }, true));
        server.Post(R"(/sessions/([0-9a-f]+)/ops)", guarded([this](const auto& req) {
                        return apply_op(*session(req.matches[1]), parse_body(req.body));
                    }, true));
        server.Get(R"(/sessions/([0-9a-f]+)/recommendations)", guarded([this](const auto& req) {
                       return recommendations(*session(req.matches[1]), req);
                   }, false));
        server.Post(R"(/sessions/([0-9a-f]+)/recommendations/(\d+)/apply)", guarded([this](const auto& req) {
                        return apply_recommendation(*session(req.matches[1]), std::stoull(req.matches[2]));
                    }, true));
        server.Post(R"(/sessions/([0-9a-f]+)/clusters/(-?\d+)/subcluster)", guarded([this](const auto& req) {
                        return subcluster(*session(req.matches[1]), std::stoll(req.matches[2]),
                                          parse_body(req.body));
                    }, false));
        server.Get(R"(/sessions/([0-9a-f]+)/export\.csv)", guarded([this](const auto& req) {
                       return export_table(*session(req.matches[1]));
                   }, false));
    }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() {
    stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

int Service::start() {
    int port = impl_->config.port;
    if (port == 0) {
        port = impl_->server.bind_to_any_port(impl_->config.bind);
    } else if (!impl_->server.bind_to_port(impl_->config.bind, port)) {
        return -1;
    }
    if (port < 0) return -1;
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port;
}

bool Service::run() { return impl_->server.listen(impl_->config.bind, impl_->config.port); }

void Service::stop() { impl_->server.stop(); }

}  // namespace democlust
