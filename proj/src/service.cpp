#include "cce/service.hpp"

#include <atomic>
#include <cstdio>

#include <httplib.h>

#include "cce/error.hpp"

namespace cce {

Engine::Engine(TaggerParams params, EmbeddingProvider provider, Glossary glossary, MatcherConfig config)
    : params_(std::move(params)),
      provider_(std::move(provider)),
      config_(std::move(config)),
      index_(std::move(glossary), config_) {
    if (params_.input_dim != provider_.dimension()) {
        throw DimensionMismatch("model expects " + std::to_string(params_.input_dim) +
                                "-dimensional vectors, vector file has " + std::to_string(provider_.dimension()));
    }
}

QueryResponse Engine::run(std::string_view text) const {
    const TaggedSentence tagged = tag(params_, provider_, text);
    QueryResponse out;
    out.query = std::string(text);
    for (EntitySpan& span : extract_entities(tagged)) {
        EntityResult e{span.start, span.end, span.text, {}};
        try {
            e.matches = match(span, index_, provider_, config_);
        } catch (const NoContentWords&) {
        }
        out.entities.push_back(std::move(e));
    }
    return out;
}

nlohmann::json to_json(const QueryResponse& response) {
    nlohmann::json entities = nlohmann::json::array();
    for (const auto& e : response.entities) {
        nlohmann::json matches = nlohmann::json::array();
        for (const auto& m : e.matches) {
            matches.push_back({{"cid", m.cid}, {"type", m.concept_type}, {"score", m.score}});
        }
        entities.push_back({{"start", e.start}, {"end", e.end}, {"text", e.text}, {"matches", std::move(matches)}});
    }
    return {{"version", kWireVersion}, {"query", response.query}, {"entities", std::move(entities)}};
}

std::string format_json(const QueryResponse& response) { return to_json(response).dump(); }

std::string format_human(const QueryResponse& response) {
    std::string out = "query: " + response.query + "\n";
    for (std::size_t i = 0; i < response.entities.size(); ++i) {
        const auto& e = response.entities[i];
        out += "entity " + std::to_string(i + 1) + ": " + e.text + " [" + std::to_string(e.start) + ", " +
               std::to_string(e.end) + ")\n";
        if (e.matches.empty()) out += "  (no matches)\n";
        for (const auto& m : e.matches) {
            char score[32];
            std::snprintf(score, sizeof score, "%.3f", m.score);
            out += "  ('" + m.cid + "', '" + m.concept_type + "', " + score + ")\n";
        }
    }
    return out;
}

std::unique_ptr<httplib::Server> make_server(const Engine& engine) {
    auto server = std::make_unique<httplib::Server>();
    auto counter = std::make_shared<std::atomic<unsigned long long>>(0);

    server->Get("/health", [](const httplib::Request&, httplib::Response& res) {
        const nlohmann::json body{{"status", "ok"}, {"model_version", kModelHeader}, {"version", kWireVersion}};
        res.set_content(body.dump(), "application/json");
    });

    server->Post("/query", [&engine, counter](const httplib::Request& req, httplib::Response& res) {
        const auto request_id = ++*counter;
        auto fail = [&](int status, const std::string& message) {
            res.status = status;
            const nlohmann::json body{{"version", kWireVersion}, {"error", message}, {"request_id", request_id}};
            res.set_content(body.dump(), "application/json");
        };
        std::string text;
        try {
            const auto body = nlohmann::json::parse(req.body);
            if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
                return fail(400, "body must be {\"text\": string}");
            }
            text = body["text"].get<std::string>();
        } catch (const nlohmann::json::exception&) {
            return fail(400, "body is not valid JSON");
        }
        try {
            res.set_content(format_json(engine.run(text)), "application/json");
        } catch (const EmptyQuery&) {
            fail(400, "text is empty");
        } catch (const std::exception&) {
            fail(500, "internal error");
        }
    });
    return server;
}

}  // namespace cce
