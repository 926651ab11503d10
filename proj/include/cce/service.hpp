#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cce/embeddings.hpp"
#include "cce/matcher.hpp"
#include "cce/tagger.hpp"

namespace httplib {
class Server;
}

namespace cce {

/// Wire/schema version carried in every JSON response.
inline constexpr std::string_view kWireVersion = "1";

struct EntityResult {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string text;
    std::vector<MatchResult> matches;
};

struct QueryResponse {
    std::string query;
    std::vector<EntityResult> entities;
};

/// Loaded model, vectors and glossary index. Immutable after construction;
/// run() may be called from any number of threads.
class Engine {
public:
    Engine(TaggerParams params, EmbeddingProvider provider, Glossary glossary, MatcherConfig config);

    /// Tag then match every entity. Entities with only stopwords get an
    /// empty match list. Throws EmptyQuery.
    QueryResponse run(std::string_view text) const;

    const MatcherConfig& config() const { return config_; }
    const TaggerParams& params() const { return params_; }

private:
    TaggerParams params_;
    EmbeddingProvider provider_;
    MatcherConfig config_;
    StemIndex index_;
};

nlohmann::json to_json(const QueryResponse& response);
/// Compact JSON text; scores at full precision.
std::string format_json(const QueryResponse& response);
/// Human listing; each match as ('cid', 'type', 0.999).
std::string format_human(const QueryResponse& response);

/// HTTP front end: POST /query {"text": ...} and GET /health.
std::unique_ptr<httplib::Server> make_server(const Engine& engine);

}  // namespace cce
