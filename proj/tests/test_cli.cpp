#include <doctest.h>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <future>
#include <sstream>

#include "cce/cli.hpp"
#include "cce/corpus.hpp"
#include "cce/service.hpp"
#include "cce/synthesizer.hpp"
#include "cce/text.hpp"
#include "support.hpp"

#include <httplib.h>

using namespace cce;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args, const std::string& input = "") {
    args.insert(args.begin(), "cce");
    std::istringstream in(input);
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, in, out, err);
    return {code, out.str(), err.str()};
}

// Glossary, vectors, corpus and a trained model in a temp directory, built
// once through the command line itself.
struct Fixture {
    fs::path dir;
    std::string glossary, vectors, corpus, model;

    Fixture() {
        dir = fs::temp_directory_path() / "cce_cli_test";
        fs::remove_all(dir);
        fs::create_directories(dir);
        glossary = (dir / "glossary.tsv").string();
        vectors = (dir / "vectors.txt").string();
        corpus = (dir / "queries.tsv").string();
        model = (dir / "model.bin").string();
        write_file(glossary,
                   "Fever_1\tSymptom\tfever\nDoubleVision_2\tSymptom\tdouble vision\nLegBurn_3\tInjury\tleg burn\n"
                   "Child_4\tAge\tchild\nJointPain_5\tSymptom\tjoint pain\n");
        REQUIRE(cli({"vectors", "--glossary", glossary, "--dim", "8", "--seed", "3", "--out", vectors}).code == 0);
        REQUIRE(cli({"synthesize", "--glossary", glossary, "--count", "60", "--seed", "1", "--max-terms", "3", "--out",
                     corpus})
                    .code == 0);
        REQUIRE(cli({"train", "--train", corpus, "--vectors", vectors, "--model-out", model, "--hidden-size", "8",
                     "--batch", "4", "--epochs", "25", "--seed", "2"})
                    .code == 0);
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

std::string path_in(const std::string& name) { return (fixture().dir / name).string(); }

}  // namespace

TEST_CASE("cli usage errors exit 1") {
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"frobnicate"}).code == kExitUsage);
    CHECK(cli({"synthesize", "--glossary", "x"}).code == kExitUsage);
    CHECK(cli({"synthesize", "--glossary", "x", "--out", "y", "--mode", "poem"}).code == kExitUsage);
    const CliRun help = cli({"--help"});
    CHECK(help.code == kExitOk);
    CHECK(help.out.find("synthesize") != std::string::npos);
}

TEST_CASE("cli data errors exit 2") {
    const Fixture& f = fixture();
    const CliRun missing = cli({"query", "--model", f.model, "--vectors", "/nonexistent/v.txt", "--glossary", f.glossary, "fever"});
    CHECK(missing.code == kExitData);
    CHECK(missing.err.find("/nonexistent/v.txt") != std::string::npos);

    const std::string bad = path_in("bad.tsv");
    write_file(bad, "fever\tQ\n");
    const CliRun malformed = cli({"split", "--corpus", bad, "--out-prefix", path_in("bad")});
    CHECK(malformed.code == kExitData);
    CHECK(malformed.err.find(bad) != std::string::npos);

    CHECK(cli({"query", "--model", f.glossary, "--vectors", f.vectors, "--glossary", f.glossary, "fever"}).code == kExitData);
}

TEST_CASE("cli synthesize is reproducible and mode shaped") {
    const Fixture& f = fixture();
    const std::string a = path_in("q1.tsv"), b = path_in("q2.tsv"), n = path_in("n.tsv");
    REQUIRE(cli({"synthesize", "--glossary", f.glossary, "--count", "50", "--seed", "9", "--out", a}).code == 0);
    REQUIRE(cli({"synthesize", "--glossary", f.glossary, "--count", "50", "--seed", "9", "--out", b}).code == 0);
    CHECK(read_file(a) == read_file(b));

    const Corpus queries = parse_corpus(read_file(a));
    CHECK(queries.size() == 50);
    for (const auto& s : queries.sentences) {
        CHECK(std::count(s.tags.begin(), s.tags.end(), BioTag::O) == 0);
    }

    REQUIRE(cli({"synthesize", "--glossary", f.glossary, "--mode", "note", "--count", "50", "--seed", "9", "--out", n})
                .code == 0);
    const Corpus notes = parse_corpus(read_file(n));
    CHECK(notes.size() == 50);
    for (const auto& s : notes.sentences) {
        CHECK(std::count(s.tags.begin(), s.tags.end(), BioTag::O) >= 1);
        CHECK(std::count(s.tags.begin(), s.tags.end(), BioTag::B) >= 1);
    }
}

TEST_CASE("cli split writes a 7:2:1 partition") {
    const Fixture& f = fixture();
    const std::string prefix = path_in("parts");
    const CliRun r = cli({"split", "--corpus", f.corpus, "--seed", "4", "--out-prefix", prefix});
    REQUIRE(r.code == 0);
    CHECK(r.out == "train 42, dev 12, test 6\n");
    CHECK(parse_corpus(read_file(prefix + ".train")).size() == 42);
}

TEST_CASE("cli tag, query and eval") {
    const Fixture& f = fixture();
    const CliRun tagged = cli({"tag", "--model", f.model, "--vectors", f.vectors, "fever child"});
    REQUIRE(tagged.code == 0);
    CHECK(tagged.out.starts_with("fever/"));

    const std::vector<std::string> base = {"query", "--model", f.model, "--vectors", f.vectors, "--glossary", f.glossary};
    auto with = [&](std::vector<std::string> extra) {
        std::vector<std::string> args = base;
        args.insert(args.end(), extra.begin(), extra.end());
        return args;
    };
    const CliRun human = cli(with({"fever double vision"}));
    const CliRun json = cli(with({"--json", "fever double vision"}));
    REQUIRE(human.code == 0);
    REQUIRE(json.code == 0);
    CHECK(human.out.starts_with("query: fever double vision\n"));
    const auto j = nlohmann::json::parse(json.out);
    CHECK(j["version"] == "1");
    CHECK(j["query"] == "fever double vision");
    REQUIRE(j["entities"].is_array());
    std::size_t listed = 0;
    for (const auto& e : j["entities"]) {
        CHECK(human.out.find("entity " + std::to_string(++listed) + ": " + e["text"].get<std::string>()) !=
              std::string::npos);
        for (const auto& m : e["matches"]) {
            CHECK(human.out.find("('" + m["cid"].get<std::string>() + "', '" + m["type"].get<std::string>() + "', ") !=
                  std::string::npos);
        }
    }

    const CliRun top1 = cli(with({"--json", "--top-k", "1", "fever double vision"}));
    for (const auto& e : nlohmann::json::parse(top1.out)["entities"]) CHECK(e["matches"].size() <= 1);
    CHECK(cli(with({"--top-k", "0", "fever"})).code == kExitUsage);

    const CliRun lines = cli(with({"--json"}), "fever\n\n   \nchild\n");
    REQUIRE(lines.code == 0);
    CHECK(split_fields(lines.out, '\n').size() == 3);
    CHECK(cli(with({"--json"}), "fever\n").out == cli(with({"--json"}), "fever\n").out);

    const std::string report = path_in("eval.json");
    const CliRun ev = cli({"eval", "--model", f.model, "--vectors", f.vectors, "--corpus", f.corpus, "--report", report});
    REQUIRE(ev.code == 0);
    const auto rj = nlohmann::json::parse(read_file(report));
    CHECK(rj["micro_f1"].get<double>() >= 0.0);
    CHECK(rj["mode"] == "span");
}

TEST_CASE("http service") {
    const Fixture& f = fixture();
    const Engine engine(load_model(f.model), load_vectors(read_file(f.vectors)), parse_glossary(read_file(f.glossary)),
                        MatcherConfig{});
    auto server = make_server(engine);
    const int port = server->bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread worker([&] { server->listen_after_bind(); });
    server->wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    const auto health = client.Get("/health");
    REQUIRE(health);
    CHECK(health->status == 200);
    CHECK(nlohmann::json::parse(health->body)["status"] == "ok");

    const auto ok = client.Post("/query", R"({"text":"fever"})", "application/json");
    REQUIRE(ok);
    CHECK(ok->status == 200);
    CHECK(ok->body == format_json(engine.run("fever")));

    const auto missing = client.Post("/query", "{}", "application/json");
    REQUIRE(missing);
    CHECK(missing->status == 400);
    CHECK(nlohmann::json::parse(missing->body).contains("error"));
    CHECK(client.Post("/query", "not json", "application/json")->status == 400);
    CHECK(client.Post("/query", R"({"text":"  "})", "application/json")->status == 400);
    CHECK(client.Post("/query", R"({"text":3})", "application/json")->status == 400);

    std::vector<std::future<std::string>> replies;
    for (int i = 0; i < 8; ++i) {
        replies.push_back(std::async(std::launch::async, [port] {
            httplib::Client c("127.0.0.1", port);
            const auto r = c.Post("/query", R"({"text":"child double vision leg burn"})", "application/json");
            return r && r->status == 200 ? r->body : std::string("failed");
        }));
    }
    const std::string first = replies[0].get();
    CHECK(first != "failed");
    for (std::size_t i = 1; i < replies.size(); ++i) CHECK(replies[i].get() == first);

    server->stop();
    worker.join();
}
