#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "cce/corpus.hpp"
#include "cce/error.hpp"
#include "support.hpp"

using namespace cce;
using cce::testing::random_bio;

namespace {

constexpr BioTag B = BioTag::B;
constexpr BioTag I = BioTag::I;
constexpr BioTag O = BioTag::O;

Corpus numbered_corpus(std::size_t n) {
    Corpus c;
    for (std::size_t i = 0; i < n; ++i) c.sentences.push_back(make_sentence({"s" + std::to_string(i)}, {B}));
    return c;
}

std::multiset<std::string> first_words(const Corpus& c) {
    std::multiset<std::string> out;
    for (const auto& s : c.sentences) out.insert(s.tokens.front().text);
    return out;
}

}  // namespace

TEST_CASE("parse_corpus examples") {
    const Corpus one = parse_corpus("fever\tB\n\n");
    REQUIRE(one.size() == 1);
    CHECK(one.sentences[0].tags == std::vector<BioTag>{B});
    CHECK(one.sentences[0].tokens[0] == Token{"fever", 0});

    CHECK(parse_corpus("the\tO\npatient\tO\n\n").empty());
    CHECK_THROWS_AS(parse_corpus("joint\tI\npain\tI\n\n"), InvalidBio);
}

TEST_CASE("parse_corpus errors carry positions") {
    try {
        parse_corpus("a\tB\n\nb\tO\nc\tX\n");
        FAIL("expected MalformedLine");
    } catch (const MalformedLine& e) {
        CHECK(e.line() == 4);
    }
    CHECK_THROWS_AS(parse_corpus("a\tB\textra\n"), MalformedLine);
    CHECK_THROWS_AS(parse_corpus("lonely\n"), MalformedLine);
    CHECK_THROWS_AS(parse_corpus("\tB\n"), MalformedLine);
    try {
        parse_corpus("a\tB\n\nb\tO\nc\tI\n\n");
        FAIL("expected InvalidBio");
    } catch (const InvalidBio& e) {
        CHECK(e.sentence() == 2);
    }
}

TEST_CASE("parse_corpus details") {
    SUBCASE("final blank line optional, CRLF accepted") {
        const Corpus c = parse_corpus("a\tB\r\nb\tI\r\n\r\nc\tB");
        REQUIRE(c.size() == 2);
        CHECK(c.sentences[0].words() == std::vector<std::string>{"a", "b"});
        CHECK(c.sentences[1].tags == std::vector<BioTag>{B});
    }
    SUBCASE("provenance header") {
        const Corpus c = parse_corpus("#provenance: query_style\nfever\tB\n\n");
        CHECK(c.sentences[0].provenance == Provenance::query_style);
        CHECK_THROWS_AS(parse_corpus("#provenance: poetry\n"), MalformedLine);
    }
    SUBCASE("multiple blank lines separate once") {
        CHECK(parse_corpus("a\tB\n\n\n\nb\tB\n").size() == 2);
    }
}

TEST_CASE("serialize/parse round trip") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        Corpus c;
        c.name = "rt";
        const auto prov = trial % 2 ? Provenance::note_style : Provenance::query_style;
        const std::size_t sentences = 1 + rng.below(6);
        while (c.size() < sentences) {
            const std::size_t n = 1 + rng.below(8);
            auto tags = random_bio(rng, n);
            if (std::none_of(tags.begin(), tags.end(), [](BioTag t) { return t != O; })) continue;
            c.sentences.push_back(make_sentence(cce::testing::numbered_words(n, "t"), tags, prov));
        }
        CHECK(parse_corpus(serialize_corpus(c), "rt") == c);
    }
}

TEST_CASE("split_sizes") {
    const SplitSpec spec{};
    CHECK(split_sizes(10, spec) == std::array<std::size_t, 3>{7, 2, 1});
    CHECK(split_sizes(9, spec) == std::array<std::size_t, 3>{7, 1, 1});
    CHECK(split_sizes(1, spec) == std::array<std::size_t, 3>{1, 0, 0});
    CHECK(split_sizes(2, spec) == std::array<std::size_t, 3>{1, 1, 0});
    CHECK(split_sizes(3, spec) == std::array<std::size_t, 3>{1, 1, 1});
    CHECK(split_sizes(1000, spec) == std::array<std::size_t, 3>{700, 200, 100});
}

TEST_CASE("split examples") {
    const Corpus c = numbered_corpus(10);
    const SplitCorpus a = split(c, {7, 2, 1, 42});
    CHECK(a.train.size() == 7);
    CHECK(a.dev.size() == 2);
    CHECK(a.test.size() == 1);
    const SplitCorpus b = split(c, {7, 2, 1, 42});
    CHECK(a.train == b.train);
    CHECK(a.dev == b.dev);
    CHECK(a.test == b.test);
    const SplitCorpus other = split(c, {7, 2, 1, 43});
    CHECK_FALSE((other.train == a.train && other.dev == a.dev));
    CHECK_THROWS_AS(split(Corpus{}, {}), EmptyCorpus);
}

TEST_CASE("split is a partition for every size 1..1000") {
    for (std::size_t n = 1; n <= 1000; ++n) {
        const Corpus c = numbered_corpus(n);
        const SplitCorpus s = split(c, {7, 2, 1, n});
        const auto sizes = split_sizes(n, {});
        REQUIRE(s.train.size() == sizes[0]);
        REQUIRE(s.dev.size() == sizes[1]);
        REQUIRE(s.test.size() == sizes[2]);
        auto all = first_words(s.train);
        for (const auto& w : first_words(s.dev)) all.insert(w);
        for (const auto& w : first_words(s.test)) all.insert(w);
        REQUIRE(all == first_words(c));
    }
}

TEST_CASE("merge_hybrid") {
    auto tagged = [](std::size_t n, Provenance p, const std::string& prefix) {
        Corpus c;
        for (std::size_t i = 0; i < n; ++i) {
            c.sentences.push_back(make_sentence({prefix + std::to_string(i)}, {B}, p));
        }
        return c;
    };
    SplitCorpus a{tagged(70, Provenance::note_style, "n"), tagged(20, Provenance::note_style, "nd"),
                  tagged(10, Provenance::note_style, "nt")};
    SplitCorpus b{tagged(30, Provenance::query_style, "q"), tagged(9, Provenance::query_style, "qd"),
                  tagged(4, Provenance::query_style, "qt")};
    const SplitCorpus h = merge_hybrid(a, b, 3);
    CHECK(h.train.size() == 100);
    auto expected = first_words(a.train);
    for (const auto& w : first_words(b.train)) expected.insert(w);
    CHECK(first_words(h.train) == expected);

    std::map<Provenance, std::size_t> dev_counts;
    for (const auto& s : h.dev.sentences) ++dev_counts[s.provenance];
    CHECK(dev_counts[Provenance::note_style] == 20);
    CHECK(dev_counts[Provenance::query_style] == 9);
    CHECK(h.test.size() == 14);

    const SplitCorpus alone = merge_hybrid(a, SplitCorpus{}, 3);
    CHECK(first_words(alone.train) == first_words(a.train));
    CHECK(alone.train.size() == a.train.size());

    const SplitCorpus again = merge_hybrid(a, b, 3);
    CHECK(again.train == h.train);
}

TEST_CASE("extract_entities examples") {
    const auto s = make_sentence({"double", "vision", "dizziness", "fever"}, {B, I, B, B});
    const auto spans = extract_entities(s);
    REQUIRE(spans.size() == 3);
    CHECK(spans[0] == EntitySpan{0, 2, "double vision"});
    CHECK(spans[1] == EntitySpan{2, 3, "dizziness"});
    CHECK(spans[2] == EntitySpan{3, 4, "fever"});

    CHECK(extract_entities(make_sentence({"a", "b"}, {O, O})).empty());

    const auto orphan = make_sentence({"x", "y", "z"}, {O, I, I});
    const auto lenient = extract_entities(orphan, DecodeMode::lenient);
    REQUIRE(lenient.size() == 1);
    CHECK(lenient[0].start == 1);
    CHECK(lenient[0].end == 3);
    CHECK_THROWS_AS(extract_entities(orphan, DecodeMode::strict), InvalidBio);
}

TEST_CASE("repair_bio") {
    CHECK(repair_bio({I, I, O, I, B, I}) == std::vector<BioTag>{B, I, O, B, B, I});
    CHECK(is_valid_bio(repair_bio({I})));
}

TEST_CASE("extract then encode reproduces valid tags") {
    Rng rng(17);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = rng.below(12);
        const auto tags = random_bio(rng, n);
        REQUIRE(is_valid_bio(tags));
        const auto s = make_sentence(cce::testing::numbered_words(n), tags);
        CHECK(encode_spans(extract_entities(s, DecodeMode::strict), n) == tags);
    }
}
