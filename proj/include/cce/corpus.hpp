#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cce {

/// Surface BIO labels. The CRF adds START/STOP internally; they never appear
/// in a corpus.
enum class BioTag : std::uint8_t { B = 0, I = 1, O = 2 };

inline constexpr std::size_t kNumTags = 3;

char tag_char(BioTag t);
/// Parses "B", "I" or "O"; returns false on anything else.
bool parse_tag(std::string_view s, BioTag& out);

enum class Provenance : std::uint8_t { unknown, note_style, query_style };

std::string_view provenance_name(Provenance p);

struct Token {
    std::string text;
    std::size_t index = 0;

    bool operator==(const Token&) const = default;
};

struct TaggedSentence {
    std::vector<Token> tokens;
    std::vector<BioTag> tags;
    Provenance provenance = Provenance::unknown;

    std::size_t size() const { return tokens.size(); }
    std::vector<std::string> words() const;
    bool has_entity() const;

    bool operator==(const TaggedSentence&) const = default;
};

/// Builds a sentence with token indices filled in.
TaggedSentence make_sentence(const std::vector<std::string>& words, std::vector<BioTag> tags,
                             Provenance provenance = Provenance::unknown);

/// No I at position 0 and no I directly after O.
bool is_valid_bio(const std::vector<BioTag>& tags);

struct Corpus {
    std::vector<TaggedSentence> sentences;
    std::string name;

    std::size_t size() const { return sentences.size(); }
    bool empty() const { return sentences.empty(); }

    bool operator==(const Corpus&) const = default;
};

/// Contiguous token range [start, end).
struct EntitySpan {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string text;

    bool operator==(const EntitySpan&) const = default;
};

/// Split proportions as integer parts (7:2:1 by default) so sizes are exact
/// rationals, plus the shuffle seed.
struct SplitSpec {
    std::uint32_t train_parts = 7;
    std::uint32_t dev_parts = 2;
    std::uint32_t test_parts = 1;
    std::uint64_t seed = 0;
};

struct SplitCorpus {
    Corpus train;
    Corpus dev;
    Corpus test;
};

/// Parses the two-column corpus format (token TAB tag, blank line between
/// sentences, optional `#provenance: ...` header). Sentences without any
/// entity are dropped.
Corpus parse_corpus(std::string_view text, std::string name = {});

/// Inverse of parse_corpus. A provenance header is written when every
/// sentence shares a known provenance.
std::string serialize_corpus(const Corpus& corpus);

/// Split sizes for n items: floor(n * part / total) each, remainder to train,
/// then each empty dev/test split takes one sentence from train while train
/// keeps at least one.
std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitSpec& spec);

SplitCorpus split(const Corpus& corpus, const SplitSpec& spec);

/// Per-split concatenation of a then b followed by a seeded shuffle.
SplitCorpus merge_hybrid(const SplitCorpus& a, const SplitCorpus& b, std::uint64_t seed);

/// Concatenates then shuffles two corpora with one seed.
Corpus merge_corpora(const Corpus& a, const Corpus& b, std::uint64_t seed);

enum class DecodeMode { strict, lenient };

/// Maximal B I* runs, left to right. Strict mode throws InvalidBio(0) on an
/// orphan I; lenient mode treats an orphan I as B.
std::vector<EntitySpan> extract_entities(const TaggedSentence& sentence,
                                         DecodeMode mode = DecodeMode::lenient);

/// Lenient repair of a raw tag sequence: orphan I becomes B.
std::vector<BioTag> repair_bio(std::vector<BioTag> tags);

/// Encodes spans over a sentence of length n as BIO.
std::vector<BioTag> encode_spans(const std::vector<EntitySpan>& spans, std::size_t n);

}  // namespace cce
