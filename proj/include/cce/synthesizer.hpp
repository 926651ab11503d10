#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cce/corpus.hpp"
#include "cce/rng.hpp"

namespace cce {

struct GlossaryTerm {
    std::string cid;
    std::string concept_type;
    std::string text;
    std::vector<std::string> words;  // tokenize(text)

    bool operator==(const GlossaryTerm&) const = default;
};

/// Terms in file order; a term's id is its position.
class Glossary {
public:
    Glossary() = default;
    explicit Glossary(std::vector<GlossaryTerm> terms);

    const std::vector<GlossaryTerm>& terms() const { return terms_; }
    const GlossaryTerm& operator[](std::size_t id) const { return terms_[id]; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }

    /// Id for a cid, or npos.
    std::size_t find(std::string_view cid) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::vector<GlossaryTerm> terms_;
    std::unordered_map<std::string, std::size_t> by_cid_;
};

GlossaryTerm make_term(std::string cid, std::string concept_type, std::string text);

/// `<cid>\t<concept_type>\t<term text>` per line; blank lines and `#` comments
/// are skipped. Duplicate cids and empty terms are MalformedLine errors.
Glossary parse_glossary(std::string_view text);
std::string serialize_glossary(const Glossary& glossary);

struct SynthesisConfig {
    std::size_t min_terms = 1;
    std::size_t max_terms = 5;
    std::size_t count = 0;
    std::uint64_t seed = 0;
};

/// One query-style sentence: k distinct terms in random order, concatenated
/// with no separators, each tagged B I*.
TaggedSentence synthesize_query(const Glossary& glossary, Rng& rng, const SynthesisConfig& config);

Corpus synthesize_query_corpus(const Glossary& glossary, const SynthesisConfig& config);

/// Templates are whitespace-separated words with `{E}` marking entity slots.
/// Every template needs at least one slot and one filler word.
std::vector<std::string> parse_templates(std::string_view text);

/// Built-in note-style templates (same content as data/note_templates.txt).
const std::vector<std::string>& default_note_templates();

/// Note-style sentences: a uniformly chosen template with each `{E}` filled by
/// a glossary term (distinct within a sentence while the glossary allows).
Corpus synthesize_note_corpus(const Glossary& glossary, const std::vector<std::string>& templates,
                              const SynthesisConfig& config);

}  // namespace cce
