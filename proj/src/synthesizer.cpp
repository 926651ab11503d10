#include "cce/synthesizer.hpp"

#include <algorithm>
#include <numeric>

#include "cce/error.hpp"
#include "cce/text.hpp"

namespace cce {

namespace {

constexpr std::string_view kSlot = "{E}";

// Keep in sync with data/note_templates.txt (checked by a unit test).
const char* const kDefaultTemplates[] = {
    "patient reports {E} today .",
    "patient presents with {E} .",
    "history of {E} noted .",
    "{E} was observed on exam .",
    "complains of {E} and {E} .",
    "denies {E} .",
    "no evidence of {E} .",
    "mother reports {E} for two days .",
    "exam shows {E} , {E} .",
    "he was treated for {E} last year .",
    "she has {E} .",
    "positive for {E} .",
    "the rash appeared with {E} .",
    "follow up for {E} in one week .",
    "significant for {E} and {E} .",
    "{E} improved after treatment .",
    "the patient denies {E} but reports {E} .",
    "assessment : {E} .",
    "plan : monitor {E} .",
    "ruled out {E} .",
    "no {E} or {E} .",
    "noted {E} on the left side .",
    "he describes {E} since yesterday .",
    "{E} is stable .",
    "findings consistent with {E} .",
    "complaint of {E} with {E} .",
    "the child has {E} .",
    "recent onset of {E} .",
    "worsening {E} over the past week .",
    "reports mild {E} .",
};

// Template pieces: a slot, or one filler token.
struct Piece {
    bool slot = false;
    std::string word;
};

std::vector<Piece> compile_template(std::string_view tmpl) {
    std::vector<Piece> pieces;
    bool has_slot = false;
    bool has_filler = false;
    for (const std::string& chunk : split_whitespace(tmpl)) {
        if (chunk == kSlot) {
            pieces.push_back({true, {}});
            has_slot = true;
            continue;
        }
        if (chunk.find(kSlot) != std::string::npos) {
            throw BadTemplate("entity slot must be a separate word: '" + std::string(tmpl) + "'");
        }
        for (std::string& w : tokenize(chunk)) {
            pieces.push_back({false, std::move(w)});
            has_filler = true;
        }
    }
    if (!has_slot) throw BadTemplate("template has no {E} slot: '" + std::string(tmpl) + "'");
    if (!has_filler) throw BadTemplate("template has no filler words: '" + std::string(tmpl) + "'");
    return pieces;
}

void append_term(const GlossaryTerm& term, std::vector<std::string>& words, std::vector<BioTag>& tags) {
    for (std::size_t i = 0; i < term.words.size(); ++i) {
        words.push_back(term.words[i]);
        tags.push_back(i == 0 ? BioTag::B : BioTag::I);
    }
}

// First `k` entries of a partial Fisher-Yates shuffle over term ids.
std::vector<std::size_t> sample_distinct(std::size_t n, std::size_t k, Rng& rng) {
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), std::size_t{0});
    k = std::min(k, n);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(ids[i], ids[j]);
    }
    ids.resize(k);
    return ids;
}

}  // namespace

Glossary::Glossary(std::vector<GlossaryTerm> terms) : terms_(std::move(terms)) {
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (!by_cid_.emplace(terms_[i].cid, i).second) {
            throw DataError("duplicate cid '" + terms_[i].cid + "'");
        }
        if (terms_[i].words.empty()) throw DataError("term '" + terms_[i].cid + "' has no words");
    }
}

std::size_t Glossary::find(std::string_view cid) const {
    const auto it = by_cid_.find(std::string(cid));
    return it == by_cid_.end() ? npos : it->second;
}

GlossaryTerm make_term(std::string cid, std::string concept_type, std::string text) {
    GlossaryTerm t{std::move(cid), std::move(concept_type), std::move(text), {}};
    t.words = tokenize(t.text);
    return t;
}

Glossary parse_glossary(std::string_view text) {
    std::vector<GlossaryTerm> terms;
    std::unordered_map<std::string, std::size_t> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string_view line = chomp(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;

        auto fields = split_fields(line, '\t');
        if (fields.size() != 3) throw MalformedLine(line_no, "expected <cid>\\t<type>\\t<text>");
        if (fields[0].empty()) throw MalformedLine(line_no, "empty cid");
        if (!seen.emplace(fields[0], line_no).second) {
            throw MalformedLine(line_no, "duplicate cid '" + fields[0] + "'");
        }
        GlossaryTerm term = make_term(std::move(fields[0]), std::move(fields[1]), std::move(fields[2]));
        if (term.words.empty()) throw MalformedLine(line_no, "empty term text");
        terms.push_back(std::move(term));
    }
    return Glossary(std::move(terms));
}

std::string serialize_glossary(const Glossary& glossary) {
    std::string out;
    for (const auto& t : glossary.terms()) {
        out += t.cid + '\t' + t.concept_type + '\t' + t.text + '\n';
    }
    return out;
}

TaggedSentence synthesize_query(const Glossary& glossary, Rng& rng, const SynthesisConfig& config) {
    if (glossary.empty()) throw EmptyGlossary();
    if (config.min_terms < 1 || config.min_terms > config.max_terms) {
        throw DataError("need 1 <= min_terms <= max_terms");
    }
    const auto k = static_cast<std::size_t>(rng.between(static_cast<std::int64_t>(config.min_terms),
                                                        static_cast<std::int64_t>(config.max_terms)));
    std::vector<std::string> words;
    std::vector<BioTag> tags;
    for (std::size_t id : sample_distinct(glossary.size(), k, rng)) append_term(glossary[id], words, tags);
    return make_sentence(words, std::move(tags), Provenance::query_style);
}

Corpus synthesize_query_corpus(const Glossary& glossary, const SynthesisConfig& config) {
    if (glossary.empty()) throw EmptyGlossary();
    Corpus corpus;
    corpus.name = "synthetic_queries";
    corpus.sentences.reserve(config.count);
    Rng rng(config.seed);
    for (std::size_t i = 0; i < config.count; ++i) corpus.sentences.push_back(synthesize_query(glossary, rng, config));
    return corpus;
}

std::vector<std::string> parse_templates(std::string_view text) {
    std::vector<std::string> out;
    for (const std::string& raw : split_fields(text, '\n')) {
        const std::string_view line = chomp(raw);
        if (split_whitespace(line).empty() || line.front() == '#') continue;
        compile_template(line);
        out.emplace_back(line);
    }
    return out;
}

const std::vector<std::string>& default_note_templates() {
    static const std::vector<std::string> templates(std::begin(kDefaultTemplates), std::end(kDefaultTemplates));
    return templates;
}

Corpus synthesize_note_corpus(const Glossary& glossary, const std::vector<std::string>& templates,
                              const SynthesisConfig& config) {
    if (templates.empty()) throw BadTemplate("no templates given");
    std::vector<std::vector<Piece>> compiled;
    compiled.reserve(templates.size());
    for (const auto& t : templates) compiled.push_back(compile_template(t));
    if (glossary.empty()) throw EmptyGlossary();

    Corpus corpus;
    corpus.name = "synthetic_notes";
    corpus.sentences.reserve(config.count);
    Rng rng(config.seed);
    for (std::size_t s = 0; s < config.count; ++s) {
        const auto& pieces = compiled[static_cast<std::size_t>(rng.below(compiled.size()))];
        const auto slots = static_cast<std::size_t>(
            std::count_if(pieces.begin(), pieces.end(), [](const Piece& p) { return p.slot; }));
        std::vector<std::size_t> ids = sample_distinct(glossary.size(), slots, rng);
        while (ids.size() < slots) ids.push_back(static_cast<std::size_t>(rng.below(glossary.size())));

        std::vector<std::string> words;
        std::vector<BioTag> tags;
        std::size_t next = 0;
        for (const Piece& p : pieces) {
            if (p.slot) {
                append_term(glossary[ids[next++]], words, tags);
            } else {
                words.push_back(p.word);
                tags.push_back(BioTag::O);
            }
        }
        corpus.sentences.push_back(make_sentence(words, std::move(tags), Provenance::note_style));
    }
    return corpus;
}

}  // namespace cce
