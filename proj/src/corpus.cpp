#include "cce/corpus.hpp"

#include <algorithm>

#include "cce/error.hpp"
#include "cce/rng.hpp"
#include "cce/text.hpp"

namespace cce {

char tag_char(BioTag t) {
    switch (t) {
        case BioTag::B: return 'B';
        case BioTag::I: return 'I';
        case BioTag::O: return 'O';
    }
    return '?';
}

bool parse_tag(std::string_view s, BioTag& out) {
    if (s == "B") out = BioTag::B;
    else if (s == "I") out = BioTag::I;
    else if (s == "O") out = BioTag::O;
    else return false;
    return true;
}

std::string_view provenance_name(Provenance p) {
    switch (p) {
        case Provenance::note_style: return "note_style";
        case Provenance::query_style: return "query_style";
        case Provenance::unknown: break;
    }
    return "unknown";
}

std::vector<std::string> TaggedSentence::words() const {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(t.text);
    return out;
}

bool TaggedSentence::has_entity() const {
    return std::any_of(tags.begin(), tags.end(), [](BioTag t) { return t != BioTag::O; });
}

TaggedSentence make_sentence(const std::vector<std::string>& words, std::vector<BioTag> tags,
                             Provenance provenance) {
    TaggedSentence s;
    s.tokens.reserve(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) s.tokens.push_back({words[i], i});
    s.tags = std::move(tags);
    s.provenance = provenance;
    return s;
}

bool is_valid_bio(const std::vector<BioTag>& tags) {
    BioTag prev = BioTag::O;
    for (BioTag t : tags) {
        if (t == BioTag::I && prev == BioTag::O) return false;
        prev = t;
    }
    return true;
}

Corpus parse_corpus(std::string_view text, std::string name) {
    Corpus corpus;
    corpus.name = std::move(name);
    Provenance provenance = Provenance::unknown;

    std::vector<std::string> words;
    std::vector<BioTag> tags;
    std::size_t sentence_no = 0;

    auto flush = [&] {
        if (words.empty()) return;
        ++sentence_no;
        if (!is_valid_bio(tags)) throw InvalidBio(sentence_no);
        TaggedSentence s = make_sentence(words, std::move(tags), provenance);
        if (s.has_entity()) corpus.sentences.push_back(std::move(s));
        words.clear();
        tags.clear();
    };

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string_view line = chomp(text.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;

        if (line.empty()) {
            flush();
            continue;
        }
        if (line.front() == '#') {
            constexpr std::string_view key = "#provenance:";
            if (line.substr(0, key.size()) == key) {
                std::string value = join(split_whitespace(line.substr(key.size())), "");
                if (value == "note_style") provenance = Provenance::note_style;
                else if (value == "query_style") provenance = Provenance::query_style;
                else if (value == "unknown") provenance = Provenance::unknown;
                else throw MalformedLine(line_no, "unknown provenance '" + value + "'");
            }
            continue;
        }
        const auto fields = split_fields(line, '\t');
        if (fields.size() != 2) throw MalformedLine(line_no, "expected <token>\\t<tag>");
        BioTag tag;
        if (!parse_tag(fields[1], tag)) throw MalformedLine(line_no, "unknown tag '" + fields[1] + "'");
        if (fields[0].empty() || fields[0].find_first_of(" \v\f") != std::string::npos) {
            throw MalformedLine(line_no, "token must be non-empty without whitespace");
        }
        words.push_back(fields[0]);
        tags.push_back(tag);
    }
    flush();
    return corpus;
}

std::string serialize_corpus(const Corpus& corpus) {
    std::string out;
    if (!corpus.empty()) {
        const Provenance p = corpus.sentences.front().provenance;
        const bool uniform = std::all_of(corpus.sentences.begin(), corpus.sentences.end(),
                                         [p](const TaggedSentence& s) { return s.provenance == p; });
        if (uniform && p != Provenance::unknown) {
            out += "#provenance: ";
            out += provenance_name(p);
            out += '\n';
        }
    }
    for (const auto& s : corpus.sentences) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            out += s.tokens[i].text;
            out += '\t';
            out += tag_char(s.tags[i]);
            out += '\n';
        }
        out += '\n';
    }
    return out;
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitSpec& spec) {
    const std::uint64_t total =
        std::uint64_t{spec.train_parts} + spec.dev_parts + spec.test_parts;
    if (spec.train_parts == 0 || spec.dev_parts == 0 || spec.test_parts == 0) {
        throw DataError("split fractions must be positive");
    }
    std::array<std::size_t, 3> sizes{
        static_cast<std::size_t>(n * std::uint64_t{spec.train_parts} / total),
        static_cast<std::size_t>(n * std::uint64_t{spec.dev_parts} / total),
        static_cast<std::size_t>(n * std::uint64_t{spec.test_parts} / total),
    };
    sizes[0] += n - (sizes[0] + sizes[1] + sizes[2]);
    for (std::size_t k = 1; k < 3; ++k) {
        if (sizes[k] == 0 && sizes[0] > 1) {
            --sizes[0];
            ++sizes[k];
        }
    }
    return sizes;
}

SplitCorpus split(const Corpus& corpus, const SplitSpec& spec) {
    if (corpus.empty()) throw EmptyCorpus();
    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(spec.seed);
    rng.shuffle(std::span<std::size_t>(order));

    const auto sizes = split_sizes(corpus.size(), spec);
    SplitCorpus out;
    out.train.name = corpus.name + ".train";
    out.dev.name = corpus.name + ".dev";
    out.test.name = corpus.name + ".test";
    const std::array<Corpus*, 3> parts{&out.train, &out.dev, &out.test};
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t i = 0; i < sizes[k]; ++i) {
            parts[k]->sentences.push_back(corpus.sentences[order[cursor++]]);
        }
    }
    return out;
}

namespace {

Corpus concat_shuffled(const Corpus& a, const Corpus& b, Rng& rng, std::string name) {
    Corpus out;
    out.name = std::move(name);
    out.sentences.reserve(a.size() + b.size());
    out.sentences.insert(out.sentences.end(), a.sentences.begin(), a.sentences.end());
    out.sentences.insert(out.sentences.end(), b.sentences.begin(), b.sentences.end());
    rng.shuffle(std::span<TaggedSentence>(out.sentences));
    return out;
}

}  // namespace

SplitCorpus merge_hybrid(const SplitCorpus& a, const SplitCorpus& b, std::uint64_t seed) {
    Rng rng(seed);
    SplitCorpus out;
    out.train = concat_shuffled(a.train, b.train, rng, "hybrid.train");
    out.dev = concat_shuffled(a.dev, b.dev, rng, "hybrid.dev");
    out.test = concat_shuffled(a.test, b.test, rng, "hybrid.test");
    return out;
}

Corpus merge_corpora(const Corpus& a, const Corpus& b, std::uint64_t seed) {
    Rng rng(seed);
    return concat_shuffled(a, b, rng, a.name + "+" + b.name);
}

std::vector<BioTag> repair_bio(std::vector<BioTag> tags) {
    BioTag prev = BioTag::O;
    for (BioTag& t : tags) {
        if (t == BioTag::I && prev == BioTag::O) t = BioTag::B;
        prev = t;
    }
    return tags;
}

std::vector<EntitySpan> extract_entities(const TaggedSentence& sentence, DecodeMode mode) {
    if (mode == DecodeMode::strict && !is_valid_bio(sentence.tags)) throw InvalidBio(0);
    const std::vector<BioTag> tags = repair_bio(sentence.tags);

    std::vector<EntitySpan> spans;
    const std::size_t n = std::min(tags.size(), sentence.tokens.size());
    std::size_t i = 0;
    while (i < n) {
        if (tags[i] != BioTag::B) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < n && tags[j] == BioTag::I) ++j;
        EntitySpan span{i, j, {}};
        for (std::size_t t = i; t < j; ++t) {
            if (t > i) span.text += ' ';
            span.text += sentence.tokens[t].text;
        }
        spans.push_back(std::move(span));
        i = j;
    }
    return spans;
}

std::vector<BioTag> encode_spans(const std::vector<EntitySpan>& spans, std::size_t n) {
    std::vector<BioTag> tags(n, BioTag::O);
    for (const auto& s : spans) {
        for (std::size_t i = s.start; i < s.end && i < n; ++i) tags[i] = i == s.start ? BioTag::B : BioTag::I;
    }
    return tags;
}

}  // namespace cce
