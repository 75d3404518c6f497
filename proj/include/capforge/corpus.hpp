#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace capforge {

struct Caption {
    int64_t sentid = 0;
    std::string raw;
    std::vector<std::string> tokens;

    bool operator==(const Caption&) const = default;
};

struct ImageEntry {
    std::string filename;
    std::string split;                      // train | val | test
    std::optional<std::string> scene_class; // absent in some dataset variants
    std::optional<int64_t> imgid;
    std::vector<Caption> captions;

    bool operator==(const ImageEntry&) const = default;
};

struct Corpus {
    std::vector<ImageEntry> entries;
    std::string source_label = "original";
    std::vector<std::string> warnings; // non-fatal parse diagnostics

    bool operator==(const Corpus& o) const {
        return entries == o.entries && source_label == o.source_label;
    }
    size_t caption_count() const;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Lowercase, whitespace split, ASCII punctuation stripped from token edges.
// Internal hyphens and apostrophes survive; tokens that strip to nothing are dropped.
std::vector<std::string> tokenize(const std::string& raw);
std::string join_tokens(const std::vector<std::string>& tokens);

Corpus parse_corpus(std::istream& in, const std::string& source_label = "original");
Corpus parse_corpus_file(const std::string& path, const std::string& source_label = "original");
Corpus parse_corpus_string(const std::string& text, const std::string& source_label = "original");

void write_corpus(const Corpus& corpus, std::ostream& out);
void write_corpus_file(const Corpus& corpus, const std::string& path);
std::string write_corpus_string(const Corpus& corpus);

struct Vocab {
    static constexpr int kPad = 0;
    static constexpr int kStart = 1;
    static constexpr int kEnd = 2;
    static constexpr int kUnk = 3;

    std::unordered_map<std::string, int> token_to_id;
    std::vector<std::string> id_to_token; // dense, specials first
    int min_count = 1;

    int size() const { return static_cast<int>(id_to_token.size()); }
    int encode(const std::string& token) const;
    const std::string& decode(int id) const;
    std::vector<int> encode_caption(const std::vector<std::string>& tokens) const; // wraps with <start>/<end>
};

Vocab build_vocab(const Corpus& corpus, int min_count);

} // namespace capforge
