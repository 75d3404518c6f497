#include "capforge/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

namespace capforge {

using nlohmann::json;

size_t Corpus::caption_count() const {
    size_t n = 0;
    for (const auto& e : entries) n += e.captions.size();
    return n;
}

static bool is_ascii_punct(unsigned char c) {
    return c < 128 && std::ispunct(c);
}

std::vector<std::string> tokenize(const std::string& raw) {
    std::vector<std::string> out;
    size_t i = 0;
    const size_t n = raw.size();
    while (i < n) {
        while (i < n && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
        size_t start = i;
        while (i < n && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
        if (i == start) continue;
        size_t b = start, e = i;
        while (b < e && is_ascii_punct(static_cast<unsigned char>(raw[b]))) ++b;
        while (e > b && is_ascii_punct(static_cast<unsigned char>(raw[e - 1]))) --e;
        if (b == e) continue;
        std::string tok = raw.substr(b, e - b);
        for (char& c : tok) {
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
        out.push_back(std::move(tok));
    }
    return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string s;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i) s += ' ';
        s += tokens[i];
    }
    return s;
}

static const json& require_field(const json& obj, const char* name, size_t image_index) {
    auto it = obj.find(name);
    if (it == obj.end()) {
        throw SchemaError("missing required field '" + std::string(name) + "' in image entry " +
                          std::to_string(image_index));
    }
    return *it;
}

Corpus parse_corpus(std::istream& in, const std::string& source_label) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& ex) {
        throw ParseError("malformed corpus document at byte " + std::to_string(ex.byte) + ": " +
                         ex.what());
    }
    if (!doc.is_object() || !doc.contains("images") || !doc["images"].is_array()) {
        throw SchemaError("corpus document must be an object with an 'images' array");
    }

    Corpus corpus;
    corpus.source_label = source_label;
    if (doc.contains("source_label") && doc["source_label"].is_string()) {
        corpus.source_label = doc["source_label"].get<std::string>();
    }

    std::unordered_set<std::string> seen_filenames;
    size_t idx = 0;
    for (const auto& img : doc["images"]) {
        if (!img.is_object()) {
            throw SchemaError("image entry " + std::to_string(idx) + " is not an object");
        }
        ImageEntry entry;
        entry.filename = require_field(img, "filename", idx).get<std::string>();
        entry.split = require_field(img, "split", idx).get<std::string>();
        if (img.contains("imgid") && img["imgid"].is_number_integer()) {
            entry.imgid = img["imgid"].get<int64_t>();
        }
        if (img.contains("scene_class") && img["scene_class"].is_string()) {
            entry.scene_class = img["scene_class"].get<std::string>();
        }
        if (!seen_filenames.insert(entry.filename).second) {
            throw SchemaError("duplicate filename '" + entry.filename + "' at image entry " +
                              std::to_string(idx));
        }

        const json& sentences = require_field(img, "sentences", idx);
        if (!sentences.is_array()) {
            throw SchemaError("'sentences' of image entry " + std::to_string(idx) +
                              " is not an array");
        }
        std::unordered_set<int64_t> seen_sentids;
        for (const auto& sent : sentences) {
            Caption cap;
            auto raw_it = sent.find("raw");
            if (raw_it == sent.end() || !raw_it->is_string()) {
                throw SchemaError("missing required field 'raw' in image entry " +
                                  std::to_string(idx));
            }
            auto sid_it = sent.find("sentid");
            if (sid_it == sent.end() || !sid_it->is_number_integer()) {
                throw SchemaError("missing required field 'sentid' in image entry " +
                                  std::to_string(idx));
            }
            cap.raw = raw_it->get<std::string>();
            cap.sentid = sid_it->get<int64_t>();
            if (!seen_sentids.insert(cap.sentid).second) {
                throw SchemaError("duplicate sentid " + std::to_string(cap.sentid) +
                                  " in image entry " + std::to_string(idx));
            }
            cap.tokens = tokenize(cap.raw);
            entry.captions.push_back(std::move(cap));
        }
        if (entry.captions.size() != 5) {
            corpus.warnings.push_back("image '" + entry.filename + "' has " +
                                      std::to_string(entry.captions.size()) +
                                      " captions (expected 5)");
        }
        corpus.entries.push_back(std::move(entry));
        ++idx;
    }
    return corpus;
}

Corpus parse_corpus_file(const std::string& path, const std::string& source_label) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open corpus file: " + path);
    return parse_corpus(in, source_label);
}

Corpus parse_corpus_string(const std::string& text, const std::string& source_label) {
    std::istringstream in(text);
    return parse_corpus(in, source_label);
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
    json doc;
    doc["source_label"] = corpus.source_label;
    doc["images"] = json::array();
    for (const auto& entry : corpus.entries) {
        json img;
        img["filename"] = entry.filename;
        img["split"] = entry.split;
        if (entry.imgid) img["imgid"] = *entry.imgid;
        if (entry.scene_class) img["scene_class"] = *entry.scene_class;
        img["sentences"] = json::array();
        for (const auto& cap : entry.captions) {
            json sent;
            sent["raw"] = cap.raw;
            sent["sentid"] = cap.sentid;
            sent["tokens"] = cap.tokens;
            img["sentences"].push_back(std::move(sent));
        }
        doc["images"].push_back(std::move(img));
    }
    out << doc.dump(1) << '\n';
    if (!out) throw std::runtime_error("failed to write corpus output");
}

void write_corpus_file(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    write_corpus(corpus, out);
}

std::string write_corpus_string(const Corpus& corpus) {
    std::ostringstream out;
    write_corpus(corpus, out);
    return out.str();
}

int Vocab::encode(const std::string& token) const {
    auto it = token_to_id.find(token);
    return it == token_to_id.end() ? kUnk : it->second;
}

const std::string& Vocab::decode(int id) const {
    return id_to_token.at(static_cast<size_t>(id));
}

std::vector<int> Vocab::encode_caption(const std::vector<std::string>& tokens) const {
    std::vector<int> ids;
    ids.reserve(tokens.size() + 2);
    ids.push_back(kStart);
    for (const auto& t : tokens) ids.push_back(encode(t));
    ids.push_back(kEnd);
    return ids;
}

Vocab build_vocab(const Corpus& corpus, int min_count) {
    if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
    std::map<std::string, int64_t> freq;
    for (const auto& entry : corpus.entries) {
        for (const auto& cap : entry.captions) {
            for (const auto& tok : cap.tokens) ++freq[tok];
        }
    }
    std::vector<std::pair<std::string, int64_t>> kept;
    for (const auto& [tok, n] : freq) {
        if (n >= min_count) kept.emplace_back(tok, n);
    }
    // Descending frequency, ties lexicographic.
    std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocab vocab;
    vocab.min_count = min_count;
    vocab.id_to_token = {"<pad>", "<start>", "<end>", "<unk>"};
    for (const auto& [tok, n] : kept) vocab.id_to_token.push_back(tok);
    for (size_t i = 0; i < vocab.id_to_token.size(); ++i) {
        vocab.token_to_id[vocab.id_to_token[i]] = static_cast<int>(i);
    }
    return vocab;
}

} // namespace capforge
