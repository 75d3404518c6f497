#include "capforge/stats.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace capforge {

Dictionary load_dictionary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dictionary file: " + path);
    Dictionary dict;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (!line.empty()) dict.insert(line);
    }
    return dict;
}

static bool contains_digit(const std::string& token) {
    return std::any_of(token.begin(), token.end(),
                       [](unsigned char c) { return std::isdigit(c); });
}

CorpusStats compute_stats(const Corpus& corpus, const Dictionary& dictionary) {
    if (dictionary.empty()) throw std::invalid_argument("dictionary must be non-empty");

    CorpusStats stats;
    std::unordered_map<std::string, uint64_t> freq;
    uint64_t misspelled_tokens = 0;
    uint64_t misspelled_captions = 0;
    uint64_t image_duplicates = 0;
    uint64_t corpus_duplicates = 0;
    std::unordered_set<std::string> seen_corpus_wide;

    for (const auto& entry : corpus.entries) {
        std::unordered_set<std::string> seen_in_image;
        for (const auto& cap : entry.captions) {
            ++stats.total_captions;
            if (!seen_in_image.insert(cap.raw).second) ++image_duplicates;
            if (!seen_corpus_wide.insert(cap.raw).second) ++corpus_duplicates;

            bool caption_misspelled = false;
            for (const auto& tok : cap.tokens) {
                ++stats.total_tokens;
                ++freq[tok];
                // Digit-bearing tokens are counted but never treated as misspellings.
                if (!contains_digit(tok) && !dictionary.contains(tok)) {
                    ++misspelled_tokens;
                    caption_misspelled = true;
                }
            }
            if (caption_misspelled) ++misspelled_captions;
        }
    }

    stats.unique_words = freq.size();
    for (const auto& [tok, n] : freq) ++stats.repetition_histogram[n];
    auto one = stats.repetition_histogram.find(1);
    stats.one_time_words = one == stats.repetition_histogram.end() ? 0 : one->second;

    if (stats.total_tokens > 0) {
        stats.misspelled_token_ratio =
            static_cast<double>(misspelled_tokens) / static_cast<double>(stats.total_tokens);
    }
    if (stats.total_captions > 0) {
        const double n = static_cast<double>(stats.total_captions);
        stats.misspelled_caption_ratio = static_cast<double>(misspelled_captions) / n;
        stats.duplicate_caption_ratio = static_cast<double>(image_duplicates) / n;
        stats.corpus_duplicate_ratio = static_cast<double>(corpus_duplicates) / n;
    }
    return stats;
}

std::string repetition_histogram_csv(const CorpusStats& stats) {
    std::ostringstream out;
    out << "occurrence_count,num_words\n";
    for (const auto& [count, words] : stats.repetition_histogram) {
        out << count << ',' << words << '\n';
    }
    return out.str();
}

static Direction lower_is_better(double delta) {
    if (delta < 0) return Direction::improved;
    if (delta > 0) return Direction::worsened;
    return Direction::unchanged;
}

StatsComparison compare_stats(const CorpusStats& left, const CorpusStats& right) {
    StatsComparison cmp;
    cmp.left = left;
    cmp.right = right;
    cmp.unique_words_delta =
        static_cast<int64_t>(right.unique_words) - static_cast<int64_t>(left.unique_words);
    cmp.one_time_words_delta =
        static_cast<int64_t>(right.one_time_words) - static_cast<int64_t>(left.one_time_words);
    cmp.misspelled_token_ratio_delta = right.misspelled_token_ratio - left.misspelled_token_ratio;
    cmp.duplicate_caption_ratio_delta =
        right.duplicate_caption_ratio - left.duplicate_caption_ratio;

    if (cmp.unique_words_delta > 0) cmp.unique_words_dir = Direction::improved;
    else if (cmp.unique_words_delta < 0) cmp.unique_words_dir = Direction::worsened;
    cmp.one_time_words_dir = Direction::neutral;
    cmp.misspelled_dir = lower_is_better(cmp.misspelled_token_ratio_delta);
    cmp.duplicate_dir = lower_is_better(cmp.duplicate_caption_ratio_delta);
    return cmp;
}

const char* direction_name(Direction d) {
    switch (d) {
        case Direction::improved: return "improved";
        case Direction::worsened: return "worsened";
        case Direction::unchanged: return "unchanged";
        case Direction::neutral: return "neutral";
    }
    return "unknown";
}

} // namespace capforge
