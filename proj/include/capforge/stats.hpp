#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_set>

#include "capforge/corpus.hpp"

namespace capforge {

using Dictionary = std::unordered_set<std::string>;

Dictionary load_dictionary(const std::string& path);

struct CorpusStats {
    uint64_t total_captions = 0;
    uint64_t total_tokens = 0;
    uint64_t unique_words = 0;
    uint64_t one_time_words = 0;
    double misspelled_token_ratio = 0.0;   // out-of-dictionary token occurrences / total tokens
    double misspelled_caption_ratio = 0.0; // captions with >= 1 out-of-dictionary token
    double duplicate_caption_ratio = 0.0;  // duplicates within one image's caption list
    double corpus_duplicate_ratio = 0.0;   // duplicates across the whole corpus
    std::map<uint64_t, uint64_t> repetition_histogram; // occurrence count -> unique words
};

enum class Direction { improved, worsened, unchanged, neutral };

struct StatsComparison {
    CorpusStats left;
    CorpusStats right;

    int64_t unique_words_delta = 0;
    int64_t one_time_words_delta = 0;
    double misspelled_token_ratio_delta = 0.0;
    double duplicate_caption_ratio_delta = 0.0;

    Direction unique_words_dir = Direction::unchanged;
    Direction one_time_words_dir = Direction::neutral; // polarity deliberately unassigned
    Direction misspelled_dir = Direction::unchanged;
    Direction duplicate_dir = Direction::unchanged;
};

CorpusStats compute_stats(const Corpus& corpus, const Dictionary& dictionary);
std::string repetition_histogram_csv(const CorpusStats& stats);
StatsComparison compare_stats(const CorpusStats& left, const CorpusStats& right);

const char* direction_name(Direction d);

} // namespace capforge
