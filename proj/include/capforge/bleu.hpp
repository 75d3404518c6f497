#pragma once

#include <string>
#include <vector>

namespace capforge {

struct BleuScore {
    double score = 0.0;
    double brevity_penalty = 0.0;
    std::vector<double> ngram_precision; // index 0 = unigram
    int candidate_len = 0;
    int effective_reference_len = 0;
};

// Corpus BLEU with uniform n-gram weights, clipped counts and the closest
// reference length for the brevity penalty. No smoothing: a zero n-gram
// precision zeroes the score.
BleuScore bleu_corpus(const std::vector<std::vector<std::string>>& candidates,
                      const std::vector<std::vector<std::vector<std::string>>>& references,
                      int max_n = 4);

} // namespace capforge
