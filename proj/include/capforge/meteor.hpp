#pragma once

#include <string>
#include <vector>

namespace capforge {

enum class MatchStage { exact, stem };

struct UnigramMatch {
    int candidate_index = 0;
    int reference_index = 0;
    MatchStage stage = MatchStage::exact;

    bool operator==(const UnigramMatch&) const = default;
};

struct Alignment {
    std::vector<UnigramMatch> matches; // sorted by candidate index
    int chunk_count = 0;
    int crossing_count = 0;
};

// Two-stage unigram alignment: exact surface match first, then Porter-stem
// match over the leftovers. Each stage maximizes cardinality, then minimizes
// crossings of the combined matching, then prefers the earliest candidate
// indices. Exhaustive search up to 12 tokens per side, beam search beyond.
Alignment align(const std::vector<std::string>& candidate,
                const std::vector<std::string>& reference);

struct MeteorScore {
    int matched = 0;
    int candidate_len = 0;
    int reference_len = 0;
    int chunk_count = 0;
    double precision = 0.0;
    double recall = 0.0;
    double fmean = 0.0;
    double penalty = 0.0;
    double score = 0.0;

    static MeteorScore from_counts(int matched, int candidate_len, int reference_len,
                                   int chunk_count);
};

// Best reference wins; ties resolved toward the first reference.
MeteorScore meteor_sentence(const std::vector<std::string>& candidate,
                            const std::vector<std::vector<std::string>>& references);

struct CorpusMeteor {
    double aggregate_score = 0.0;     // from summed counts across segments
    double mean_sentence_score = 0.0; // arithmetic mean of per-segment scores
    int total_matched = 0;
    int total_candidate_len = 0;
    int total_reference_len = 0;
    int total_chunks = 0;
    std::vector<MeteorScore> segments;
};

CorpusMeteor meteor_corpus(const std::vector<std::vector<std::string>>& candidates,
                           const std::vector<std::vector<std::vector<std::string>>>& references);

} // namespace capforge
