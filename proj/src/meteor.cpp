#include "capforge/meteor.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "capforge/porter.hpp"

namespace capforge {
namespace {

constexpr int kExhaustiveLimit = 12;
constexpr size_t kBeamWidth = 64;

using Pair = std::pair<int, int>; // (candidate index, reference index)

int crossings_with(const std::vector<Pair>& fixed, const std::vector<Pair>& chosen, int c, int r) {
    int n = 0;
    for (const auto& [fc, fr] : fixed) {
        if ((fc - c) * (fr - r) < 0) ++n;
    }
    for (const auto& [cc, cr] : chosen) {
        // chosen pairs always precede c
        if (cr > r) ++n;
    }
    return n;
}

// One alignment stage: maximum-cardinality matching over the stage's edges,
// minimizing crossings against fixed matches from earlier stages, with ties
// broken toward the lexicographically earliest pair list. Candidates of the
// same token class keep their references in increasing order; an exchange of
// two crossing same-class matches never hurts, so this loses no optimum.
class StageSolver {
public:
    StageSolver(const std::vector<std::vector<int>>& edges,
                const std::vector<int>& cand_class,
                int ref_count,
                const std::vector<Pair>& fixed)
        : edges_(edges), cand_class_(cand_class), fixed_(fixed) {
        ref_used_.assign(static_cast<size_t>(ref_count), false);
        for (const auto& [c, r] : fixed_) ref_used_[static_cast<size_t>(r)] = true;
        suffix_possible_.assign(edges_.size() + 1, 0);
        for (int i = static_cast<int>(edges_.size()) - 1; i >= 0; --i) {
            suffix_possible_[static_cast<size_t>(i)] =
                suffix_possible_[static_cast<size_t>(i) + 1] +
                (edges_[static_cast<size_t>(i)].empty() ? 0 : 1);
        }
    }

    std::vector<Pair> solve(bool exhaustive) {
        if (exhaustive) {
            best_found_ = false;
            std::vector<Pair> chosen;
            std::map<int, int> last_ref;
            dfs(0, chosen, 0, last_ref);
            return best_pairs_;
        }
        return beam();
    }

private:
    const std::vector<std::vector<int>>& edges_;
    const std::vector<int> cand_class_;
    const std::vector<Pair>& fixed_;
    std::vector<bool> ref_used_;
    std::vector<int> suffix_possible_;

    bool best_found_ = false;
    std::vector<Pair> best_pairs_;
    int best_cross_ = 0;

    bool better(size_t card, int cross, const std::vector<Pair>& pairs) const {
        if (!best_found_) return true;
        if (card != best_pairs_.size()) return card > best_pairs_.size();
        if (cross != best_cross_) return cross < best_cross_;
        return pairs < best_pairs_;
    }

    void dfs(size_t ci, std::vector<Pair>& chosen, int cross, std::map<int, int>& last_ref) {
        if (best_found_ &&
            chosen.size() + static_cast<size_t>(suffix_possible_[ci]) < best_pairs_.size()) {
            return;
        }
        if (ci == edges_.size()) {
            if (better(chosen.size(), cross, chosen)) {
                best_found_ = true;
                best_pairs_ = chosen;
                best_cross_ = cross;
            }
            return;
        }
        const int cls = cand_class_[ci];
        auto floor_it = last_ref.find(cls);
        const int floor = floor_it == last_ref.end() ? -1 : floor_it->second;
        for (int r : edges_[ci]) {
            if (r <= floor || ref_used_[static_cast<size_t>(r)]) continue;
            ref_used_[static_cast<size_t>(r)] = true;
            const int prev = floor;
            last_ref[cls] = r;
            chosen.emplace_back(static_cast<int>(ci), r);
            dfs(ci + 1, chosen, cross + crossings_with(fixed_, {chosen.begin(), chosen.end() - 1}, static_cast<int>(ci), r), last_ref);
            chosen.pop_back();
            if (prev < 0) last_ref.erase(cls);
            else last_ref[cls] = prev;
            ref_used_[static_cast<size_t>(r)] = false;
        }
        dfs(ci + 1, chosen, cross, last_ref); // leave candidate unmatched
    }

    struct BeamState {
        std::vector<Pair> pairs;
        std::vector<bool> ref_used;
        std::map<int, int> last_ref;
        int cross = 0;
    };

    std::vector<Pair> beam() {
        std::vector<BeamState> states(1);
        states[0].ref_used = ref_used_;
        for (size_t ci = 0; ci < edges_.size(); ++ci) {
            std::vector<BeamState> next;
            for (const auto& st : states) {
                next.push_back(st); // skip option
                const int cls = cand_class_[ci];
                auto it = st.last_ref.find(cls);
                const int floor = it == st.last_ref.end() ? -1 : it->second;
                for (int r : edges_[ci]) {
                    if (r <= floor || st.ref_used[static_cast<size_t>(r)]) continue;
                    BeamState ns = st;
                    ns.cross += crossings_with(fixed_, st.pairs, static_cast<int>(ci), r);
                    ns.pairs.emplace_back(static_cast<int>(ci), r);
                    ns.ref_used[static_cast<size_t>(r)] = true;
                    ns.last_ref[cls] = r;
                    next.push_back(std::move(ns));
                }
            }
            std::sort(next.begin(), next.end(), [](const BeamState& a, const BeamState& b) {
                if (a.pairs.size() != b.pairs.size()) return a.pairs.size() > b.pairs.size();
                if (a.cross != b.cross) return a.cross < b.cross;
                return a.pairs < b.pairs;
            });
            if (next.size() > kBeamWidth) next.resize(kBeamWidth);
            states = std::move(next);
        }
        return states.front().pairs;
    }
};

// Interns class labels so the solver can compare them as ints.
std::vector<int> intern(const std::vector<std::string>& labels) {
    std::map<std::string, int> ids;
    std::vector<int> out;
    out.reserve(labels.size());
    for (const auto& s : labels) {
        auto [it, inserted] = ids.emplace(s, static_cast<int>(ids.size()));
        out.push_back(it->second);
    }
    return out;
}

int count_crossings(const std::vector<UnigramMatch>& sorted_matches) {
    int n = 0;
    for (size_t i = 0; i < sorted_matches.size(); ++i) {
        for (size_t j = i + 1; j < sorted_matches.size(); ++j) {
            if (sorted_matches[j].reference_index < sorted_matches[i].reference_index) ++n;
        }
    }
    return n;
}

int count_chunks(const std::vector<UnigramMatch>& sorted_matches) {
    if (sorted_matches.empty()) return 0;
    int chunks = 1;
    for (size_t i = 1; i < sorted_matches.size(); ++i) {
        const auto& prev = sorted_matches[i - 1];
        const auto& cur = sorted_matches[i];
        if (cur.candidate_index != prev.candidate_index + 1 ||
            cur.reference_index != prev.reference_index + 1) {
            ++chunks;
        }
    }
    return chunks;
}

} // namespace

Alignment align(const std::vector<std::string>& candidate,
                const std::vector<std::string>& reference) {
    const int nc = static_cast<int>(candidate.size());
    const int nr = static_cast<int>(reference.size());
    const bool exhaustive = nc <= kExhaustiveLimit && nr <= kExhaustiveLimit;

    // Stage 1: exact surface matches.
    std::vector<std::vector<int>> edges(static_cast<size_t>(nc));
    for (int i = 0; i < nc; ++i) {
        for (int j = 0; j < nr; ++j) {
            if (candidate[static_cast<size_t>(i)] == reference[static_cast<size_t>(j)]) {
                edges[static_cast<size_t>(i)].push_back(j);
            }
        }
    }
    std::vector<Pair> no_fixed;
    const std::vector<int> cand_classes = intern(candidate);
    StageSolver stage1(edges, cand_classes, nr, no_fixed);
    std::vector<Pair> exact_pairs = stage1.solve(exhaustive);

    // Stage 2: Porter-stem matches over positions both stages left open.
    std::vector<bool> cand_taken(static_cast<size_t>(nc), false);
    std::vector<bool> ref_taken(static_cast<size_t>(nr), false);
    for (const auto& [c, r] : exact_pairs) {
        cand_taken[static_cast<size_t>(c)] = true;
        ref_taken[static_cast<size_t>(r)] = true;
    }
    std::vector<std::string> cand_stems(static_cast<size_t>(nc)), ref_stems(static_cast<size_t>(nr));
    for (int i = 0; i < nc; ++i) cand_stems[static_cast<size_t>(i)] = porter_stem(candidate[static_cast<size_t>(i)]);
    for (int j = 0; j < nr; ++j) ref_stems[static_cast<size_t>(j)] = porter_stem(reference[static_cast<size_t>(j)]);

    std::vector<std::vector<int>> stem_edges(static_cast<size_t>(nc));
    for (int i = 0; i < nc; ++i) {
        if (cand_taken[static_cast<size_t>(i)]) continue;
        for (int j = 0; j < nr; ++j) {
            if (!ref_taken[static_cast<size_t>(j)] &&
                cand_stems[static_cast<size_t>(i)] == ref_stems[static_cast<size_t>(j)]) {
                stem_edges[static_cast<size_t>(i)].push_back(j);
            }
        }
    }
    const std::vector<int> stem_classes = intern(cand_stems);
    StageSolver stage2(stem_edges, stem_classes, nr, exact_pairs);
    std::vector<Pair> stem_pairs = stage2.solve(exhaustive);

    Alignment result;
    for (const auto& [c, r] : exact_pairs) result.matches.push_back({c, r, MatchStage::exact});
    for (const auto& [c, r] : stem_pairs) result.matches.push_back({c, r, MatchStage::stem});
    std::sort(result.matches.begin(), result.matches.end(),
              [](const UnigramMatch& a, const UnigramMatch& b) {
                  return a.candidate_index < b.candidate_index;
              });
    result.crossing_count = count_crossings(result.matches);
    result.chunk_count = count_chunks(result.matches);
    return result;
}

MeteorScore MeteorScore::from_counts(int matched, int candidate_len, int reference_len,
                                     int chunk_count) {
    MeteorScore s;
    s.matched = matched;
    s.candidate_len = candidate_len;
    s.reference_len = reference_len;
    s.chunk_count = chunk_count;
    if (matched == 0) return s; // P, R, fmean, penalty, score all 0 by convention
    s.precision = static_cast<double>(matched) / static_cast<double>(candidate_len);
    s.recall = static_cast<double>(matched) / static_cast<double>(reference_len);
    s.fmean = 10.0 * s.precision * s.recall / (s.recall + 9.0 * s.precision);
    const double frag = static_cast<double>(chunk_count) / static_cast<double>(matched);
    s.penalty = 0.5 * frag * frag * frag;
    s.score = s.fmean * (1.0 - s.penalty);
    return s;
}

MeteorScore meteor_sentence(const std::vector<std::string>& candidate,
                            const std::vector<std::vector<std::string>>& references) {
    if (references.empty()) throw std::invalid_argument("meteor_sentence needs >= 1 reference");
    MeteorScore best;
    bool have = false;
    for (const auto& ref : references) {
        Alignment a = align(candidate, ref);
        MeteorScore s = MeteorScore::from_counts(static_cast<int>(a.matches.size()),
                                                 static_cast<int>(candidate.size()),
                                                 static_cast<int>(ref.size()), a.chunk_count);
        if (!have || s.score > best.score) {
            best = s;
            have = true;
        }
    }
    return best;
}

CorpusMeteor meteor_corpus(const std::vector<std::vector<std::string>>& candidates,
                           const std::vector<std::vector<std::vector<std::string>>>& references) {
    if (candidates.size() != references.size()) {
        throw std::invalid_argument("candidates and references differ in segment count");
    }
    CorpusMeteor out;
    double sum_sentence = 0.0;
    for (size_t i = 0; i < candidates.size(); ++i) {
        MeteorScore s = meteor_sentence(candidates[i], references[i]);
        out.total_matched += s.matched;
        out.total_candidate_len += s.candidate_len;
        out.total_reference_len += s.reference_len;
        out.total_chunks += s.chunk_count;
        sum_sentence += s.score;
        out.segments.push_back(s);
    }
    if (!out.segments.empty()) {
        out.mean_sentence_score = sum_sentence / static_cast<double>(out.segments.size());
        out.aggregate_score = MeteorScore::from_counts(out.total_matched, out.total_candidate_len,
                                                       out.total_reference_len, out.total_chunks)
                                  .score;
    }
    return out;
}

} // namespace capforge
