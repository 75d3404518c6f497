#include "capforge/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>

namespace capforge {
namespace {

using NgramCounts = std::map<std::vector<std::string>, int64_t>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, int n) {
    NgramCounts counts;
    if (static_cast<int>(tokens.size()) < n) return counts;
    for (size_t i = 0; i + static_cast<size_t>(n) <= tokens.size(); ++i) {
        std::vector<std::string> gram(tokens.begin() + static_cast<long>(i),
                                      tokens.begin() + static_cast<long>(i) + n);
        ++counts[std::move(gram)];
    }
    return counts;
}

} // namespace

BleuScore bleu_corpus(const std::vector<std::vector<std::string>>& candidates,
                      const std::vector<std::vector<std::vector<std::string>>>& references,
                      int max_n) {
    if (candidates.size() != references.size()) {
        throw std::invalid_argument("candidates and references differ in segment count");
    }
    if (max_n < 1) throw std::invalid_argument("max_n must be >= 1");

    BleuScore out;
    out.ngram_precision.assign(static_cast<size_t>(max_n), 0.0);
    std::vector<int64_t> clipped(static_cast<size_t>(max_n), 0);
    std::vector<int64_t> total(static_cast<size_t>(max_n), 0);

    for (size_t s = 0; s < candidates.size(); ++s) {
        const auto& cand = candidates[s];
        const auto& refs = references[s];
        if (refs.empty()) throw std::invalid_argument("segment without references");

        out.candidate_len += static_cast<int>(cand.size());
        // closest reference length, ties toward the shorter
        int best_ref = static_cast<int>(refs[0].size());
        for (const auto& r : refs) {
            const int len = static_cast<int>(r.size());
            const int cur = std::abs(len - static_cast<int>(cand.size()));
            const int best = std::abs(best_ref - static_cast<int>(cand.size()));
            if (cur < best || (cur == best && len < best_ref)) best_ref = len;
        }
        out.effective_reference_len += best_ref;

        for (int n = 1; n <= max_n; ++n) {
            NgramCounts cand_counts = count_ngrams(cand, n);
            NgramCounts max_ref_counts;
            for (const auto& r : refs) {
                for (const auto& [gram, cnt] : count_ngrams(r, n)) {
                    auto& slot = max_ref_counts[gram];
                    slot = std::max(slot, cnt);
                }
            }
            for (const auto& [gram, cnt] : cand_counts) {
                total[static_cast<size_t>(n - 1)] += cnt;
                auto it = max_ref_counts.find(gram);
                if (it != max_ref_counts.end()) {
                    clipped[static_cast<size_t>(n - 1)] += std::min(cnt, it->second);
                }
            }
        }
    }

    double log_sum = 0.0;
    bool zero = false;
    for (int n = 0; n < max_n; ++n) {
        const auto i = static_cast<size_t>(n);
        if (total[i] == 0 || clipped[i] == 0) {
            zero = true;
            continue;
        }
        out.ngram_precision[i] =
            static_cast<double>(clipped[i]) / static_cast<double>(total[i]);
        log_sum += std::log(out.ngram_precision[i]);
    }

    if (out.candidate_len == 0) return out;
    out.brevity_penalty =
        out.candidate_len >= out.effective_reference_len
            ? 1.0
            : std::exp(1.0 - static_cast<double>(out.effective_reference_len) /
                                 static_cast<double>(out.candidate_len));
    if (!zero) {
        out.score = out.brevity_penalty * std::exp(log_sum / max_n);
    }
    return out;
}

} // namespace capforge
