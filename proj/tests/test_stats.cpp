#include <doctest.h>

#include <random>

#include "capforge/stats.hpp"

using namespace capforge;

namespace {

Corpus one_image(const std::vector<std::string>& raws) {
    Corpus c;
    ImageEntry e;
    e.filename = "img.jpg";
    e.split = "train";
    for (size_t i = 0; i < raws.size(); ++i) {
        Caption cap;
        cap.sentid = static_cast<int64_t>(i);
        cap.raw = raws[i];
        cap.tokens = tokenize(cap.raw);
        e.captions.push_back(std::move(cap));
    }
    c.entries.push_back(std::move(e));
    return c;
}

Dictionary full_dict() {
    return {"a", "b", "c", "the", "road", "trees", "river", "plane", "many", "planes", "are",
            "parked", "next", "to", "long", "building", "in", "an", "airport", "field", "near"};
}

} // namespace

TEST_CASE("five identical captions give duplicate ratio 4/5") {
    const std::string raw = "many planes are parked next to a long building in an airport .";
    Corpus c = one_image({raw, raw, raw, raw, raw});
    CorpusStats s = compute_stats(c, full_dict());
    CHECK(s.total_captions == 5);
    CHECK(s.duplicate_caption_ratio == doctest::Approx(0.8));
    CHECK(s.corpus_duplicate_ratio == doctest::Approx(0.8));
    CHECK(s.unique_words == 12);
    CHECK(s.total_tokens == 60);
    CHECK(s.one_time_words == 0);
    CHECK(s.misspelled_token_ratio == 0.0);
}

TEST_CASE("single clean caption") {
    Corpus c = one_image({"a b c"});
    CorpusStats s = compute_stats(c, full_dict());
    CHECK(s.unique_words == 3);
    CHECK(s.one_time_words == 3);
    CHECK(s.misspelled_token_ratio == 0.0);
    CHECK(s.duplicate_caption_ratio == 0.0);
}

TEST_CASE("misspelling ratios: per token and per caption, digit tokens exempt") {
    Corpus c = one_image({"a roadd near the river", "the plane b2 c"});
    CorpusStats s = compute_stats(c, full_dict());
    // 9 tokens, one out-of-dictionary ("roadd"); "b2" carries a digit
    CHECK(s.total_tokens == 9);
    CHECK(s.misspelled_token_ratio == doctest::Approx(1.0 / 9.0));
    CHECK(s.misspelled_caption_ratio == doctest::Approx(0.5));
}

TEST_CASE("per-image vs corpus-wide duplicates are separate figures") {
    Corpus c;
    for (int i = 0; i < 2; ++i) {
        ImageEntry e;
        e.filename = "img" + std::to_string(i) + ".jpg";
        e.split = "train";
        Caption cap;
        cap.sentid = 0;
        cap.raw = "the road";
        cap.tokens = tokenize(cap.raw);
        e.captions.push_back(cap);
        c.entries.push_back(e);
    }
    CorpusStats s = compute_stats(c, full_dict());
    CHECK(s.duplicate_caption_ratio == 0.0);   // no repeats within either image
    CHECK(s.corpus_duplicate_ratio == doctest::Approx(0.5));
}

TEST_CASE("repetition histogram CSV") {
    SUBCASE("a a b") {
        CorpusStats s = compute_stats(one_image({"a a b"}), full_dict());
        CHECK(repetition_histogram_csv(s) == "occurrence_count,num_words\n1,1\n2,1\n");
    }
    SUBCASE("empty corpus") {
        CorpusStats s;
        CHECK(repetition_histogram_csv(s) == "occurrence_count,num_words\n");
    }
}

TEST_CASE("histogram invariants hold on random corpora") {
    std::mt19937_64 rng(11);
    std::vector<std::string> words = {"a", "b", "c", "road", "river", "plane"};
    std::uniform_int_distribution<size_t> pick(0, words.size() - 1);
    std::uniform_int_distribution<int> n_caps(1, 5), n_words(1, 7);
    for (int iter = 0; iter < 30; ++iter) {
        Corpus c;
        ImageEntry e;
        e.filename = "img.jpg";
        e.split = "train";
        const int caps = n_caps(rng);
        for (int j = 0; j < caps; ++j) {
            Caption cap;
            cap.sentid = j;
            std::string raw;
            for (int w = 0, n = n_words(rng); w < n; ++w) {
                if (w) raw += ' ';
                raw += words[pick(rng)];
            }
            cap.raw = raw;
            cap.tokens = tokenize(raw);
            e.captions.push_back(std::move(cap));
        }
        c.entries.push_back(std::move(e));

        CorpusStats s = compute_stats(c, full_dict());
        uint64_t mass = 0, word_sum = 0;
        for (const auto& [count, n] : s.repetition_histogram) {
            mass += count * n;
            word_sum += n;
        }
        CHECK(mass == s.total_tokens);
        CHECK(word_sum == s.unique_words);
        auto it = s.repetition_histogram.find(1);
        CHECK(s.one_time_words == (it == s.repetition_histogram.end() ? 0 : it->second));
        CHECK(s.one_time_words <= s.unique_words);
        CHECK(s.unique_words <= s.total_tokens);
        for (double ratio : {s.misspelled_token_ratio, s.misspelled_caption_ratio,
                             s.duplicate_caption_ratio, s.corpus_duplicate_ratio}) {
            CHECK(ratio >= 0.0);
            CHECK(ratio <= 1.0);
        }
        // determinism
        CorpusStats again = compute_stats(c, full_dict());
        CHECK(again.repetition_histogram == s.repetition_histogram);
        CHECK(again.misspelled_token_ratio == s.misspelled_token_ratio);

        // dropping the last caption never increases the totals
        if (c.entries[0].captions.size() > 1) {
            Corpus smaller = c;
            smaller.entries[0].captions.pop_back();
            CorpusStats s2 = compute_stats(smaller, full_dict());
            CHECK(s2.total_tokens <= s.total_tokens);
            CHECK(s2.total_captions < s.total_captions);
        }
    }
}

TEST_CASE("compare_stats reproduces the published corpus deltas") {
    CorpusStats left, right;
    left.unique_words = 2643;
    left.one_time_words = 925;
    left.misspelled_token_ratio = 0.0104;
    right.unique_words = 5365;
    right.one_time_words = 2102;
    right.misspelled_token_ratio = 0.007;

    StatsComparison cmp = compare_stats(left, right);
    CHECK(cmp.unique_words_delta == 2722);
    CHECK(cmp.one_time_words_delta == 1177);
    CHECK(cmp.misspelled_token_ratio_delta == doctest::Approx(-0.0034));
    CHECK(cmp.unique_words_dir == Direction::improved);
    CHECK(cmp.one_time_words_dir == Direction::neutral);
    CHECK(cmp.misspelled_dir == Direction::improved);
}

TEST_CASE("compare_stats trivial directions") {
    CorpusStats s;
    s.unique_words = 10;
    StatsComparison same = compare_stats(s, s);
    CHECK(same.unique_words_delta == 0);
    CHECK(same.unique_words_dir == Direction::unchanged);
    CHECK(same.misspelled_dir == Direction::unchanged);
    CHECK(same.duplicate_dir == Direction::unchanged);

    CorpusStats left, right;
    left.duplicate_caption_ratio = 0.8;
    right.duplicate_caption_ratio = 0.2;
    StatsComparison cmp = compare_stats(left, right);
    CHECK(cmp.duplicate_caption_ratio_delta == doctest::Approx(-0.6));
    CHECK(cmp.duplicate_dir == Direction::improved);
}

TEST_CASE("empty dictionary is rejected") {
    CHECK_THROWS_AS(compute_stats(one_image({"a"}), Dictionary{}), std::invalid_argument);
}
