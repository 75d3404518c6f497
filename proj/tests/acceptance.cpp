// Acceptance gate: seven go/no-go checks, one [PASS]/[FAIL] line each.
// Exit code 0 only when every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "alignment_oracle.hpp"
#include "capforge/corpus.hpp"
#include "capforge/decoder.hpp"
#include "capforge/features.hpp"
#include "capforge/llm.hpp"
#include "capforge/meteor.hpp"
#include "capforge/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace capforge;

namespace {

const std::string kFixtureDir = CAPFORGE_FIXTURE_DIR;
const std::string kDataDir = CAPFORGE_DATA_DIR;
const std::string kBin = CAPFORGE_BIN;

struct Check {
    std::vector<std::string> failures;
    void require(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

bool run_criterion(int number, const std::string& name, double budget_s,
                   const std::function<void(Check&)>& body) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(check);
    } catch (const std::exception& ex) {
        check.failures.push_back(std::string("exception: ") + ex.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget_s > 0 && elapsed > budget_s) {
        check.failures.push_back("runtime " + std::to_string(elapsed) + "s exceeds budget " +
                                 std::to_string(budget_s) + "s");
    }
    const bool ok = check.failures.empty();
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(1);
    line << (ok ? "[PASS]" : "[FAIL]") << " criterion " << number << ": " << name << " ("
         << elapsed << "s)";
    std::cout << line.str() << "\n";
    for (const auto& f : check.failures) std::cout << "       - " << f << "\n";
    return ok;
}

json slurp_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return json::parse(in);
}

// ---- criterion 1: corpus statistics ---------------------------------------

void criterion_stats(Check& check) {
    const Dictionary dict = load_dictionary(kDataDir + "/english_words.txt");

    std::string real_path;
    if (const char* env = std::getenv("CAPFORGE_RSICD_JSON")) real_path = env;
    else if (fs::exists(kDataDir + "/dataset_rsicd.json")) {
        real_path = kDataDir + "/dataset_rsicd.json";
    }

    if (!real_path.empty()) {
        Corpus corpus = parse_corpus_file(real_path);
        CorpusStats s = compute_stats(corpus, dict);
        check.require(std::abs(static_cast<double>(s.unique_words) - 2643.0) <= 2643.0 * 0.03,
                      "unique_words " + std::to_string(s.unique_words) +
                          " outside 2643 +-3%");
        check.require(std::abs(static_cast<double>(s.one_time_words) - 925.0) <= 925.0 * 0.05,
                      "one_time_words " + std::to_string(s.one_time_words) +
                          " outside 925 +-5%");
        check.require(std::abs(s.misspelled_token_ratio - 0.0104) <= 0.003,
                      "misspelled token ratio " + std::to_string(s.misspelled_token_ratio) +
                          " outside 1.04% +-0.3pp");
        check.require(s.duplicate_caption_ratio > 0.60,
                      "per-image duplicate ratio " +
                          std::to_string(s.duplicate_caption_ratio) + " not > 0.60");
        return;
    }

    // dataset absent: the bundled fixture with frozen expected values
    Corpus corpus = parse_corpus_file(kFixtureDir + "/fixture_corpus.json");
    CorpusStats s = compute_stats(corpus, dict);
    json expected = slurp_json(kFixtureDir + "/fixture_expected.json");
    check.require(s.unique_words == expected.at("unique_words").get<uint64_t>(),
                  "unique_words mismatch: got " + std::to_string(s.unique_words));
    check.require(s.one_time_words == expected.at("one_time_words").get<uint64_t>(),
                  "one_time_words mismatch: got " + std::to_string(s.one_time_words));
    check.require(s.total_tokens == expected.at("total_tokens").get<uint64_t>(),
                  "total_tokens mismatch: got " + std::to_string(s.total_tokens));
    check.require(std::abs(s.misspelled_token_ratio -
                           expected.at("misspelled_token_ratio").get<double>()) < 1e-12,
                  "misspelled token ratio mismatch: got " +
                      std::to_string(s.misspelled_token_ratio));
    check.require(std::abs(s.duplicate_caption_ratio -
                           expected.at("duplicate_caption_ratio").get<double>()) < 1e-12,
                  "duplicate ratio mismatch: got " +
                      std::to_string(s.duplicate_caption_ratio));
    check.require(s.duplicate_caption_ratio > 0.60,
                  "fixture duplicate ratio not > 0.60");
    for (const auto& [count, words] : expected.at("repetition_histogram").items()) {
        const uint64_t c = std::stoull(count);
        auto it = s.repetition_histogram.find(c);
        check.require(it != s.repetition_histogram.end() &&
                          it->second == words.get<uint64_t>(),
                      "histogram[" + count + "] mismatch");
    }
}

// ---- criterion 2: METEOR alignment vs exhaustive oracle -------------------

void criterion_meteor(Check& check) {
    std::mt19937_64 rng(424242);
    const std::vector<std::string> vocab = {"plane", "planes", "park",  "parked",
                                            "parking", "tree", "trees", "road",
                                            "roads", "a",      "the",   "green"};
    std::uniform_int_distribution<size_t> pick(0, vocab.size() - 1);
    std::uniform_int_distribution<int> len(0, 8);
    auto sentence = [&] {
        std::vector<std::string> s;
        for (int i = 0, n = len(rng); i < n; ++i) s.push_back(vocab[pick(rng)]);
        return s;
    };

    int mismatches = 0;
    for (int iter = 0; iter < 1000; ++iter) {
        const auto cand = sentence();
        const auto ref = sentence();
        const Alignment got = align(cand, ref);
        const oracle::OracleAlignment want = oracle::oracle_align(cand, ref);
        if (static_cast<int>(got.matches.size()) != want.cardinality ||
            got.crossing_count != want.crossings) {
            ++mismatches;
        }
    }
    check.require(mismatches == 0,
                  std::to_string(mismatches) + " of 1000 alignments disagree with the oracle");

    const std::vector<std::string> disjoint_a = {"red", "boat"};
    const std::vector<std::string> disjoint_b = {"green", "tree"};
    check.require(meteor_sentence(disjoint_a, {disjoint_b}).score == 0.0,
                  "disjoint sentences should score 0");

    std::vector<std::string> twelve;
    for (int i = 0; i < 12; ++i) twelve.push_back("w" + std::to_string(i));
    const double got = meteor_sentence(twelve, {twelve}).score;
    const double want = 1.0 - 0.5 / (12.0 * 12.0 * 12.0);
    check.require(std::abs(got - want) < 1e-9,
                  "identical 12-token score " + std::to_string(got) + " != " +
                      std::to_string(want));
}

// ---- criterion 3: gradient check ------------------------------------------

void criterion_gradients(Check& check) {
    DecoderDims dims;
    dims.vocab = 20;
    dims.embed = 8;
    dims.hidden = 10;
    dims.channels = 6;
    dims.locations = 4;
    dims.attn = 5;

    DecoderParams params = init_decoder(dims, 2024);
    const FeatureGrid grid = synthetic_grid("grad_check.jpg", dims.locations, dims.channels, 5);
    std::vector<int> gold = {Vocab::kStart, 4, 9, 17, 6, 11, Vocab::kEnd};

    const DecoderParams analytic = backward(forward_loss(grid, gold, params), params);
    auto tensors = params.tensors();
    auto grads = analytic.tensors();

    const double eps = 1e-5;
    int bad = 0;
    std::string first_bad;
    for (size_t t = 0; t < tensors.size(); ++t) {
        Eigen::MatrixXd& m = *tensors[t].second;
        const Eigen::MatrixXd& g = *grads[t].second;
        for (int i = 0; i < m.rows(); ++i) {
            for (int j = 0; j < m.cols(); ++j) {
                const double saved = m(i, j);
                m(i, j) = saved + eps;
                const double up = forward_loss(grid, gold, params).loss;
                m(i, j) = saved - eps;
                const double down = forward_loss(grid, gold, params).loss;
                m(i, j) = saved;
                const double fd = (up - down) / (2.0 * eps);
                const double an = g(i, j);
                const double tol = 1e-4 * std::max({1e-3, std::abs(fd), std::abs(an)});
                if (std::abs(fd - an) > tol) {
                    ++bad;
                    if (first_bad.empty()) {
                        first_bad = tensors[t].first + "(" + std::to_string(i) + "," +
                                    std::to_string(j) + "): fd=" + std::to_string(fd) +
                                    " an=" + std::to_string(an);
                    }
                }
            }
        }
    }
    check.require(bad == 0, std::to_string(bad) + " gradient entries off, first: " + first_bad);
}

// ---- criterion 4: overfit property ----------------------------------------

void criterion_overfit(Check& check) {
    const std::vector<std::string> words = {
        "plane", "tree",  "road", "river", "field",  "building", "car",   "boat",
        "green", "white", "long", "small", "parked", "near",     "beside", "the"};
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<size_t> pick(0, words.size() - 1);

    Corpus corpus;
    for (int i = 0; i < 16; ++i) {
        ImageEntry e;
        e.filename = "overfit_" + std::to_string(i) + ".jpg";
        e.split = "train";
        Caption cap;
        cap.sentid = i;
        std::vector<std::string> toks;
        for (int w = 0; w < 5; ++w) toks.push_back(words[pick(rng)]);
        cap.raw = join_tokens(toks);
        cap.tokens = toks;
        e.captions.push_back(std::move(cap));
        corpus.entries.push_back(std::move(e));
    }

    Vocab vocab = build_vocab(corpus, 1);
    std::vector<std::pair<FeatureGrid, std::vector<int>>> dataset;
    for (const auto& e : corpus.entries) {
        dataset.emplace_back(synthetic_grid(e.filename, 4, 8, 99),
                             vocab.encode_caption(e.captions[0].tokens));
    }

    DecoderDims dims;
    dims.vocab = vocab.size();
    dims.embed = 16;
    dims.hidden = 32;
    dims.channels = 8;
    dims.locations = 4;
    dims.attn = 16;

    TrainConfig cfg;
    cfg.learning_rate = 0.2;
    cfg.epochs = 500;
    cfg.batch_size = 4;
    cfg.seed = 5;

    const TrainResult result = train(dataset, dims, cfg);
    double best_loss = result.loss_curve.empty() ? 1e9 : result.loss_curve.back();
    check.require(best_loss < 0.1,
                  "final mean loss " + std::to_string(best_loss) + " not < 0.1");

    size_t total = 0, correct = 0;
    for (size_t i = 0; i < dataset.size(); ++i) {
        const auto& gold = corpus.entries[i].captions[0].tokens;
        const DecodeResult decoded =
            greedy_decode(dataset[i].first, result.params, vocab, 10);
        total += gold.size();
        for (size_t j = 0; j < gold.size() && j < decoded.tokens.size(); ++j) {
            if (decoded.tokens[j] == gold[j]) ++correct;
        }
        for (const auto& alpha : decoded.attention_maps) {
            check.require(std::abs(alpha.sum() - 1.0) <= 1e-6,
                          "attention map sums to " + std::to_string(alpha.sum()));
        }
    }
    const double rate = total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
    check.require(rate >= 0.95,
                  "greedy decode reproduces " + std::to_string(rate * 100.0) +
                      "% of training tokens, need >= 95%");
}

// ---- criterion 5: hermetic correction pipeline ----------------------------

struct CountingTransport : ChatTransport {
    int calls = 0;
    TransportReply complete(const ChatRequest& req) override {
        ++calls;
        return {true, req.user_text + " #" + std::to_string(calls)};
    }
};

void criterion_correction(Check& check) {
    const char* airport_raw = "many planes are parked next to a long building in an airport .";
    const char* airport_fixed =
        "Several planes are parked alongside a lengthy building at the airport.";

    MockChatTransport mock;
    CorrectionConfig cfg;
    cfg.backoff_base_ms = 0;
    cfg.concurrency = 1;
    const CorrectionRecord rec =
        correct_caption(airport_raw, PromptTemplate::grammar_correct(), cfg, mock);
    check.require(rec.corrected == airport_fixed,
                  "airport caption mapped to: " + rec.corrected);

    Corpus corpus = parse_corpus_file(kFixtureDir + "/fixture_corpus.json");
    CorrectionRun run = correct_corpus(corpus, PromptTemplate::grammar_correct(), cfg, mock);
    bool skeleton = run.corpus.entries.size() == corpus.entries.size();
    for (size_t e = 0; skeleton && e < corpus.entries.size(); ++e) {
        skeleton = run.corpus.entries[e].filename == corpus.entries[e].filename &&
                   run.corpus.entries[e].split == corpus.entries[e].split &&
                   run.corpus.entries[e].captions.size() == corpus.entries[e].captions.size();
        for (size_t c = 0; skeleton && c < corpus.entries[e].captions.size(); ++c) {
            skeleton = run.corpus.entries[e].captions[c].sentid ==
                       corpus.entries[e].captions[c].sentid;
        }
    }
    check.require(skeleton, "corrected corpus skeleton differs from the original");

    const fs::path cache =
        fs::temp_directory_path() / ("capforge_accept_" + std::to_string(::getpid()));
    fs::remove_all(cache);
    CorrectionConfig cached_cfg = cfg;
    cached_cfg.cache_dir = cache.string();
    MockChatTransport warm;
    const CorrectionRun first =
        correct_corpus(corpus, PromptTemplate::grammar_correct(), cached_cfg, warm);
    CountingTransport never;
    const CorrectionRun second =
        correct_corpus(corpus, PromptTemplate::grammar_correct(), cached_cfg, never);
    check.require(never.calls == 0, "warm-cache rerun made " + std::to_string(never.calls) +
                                        " transport calls");
    check.require(write_corpus_string(second.corpus) == write_corpus_string(first.corpus),
                  "warm-cache rerun output differs");
    fs::remove_all(cache);
}

// ---- criterion 6: correction improves fixture diversity -------------------

void criterion_direction(Check& check) {
    Corpus corpus = parse_corpus_file(kFixtureDir + "/fixture_corpus.json");
    const Dictionary dict = load_dictionary(kDataDir + "/english_words.txt");
    const CorpusStats before = compute_stats(corpus, dict);

    MockChatTransport mock;
    CorrectionConfig cfg;
    cfg.backoff_base_ms = 0;
    cfg.concurrency = 1;
    const CorrectionRun run =
        correct_corpus(corpus, PromptTemplate::grammar_correct(), cfg, mock);
    const CorpusStats after = compute_stats(run.corpus, dict);

    check.require(after.unique_words > before.unique_words,
                  "unique words did not increase: " + std::to_string(before.unique_words) +
                      " -> " + std::to_string(after.unique_words));
    check.require(after.duplicate_caption_ratio < before.duplicate_caption_ratio,
                  "duplicate ratio did not drop: " +
                      std::to_string(before.duplicate_caption_ratio) + " -> " +
                      std::to_string(after.duplicate_caption_ratio));

    const uint64_t max_count = before.repetition_histogram.rbegin()->first;
    auto mass_at_or_above = [max_count](const CorpusStats& s) {
        uint64_t mass = 0;
        for (const auto& [count, words] : s.repetition_histogram) {
            if (count >= max_count) mass += count * words;
        }
        return mass;
    };
    check.require(mass_at_or_above(after) < mass_at_or_above(before),
                  "histogram mass at the max occurrence count did not shrink");
}

// ---- criterion 7: non-reproducibility statement + published delta ---------

void criterion_published_delta(Check& check) {
    std::cout << "       note: the published absolute METEOR values (0.6859 -> 0.7033 for the\n"
                 "       ResNet-101 row) come from full-scale pretrained-CNN features, GPU\n"
                 "       training and live LLM access; they are NOT reproducible at desk scale.\n"
                 "       Criteria 2-4 and 6 substitute property-based checks; this criterion\n"
                 "       verifies only that the comparator reproduces the published delta.\n";

    const fs::path dir =
        fs::temp_directory_path() / ("capforge_delta_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::ofstream(dir / "left.json") << R"({"meteor":{"aggregate_score":0.6859}})";
    std::ofstream(dir / "right.json") << R"({"meteor":{"aggregate_score":0.7033}})";
    const std::string cmd = kBin + " compare --left " + (dir / "left.json").string() +
                            " --right " + (dir / "right.json").string() + " --report " +
                            (dir / "cmp.json").string() + " --deterministic >/dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    check.require(WEXITSTATUS(raw) == 0, "compare subcommand failed");
    if (WEXITSTATUS(raw) == 0) {
        const json cmp = slurp_json((dir / "cmp.json").string());
        const double delta = cmp.at("meteor_delta").at("aggregate_score").get<double>();
        check.require(std::abs(delta - 0.0174) < 1e-9,
                      "delta " + std::to_string(delta) + " != 0.0174");
    }
    fs::remove_all(dir);
}

} // namespace

int main() {
    bool all = true;
    all &= run_criterion(1, "corpus statistics reproduce the reference figures", 30.0,
                         criterion_stats);
    all &= run_criterion(2, "METEOR alignment matches the exhaustive oracle", 10.0,
                         criterion_meteor);
    all &= run_criterion(3, "analytic gradients match finite differences", 60.0,
                         criterion_gradients);
    all &= run_criterion(4, "decoder overfits 16 synthetic pairs", 120.0, criterion_overfit);
    all &= run_criterion(5, "correction pipeline is hermetic and cacheable", 0.0,
                         criterion_correction);
    all &= run_criterion(6, "mock correction improves fixture diversity", 0.0,
                         criterion_direction);
    all &= run_criterion(7, "published delta reproduced by the comparator", 0.0,
                         criterion_published_delta);
    std::cout << (all ? "acceptance: all criteria passed" : "acceptance: FAILURES above") << "\n";
    return all ? 0 : 1;
}
