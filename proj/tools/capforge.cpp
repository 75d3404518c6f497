// capforge: caption corpus statistics, LLM-based correction, and a small
// attention captioner, glued together behind one CLI.
//
// Exit codes: 0 success, 1 pipeline error, 2 usage/input error.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <unordered_map>

#include "capforge/bleu.hpp"
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

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitPipeline = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_file(const std::string& path, const char* what) {
    if (!fs::exists(path)) {
        throw UsageError(std::string(what) + " not found: " + path);
    }
}

std::string now_utc() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

json report_skeleton(const std::string& kind, bool deterministic) {
    json r;
    r["tool"] = "capforge";
    r["version"] = kVersion;
    r["kind"] = kind;
    if (!deterministic) r["generated_at"] = now_utc();
    return r;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

void write_report(const std::string& path, const json& report) {
    write_text(path, report.dump(1) + "\n");
}

json stats_to_json(const CorpusStats& s) {
    json hist = json::object();
    for (const auto& [count, words] : s.repetition_histogram) {
        hist[std::to_string(count)] = words;
    }
    return {
        {"total_captions", s.total_captions},
        {"total_tokens", s.total_tokens},
        {"unique_words", s.unique_words},
        {"one_time_words", s.one_time_words},
        {"misspelled_token_ratio", s.misspelled_token_ratio},
        {"misspelled_caption_ratio", s.misspelled_caption_ratio},
        {"duplicate_caption_ratio", s.duplicate_caption_ratio},
        {"corpus_duplicate_ratio", s.corpus_duplicate_ratio},
        {"repetition_histogram", hist},
    };
}

CorpusStats stats_from_json(const json& j) {
    CorpusStats s;
    s.total_captions = j.at("total_captions").get<uint64_t>();
    s.total_tokens = j.at("total_tokens").get<uint64_t>();
    s.unique_words = j.at("unique_words").get<uint64_t>();
    s.one_time_words = j.at("one_time_words").get<uint64_t>();
    s.misspelled_token_ratio = j.at("misspelled_token_ratio").get<double>();
    s.misspelled_caption_ratio = j.at("misspelled_caption_ratio").get<double>();
    s.duplicate_caption_ratio = j.at("duplicate_caption_ratio").get<double>();
    s.corpus_duplicate_ratio = j.at("corpus_duplicate_ratio").get<double>();
    if (j.contains("repetition_histogram")) {
        for (const auto& [k, v] : j.at("repetition_histogram").items()) {
            s.repetition_histogram[std::stoull(k)] = v.get<uint64_t>();
        }
    }
    return s;
}

void print_stats_table(const std::string& label, const CorpusStats& s) {
    std::cout << "corpus: " << label << "\n"
              << std::left << std::setw(28) << "  total captions" << s.total_captions << "\n"
              << std::setw(28) << "  total tokens" << s.total_tokens << "\n"
              << std::setw(28) << "  unique words" << s.unique_words << "\n"
              << std::setw(28) << "  one-time words" << s.one_time_words << "\n"
              << std::setw(28) << "  misspelled token ratio" << s.misspelled_token_ratio << "\n"
              << std::setw(28) << "  misspelled caption ratio" << s.misspelled_caption_ratio
              << "\n"
              << std::setw(28) << "  duplicate ratio (image)" << s.duplicate_caption_ratio << "\n"
              << std::setw(28) << "  duplicate ratio (corpus)" << s.corpus_duplicate_ratio
              << "\n";
}

// ---- stats ----------------------------------------------------------------

struct StatsArgs {
    std::string corpus_path, dict_path, report_path, histogram_path, label = "original";
    bool deterministic = false;
};

int cmd_stats(const StatsArgs& a) {
    require_file(a.corpus_path, "corpus");
    require_file(a.dict_path, "dictionary");
    Corpus corpus = parse_corpus_file(a.corpus_path, a.label);
    Dictionary dict = load_dictionary(a.dict_path);
    CorpusStats stats = compute_stats(corpus, dict);

    print_stats_table(a.label, stats);
    for (const auto& w : corpus.warnings) std::cerr << "warning: " << w << "\n";

    if (!a.report_path.empty()) {
        json report = report_skeleton("stats", a.deterministic);
        report["corpus"] = {{"path", a.corpus_path},
                            {"label", a.label},
                            {"images", corpus.entries.size()},
                            {"captions", corpus.caption_count()}};
        report["config"] = {{"dictionary", a.dict_path}};
        report["stats"] = stats_to_json(stats);
        write_report(a.report_path, report);
    }
    if (!a.histogram_path.empty()) {
        write_text(a.histogram_path, repetition_histogram_csv(stats));
    }
    return kExitOk;
}

// ---- correct --------------------------------------------------------------

struct CorrectArgs {
    std::string corpus_path, out_path, records_path, cache_dir;
    std::string endpoint = "https://api.openai.com/v1/chat/completions";
    std::string model = "gpt-3.5-turbo";
    double temperature = 1.0;
    int retries = 2;
    int concurrency = 4;
    int timeout_ms = 30000;
    bool live = false;
};

int cmd_correct(const CorrectArgs& a) {
    require_file(a.corpus_path, "corpus");
    Corpus corpus = parse_corpus_file(a.corpus_path);

    CorrectionConfig cfg;
    cfg.model_name = a.model;
    cfg.temperature = a.temperature;
    cfg.max_retries = a.retries;
    cfg.timeout_ms = a.timeout_ms;
    cfg.cache_dir = a.cache_dir;
    cfg.endpoint_url = a.endpoint;
    // the mock's synonym rotation is ordered; one thread keeps reruns identical
    cfg.concurrency = a.live ? a.concurrency : 1;

    std::unique_ptr<ChatTransport> transport;
    if (a.live) {
        transport = std::make_unique<HttpChatTransport>(cfg);
    } else {
        transport = std::make_unique<MockChatTransport>();
    }

    CorrectionRun run =
        correct_corpus(corpus, PromptTemplate::grammar_correct(), cfg, *transport);
    write_corpus_file(run.corpus, a.out_path);
    if (!a.records_path.empty()) write_text(a.records_path, records_csv(run.records));

    size_t fresh = 0, cached = 0, failed = 0;
    for (const auto& r : run.records) {
        if (r.status == CorrectionStatus::fresh) ++fresh;
        else if (r.status == CorrectionStatus::cached) ++cached;
        else ++failed;
    }
    std::cout << "corrected " << run.records.size() << " captions (" << fresh << " fresh, "
              << cached << " cached, " << failed << " kept original) -> " << a.out_path << "\n";
    return kExitOk;
}

// ---- train / eval ---------------------------------------------------------

struct ModelArgs {
    std::string corpus_path, features_path, params_path, vocab_path, report_path;
    std::string attention_path;
    std::string split = "train";
    int epochs = 100;
    double lr = 0.1;
    int batch = 4;
    double clip = 5.0;
    uint64_t seed = 1;
    int min_count = 1;
    int embed = 64, hidden = 128, attn = 64;
    int max_len = 30;
    int locations = 4, channels = 8;
    uint64_t feature_seed = 7;
    bool deterministic = false;
};

Corpus filter_split(const Corpus& corpus, const std::string& split) {
    if (split == "all") return corpus;
    Corpus out;
    out.source_label = corpus.source_label;
    for (const auto& e : corpus.entries) {
        if (e.split == split) out.entries.push_back(e);
    }
    return out;
}

// features come from a CAPF file when given, otherwise from the seeded
// synthetic generator so desk-scale runs need no CNN
FeatureGrid grid_for(const std::string& filename,
                     const std::unordered_map<std::string, const FeatureGrid*>& loaded,
                     const ModelArgs& a) {
    auto it = loaded.find(filename);
    if (it != loaded.end()) return *it->second;
    if (!loaded.empty()) {
        throw std::runtime_error("feature file has no grid for " + filename);
    }
    return synthetic_grid(filename, a.locations, a.channels, a.feature_seed);
}

json evaluate_model(const Corpus& corpus, const DecoderParams& params, const Vocab& vocab,
                    const std::unordered_map<std::string, const FeatureGrid*>& loaded,
                    const ModelArgs& a) {
    std::vector<std::vector<std::string>> candidates;
    std::vector<std::vector<std::vector<std::string>>> references;
    json attention = json::object();
    for (const auto& entry : corpus.entries) {
        FeatureGrid grid = grid_for(entry.filename, loaded, a);
        if (grid.channels() != params.dims.channels ||
            grid.locations() != params.dims.locations) {
            throw std::runtime_error("feature grid for " + entry.filename + " is " +
                                     std::to_string(grid.locations()) + "x" +
                                     std::to_string(grid.channels()) + " but the model expects " +
                                     std::to_string(params.dims.locations) + "x" +
                                     std::to_string(params.dims.channels));
        }
        DecodeResult decoded = greedy_decode(grid, params, vocab, a.max_len);
        candidates.push_back(decoded.tokens);
        std::vector<std::vector<std::string>> refs;
        for (const auto& cap : entry.captions) refs.push_back(cap.tokens);
        references.push_back(std::move(refs));
        if (!a.attention_path.empty()) {
            attention[entry.filename] = json::parse(attention_maps_json(decoded));
        }
    }
    if (!a.attention_path.empty()) {
        write_text(a.attention_path, attention.dump(1) + "\n");
    }

    CorpusMeteor meteor = meteor_corpus(candidates, references);
    BleuScore bleu = bleu_corpus(candidates, references);
    json out;
    out["meteor"] = {{"aggregate_score", meteor.aggregate_score},
                     {"mean_sentence_score", meteor.mean_sentence_score},
                     {"segments", meteor.segments.size()},
                     {"total_matched", meteor.total_matched},
                     {"total_candidate_len", meteor.total_candidate_len},
                     {"total_reference_len", meteor.total_reference_len},
                     {"total_chunks", meteor.total_chunks}};
    out["bleu"] = {{"score", bleu.score},
                   {"brevity_penalty", bleu.brevity_penalty},
                   {"ngram_precision", bleu.ngram_precision}};
    return out;
}

json model_config_echo(const ModelArgs& a, const Vocab& vocab, const DecoderDims& dims) {
    return {{"split", a.split},
            {"seed", a.seed},
            {"epochs", a.epochs},
            {"learning_rate", a.lr},
            {"batch_size", a.batch},
            {"clip_norm", a.clip},
            {"min_count", a.min_count},
            {"max_caption_len", a.max_len},
            {"feature_seed", a.feature_seed},
            {"vocab_size", vocab.size()},
            {"dims",
             {{"vocab", dims.vocab},
              {"embed", dims.embed},
              {"hidden", dims.hidden},
              {"channels", dims.channels},
              {"locations", dims.locations},
              {"attn", dims.attn}}}};
}

void save_vocab(const std::string& path, const Vocab& vocab) {
    json j = {{"min_count", vocab.min_count}, {"tokens", vocab.id_to_token}};
    write_text(path, j.dump(1) + "\n");
}

Vocab load_vocab(const std::string& path) {
    require_file(path, "vocab");
    std::ifstream in(path);
    json j = json::parse(in);
    Vocab v;
    v.min_count = j.at("min_count").get<int>();
    v.id_to_token = j.at("tokens").get<std::vector<std::string>>();
    for (size_t i = 0; i < v.id_to_token.size(); ++i) {
        v.token_to_id[v.id_to_token[i]] = static_cast<int>(i);
    }
    return v;
}

std::unordered_map<std::string, const FeatureGrid*> index_grids(
    const std::vector<FeatureGrid>& grids) {
    std::unordered_map<std::string, const FeatureGrid*> out;
    for (const auto& g : grids) out[g.filename] = &g;
    return out;
}

int cmd_train(const ModelArgs& a) {
    require_file(a.corpus_path, "corpus");
    Corpus full = parse_corpus_file(a.corpus_path);
    Corpus corpus = filter_split(full, a.split);
    if (corpus.entries.empty()) {
        throw UsageError("no entries with split '" + a.split + "' in " + a.corpus_path);
    }

    std::vector<FeatureGrid> grids;
    if (!a.features_path.empty()) {
        require_file(a.features_path, "features");
        grids = load_features(a.features_path);
    }
    auto loaded = index_grids(grids);

    Vocab vocab = build_vocab(corpus, a.min_count);
    std::vector<std::pair<FeatureGrid, std::vector<int>>> dataset;
    for (const auto& entry : corpus.entries) {
        FeatureGrid grid = grid_for(entry.filename, loaded, a);
        for (const auto& cap : entry.captions) {
            dataset.emplace_back(grid, vocab.encode_caption(cap.tokens));
        }
    }

    DecoderDims dims;
    dims.vocab = vocab.size();
    dims.embed = a.embed;
    dims.hidden = a.hidden;
    dims.attn = a.attn;
    dims.channels = dataset.front().first.channels();
    dims.locations = dataset.front().first.locations();

    TrainConfig cfg;
    cfg.learning_rate = a.lr;
    cfg.epochs = a.epochs;
    cfg.batch_size = a.batch;
    cfg.clip_norm = a.clip;
    cfg.seed = a.seed;
    cfg.max_caption_len = a.max_len;

    TrainResult result = train(dataset, dims, cfg);
    result.params.save(a.params_path);
    const std::string vocab_path =
        a.vocab_path.empty() ? a.params_path + ".vocab.json" : a.vocab_path;
    save_vocab(vocab_path, vocab);

    const double final_loss = result.loss_curve.empty() ? 0.0 : result.loss_curve.back();
    std::cout << "trained " << a.epochs << " epochs on " << dataset.size()
              << " caption pairs, final mean loss " << final_loss << "\n";

    if (!a.report_path.empty()) {
        json report = report_skeleton("eval", a.deterministic);
        report["corpus"] = {{"path", a.corpus_path},
                            {"label", full.source_label},
                            {"images", corpus.entries.size()},
                            {"captions", corpus.caption_count()}};
        report["config"] = model_config_echo(a, vocab, dims);
        report["train"] = {{"examples", dataset.size()},
                           {"final_loss", final_loss},
                           {"loss_curve", result.loss_curve}};
        json eval = evaluate_model(corpus, result.params, vocab, loaded, a);
        report.update(eval);
        write_report(a.report_path, report);
        std::cout << "METEOR (aggregate) " << eval["meteor"]["aggregate_score"].get<double>()
                  << " -> " << a.report_path << "\n";
    }
    return kExitOk;
}

int cmd_eval(const ModelArgs& a) {
    require_file(a.corpus_path, "corpus");
    require_file(a.params_path, "params");
    Corpus full = parse_corpus_file(a.corpus_path);
    Corpus corpus = filter_split(full, a.split);
    if (corpus.entries.empty()) {
        throw UsageError("no entries with split '" + a.split + "' in " + a.corpus_path);
    }

    DecoderParams params = DecoderParams::load(a.params_path);
    ModelArgs args = a;
    // synthetic grids must match the trained feature dims
    args.locations = params.dims.locations;
    args.channels = params.dims.channels;
    const std::string vocab_path =
        a.vocab_path.empty() ? a.params_path + ".vocab.json" : a.vocab_path;
    Vocab vocab = load_vocab(vocab_path);
    if (vocab.size() != params.dims.vocab) {
        throw std::runtime_error("vocab size " + std::to_string(vocab.size()) +
                                 " does not match params vocab dim " +
                                 std::to_string(params.dims.vocab));
    }

    std::vector<FeatureGrid> grids;
    if (!a.features_path.empty()) {
        require_file(a.features_path, "features");
        grids = load_features(a.features_path);
    }
    auto loaded = index_grids(grids);

    json report = report_skeleton("eval", a.deterministic);
    report["corpus"] = {{"path", a.corpus_path},
                        {"label", full.source_label},
                        {"images", corpus.entries.size()},
                        {"captions", corpus.caption_count()}};
    report["config"] = model_config_echo(args, vocab, params.dims);
    json eval = evaluate_model(corpus, params, vocab, loaded, args);
    report.update(eval);
    std::cout << "METEOR (aggregate) " << eval["meteor"]["aggregate_score"].get<double>()
              << "  mean " << eval["meteor"]["mean_sentence_score"].get<double>() << "  BLEU "
              << eval["bleu"]["score"].get<double>() << "\n";
    if (!a.report_path.empty()) write_report(a.report_path, report);
    return kExitOk;
}

// ---- compare --------------------------------------------------------------

struct CompareArgs {
    std::string left_path, right_path, report_path;
    bool deterministic = false;
};

json load_json(const std::string& path) {
    require_file(path, "report");
    std::ifstream in(path);
    return json::parse(in);
}

int cmd_compare(const CompareArgs& a) {
    json left = load_json(a.left_path);
    json right = load_json(a.right_path);

    json report = report_skeleton("compare", a.deterministic);
    report["left"] = a.left_path;
    report["right"] = a.right_path;

    bool any = false;
    if (left.contains("stats") && right.contains("stats")) {
        any = true;
        StatsComparison cmp =
            compare_stats(stats_from_json(left["stats"]), stats_from_json(right["stats"]));
        report["stats_delta"] = {
            {"unique_words", cmp.unique_words_delta},
            {"one_time_words", cmp.one_time_words_delta},
            {"misspelled_token_ratio", cmp.misspelled_token_ratio_delta},
            {"duplicate_caption_ratio", cmp.duplicate_caption_ratio_delta},
        };
        report["stats_directions"] = {
            {"unique_words", direction_name(cmp.unique_words_dir)},
            {"one_time_words", direction_name(cmp.one_time_words_dir)},
            {"misspelled_token_ratio", direction_name(cmp.misspelled_dir)},
            {"duplicate_caption_ratio", direction_name(cmp.duplicate_dir)},
        };
        std::cout << std::left << std::setw(28) << "metric" << std::setw(14) << "delta"
                  << "direction\n";
        for (const auto& [k, v] : report["stats_delta"].items()) {
            std::cout << std::setw(28) << k << std::setw(14) << v.dump()
                      << report["stats_directions"][k].get<std::string>() << "\n";
        }
    }
    if (left.contains("meteor") && right.contains("meteor")) {
        any = true;
        json delta;
        for (const char* key : {"aggregate_score", "mean_sentence_score"}) {
            if (left["meteor"].contains(key) && right["meteor"].contains(key)) {
                delta[key] =
                    right["meteor"][key].get<double>() - left["meteor"][key].get<double>();
            }
        }
        report["meteor_delta"] = delta;
        if (delta.contains("aggregate_score")) {
            std::cout << std::left << std::setw(28) << "meteor aggregate delta"
                      << delta["aggregate_score"].get<double>() << "\n";
        }
    }
    if (left.contains("bleu") && right.contains("bleu") && left["bleu"].contains("score") &&
        right["bleu"].contains("score")) {
        any = true;
        report["bleu_delta"] = {
            {"score", right["bleu"]["score"].get<double>() - left["bleu"]["score"].get<double>()}};
    }
    if (!any) {
        throw UsageError("reports share no comparable section (need stats, meteor or bleu)");
    }
    if (!a.report_path.empty()) write_report(a.report_path, report);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"caption corpus toolkit: stats, LLM correction, METEOR, captioner"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    StatsArgs sa;
    CLI::App* stats = app.add_subcommand("stats", "corpus quality statistics");
    stats->add_option("--corpus", sa.corpus_path, "corpus JSON path")->required();
    stats->add_option("--dict", sa.dict_path, "dictionary word list")->required();
    stats->add_option("--report", sa.report_path, "write JSON report here");
    stats->add_option("--histogram", sa.histogram_path, "write repetition histogram CSV here");
    stats->add_option("--label", sa.label, "corpus label used in the report");
    stats->add_flag("--deterministic", sa.deterministic, "omit timestamps from reports");

    CorrectArgs ca;
    CLI::App* correct = app.add_subcommand("correct", "rewrite captions through a chat model");
    correct->add_option("--corpus", ca.corpus_path, "corpus JSON path")->required();
    correct->add_option("--out", ca.out_path, "corrected corpus output path")->required();
    correct->add_option("--records", ca.records_path, "write per-caption records CSV here");
    correct->add_option("--cache-dir", ca.cache_dir, "response cache directory");
    correct->add_option("--endpoint", ca.endpoint, "chat completion endpoint URL");
    correct->add_option("--model", ca.model, "model name");
    correct->add_option("--temperature", ca.temperature, "sampling temperature");
    correct->add_option("--retries", ca.retries, "max retries per caption");
    correct->add_option("--concurrency", ca.concurrency, "parallel requests (live only)");
    correct->add_option("--timeout-ms", ca.timeout_ms, "per-request timeout");
    correct->add_flag("--live", ca.live,
                      "call the real endpoint (default is the offline mock transport)");

    auto add_model_options = [](CLI::App* cmd, ModelArgs& m, bool training) {
        cmd->add_option("--corpus", m.corpus_path, "corpus JSON path")->required();
        cmd->add_option("--features", m.features_path,
                        "feature grid file (omit to use seeded synthetic grids)");
        cmd->add_option("--vocab", m.vocab_path, "vocab JSON (default: params path + .vocab.json)");
        cmd->add_option("--report", m.report_path, "write JSON eval report here");
        cmd->add_option("--split", m.split, "train|val|test|all");
        cmd->add_option("--max-len", m.max_len, "max caption length");
        cmd->add_option("--locations", m.locations, "synthetic grid locations");
        cmd->add_option("--channels", m.channels, "synthetic grid channels");
        cmd->add_option("--feature-seed", m.feature_seed, "synthetic grid seed");
        cmd->add_flag("--deterministic", m.deterministic, "omit timestamps from reports");
        if (training) {
            cmd->add_option("--params-out", m.params_path, "trained parameter file")->required();
            cmd->add_option("--epochs", m.epochs, "training epochs");
            cmd->add_option("--lr", m.lr, "learning rate");
            cmd->add_option("--batch", m.batch, "batch size");
            cmd->add_option("--clip", m.clip, "gradient clip norm");
            cmd->add_option("--seed", m.seed, "init and shuffle seed");
            cmd->add_option("--min-count", m.min_count, "vocab min token count");
            cmd->add_option("--embed", m.embed, "embedding size");
            cmd->add_option("--hidden", m.hidden, "LSTM hidden size");
            cmd->add_option("--attn", m.attn, "attention projection size");
        } else {
            cmd->add_option("--params", m.params_path, "trained parameter file")->required();
            cmd->add_option("--attention", m.attention_path, "write attention maps JSON here");
        }
    };

    ModelArgs ta;
    CLI::App* train_cmd = app.add_subcommand("train", "train the attention captioner");
    add_model_options(train_cmd, ta, true);

    ModelArgs ea;
    ea.split = "all";
    CLI::App* eval_cmd = app.add_subcommand("eval", "decode and score a trained captioner");
    add_model_options(eval_cmd, ea, false);

    CompareArgs pa;
    CLI::App* compare = app.add_subcommand("compare", "diff two reports");
    compare->add_option("--left", pa.left_path, "baseline report JSON")->required();
    compare->add_option("--right", pa.right_path, "comparison report JSON")->required();
    compare->add_option("--report", pa.report_path, "write comparison JSON here");
    compare->add_flag("--deterministic", pa.deterministic, "omit timestamps from reports");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (stats->parsed()) return cmd_stats(sa);
        if (correct->parsed()) return cmd_correct(ca);
        if (train_cmd->parsed()) return cmd_train(ta);
        if (eval_cmd->parsed()) return cmd_eval(ea);
        if (compare->parsed()) return cmd_compare(pa);
    } catch (const UsageError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const SchemaError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const json::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitPipeline;
    }
    return kExitUsage;
}
