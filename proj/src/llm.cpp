#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "capforge/llm.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace capforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kGrammarPrompt =
    "You are a helpful assistant that follows instructions extremely well. The following "
    "sentence may have several grammatical errors, please respond with a grammatically correct "
    "sentence that means the same thing and if possible, is more concise.";

const char* kDescribePrompt =
    "You are a helpful assistant that follows instructions extremely well. The following text "
    "describes the contents of an overhead satellite image. Please respond with one detailed, "
    "natural-sounding caption for the scene it describes.";

const char* kMockOriginal = "many planes are parked next to a long building in an airport .";
const char* kMockCorrected = "Several planes are parked alongside a lengthy building at the airport.";

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

const std::unordered_map<std::string, std::vector<std::string>>& synonym_table() {
    static const std::unordered_map<std::string, std::vector<std::string>> table = {
        {"many", {"many", "several", "numerous", "various", "multiple"}},
        {"a", {"a", "one", "a", "one", "a"}},
        {"the", {"the", "this", "that", "the", "this"}},
        {"are", {"are", "appear", "stand", "sit", "lie"}},
        {"is", {"is", "appears", "stands", "sits", "lies"}},
        {"next", {"next", "adjacent", "close", "near", "next"}},
        {"some", {"some", "a few", "scattered", "assorted", "certain"}},
        {"green", {"green", "verdant", "lush", "leafy", "emerald"}},
        {"large", {"large", "big", "sizable", "spacious", "vast"}},
        {"buildings", {"buildings", "structures", "blocks", "houses", "edifices"}},
        {"trees", {"trees", "groves", "woods", "foliage", "plantings"}},
        {"planes", {"planes", "aircraft", "airplanes", "jets", "aeroplanes"}},
        {"surrounded", {"surrounded", "encircled", "ringed", "bordered", "flanked"}},
        {"parked", {"parked", "stationed", "docked", "positioned", "arranged"}},
    };
    return table;
}

} // namespace

PromptTemplate PromptTemplate::grammar_correct() {
    return {Mode::grammar_correct, kGrammarPrompt};
}

PromptTemplate PromptTemplate::full_describe() {
    return {Mode::full_describe, kDescribePrompt};
}

const char* correction_status_name(CorrectionStatus s) {
    switch (s) {
        case CorrectionStatus::fresh: return "fresh";
        case CorrectionStatus::cached: return "cached";
        case CorrectionStatus::failed_kept_original: return "failed-kept-original";
    }
    return "unknown";
}

TransportReply MockChatTransport::complete(const ChatRequest& request) {
    std::lock_guard<std::mutex> lock(mu_);
    ++calls_;
    const std::string text = trim(request.user_text);
    if (text == kMockOriginal) {
        return {true, kMockCorrected};
    }

    const int variant = seen_[text]++;
    const auto& table = synonym_table();

    std::istringstream words(text);
    std::string word, rewritten;
    while (words >> word) {
        if (word == ".") continue; // fold the dataset's floating period away
        auto it = table.find(word);
        const std::string& pick =
            it == table.end() ? word : it->second[static_cast<size_t>(variant) % it->second.size()];
        if (!rewritten.empty()) rewritten += ' ';
        rewritten += pick;
    }
    if (!rewritten.empty()) {
        rewritten[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(rewritten[0])));
        if (!std::ispunct(static_cast<unsigned char>(rewritten.back()))) rewritten += '.';
    }

    // Guarantee distinct outputs for repeated inputs even when no synonym applies.
    auto& prior = produced_[text];
    std::string out = rewritten;
    int take = 2;
    while (std::find(prior.begin(), prior.end(), out) != prior.end()) {
        out = rewritten + " Noted again (take " + std::to_string(take++) + ").";
    }
    prior.push_back(out);
    return {true, out};
}

int64_t MockChatTransport::call_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return calls_;
}

HttpChatTransport::HttpChatTransport(const CorrectionConfig& config)
    : timeout_ms_(config.timeout_ms) {
    const std::string& url = config.endpoint_url;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw std::invalid_argument("endpoint URL missing scheme: " + url);
    }
    scheme_ = url.substr(0, scheme_end);
    if (scheme_ != "http" && scheme_ != "https") {
        throw std::invalid_argument("unsupported endpoint scheme: " + scheme_);
    }
    std::string rest = url.substr(scheme_end + 3);
    auto path_start = rest.find('/');
    std::string hostport = path_start == std::string::npos ? rest : rest.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : rest.substr(path_start);
    auto colon = hostport.find(':');
    if (colon == std::string::npos) {
        host_ = hostport;
        port_ = scheme_ == "https" ? 443 : 80;
    } else {
        host_ = hostport.substr(0, colon);
        port_ = std::atoi(hostport.c_str() + colon + 1);
    }
    if (host_.empty() || port_ <= 0) {
        throw std::invalid_argument("cannot parse endpoint URL: " + url);
    }

    const char* key = std::getenv("CAPFORGE_API_KEY");
    if (!key) key = std::getenv("OPENAI_API_KEY");
    if (!key || !*key) {
        throw std::runtime_error(
            "no API credential: set CAPFORGE_API_KEY (or OPENAI_API_KEY) for live runs");
    }
    api_key_ = key;
}

TransportReply HttpChatTransport::complete(const ChatRequest& request) {
    json body = {
        {"model", request.model},
        {"temperature", request.temperature},
        {"messages",
         {{{"role", "system"}, {"content", request.system_text}},
          {{"role", "user"}, {"content", request.user_text}}}},
    };

    httplib::Client client(scheme_ + "://" + host_ + ":" + std::to_string(port_));
    client.set_connection_timeout(std::chrono::milliseconds(timeout_ms_));
    client.set_read_timeout(std::chrono::milliseconds(timeout_ms_));
    client.set_bearer_token_auth(api_key_);

    auto res = client.Post(path_, body.dump(), "application/json");
    if (!res) {
        return {false, "transport error: " + httplib::to_string(res.error())};
    }
    if (res->status != 200) {
        return {false, "HTTP " + std::to_string(res->status) + ": " + res->body};
    }
    try {
        json reply = json::parse(res->body);
        return {true, reply.at("choices").at(0).at("message").at("content").get<std::string>()};
    } catch (const std::exception& ex) {
        return {false, std::string("unparseable completion response: ") + ex.what()};
    }
}

std::string request_fingerprint(const std::string& system_text, const std::string& raw,
                                const std::string& model_name, double temperature) {
    char temp_buf[32];
    std::snprintf(temp_buf, sizeof(temp_buf), "%.6g", temperature);
    uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        h ^= 0x1f;
        h *= 1099511628211ULL;
    };
    mix(system_text);
    mix(raw);
    mix(model_name);
    mix(temp_buf);
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return out;
}

std::optional<std::string> validate_response(const std::string& corrected,
                                             const std::string& original,
                                             const std::string& system_text) {
    const std::string trimmed = trim(corrected);
    if (trimmed.empty()) return "empty reply";
    const size_t original_tokens = std::max<size_t>(1, tokenize(original).size());
    const size_t reply_tokens = tokenize(trimmed).size();
    if (reply_tokens > 5 * original_tokens) {
        return "reply length " + std::to_string(reply_tokens) + " exceeds 5x original (" +
               std::to_string(original_tokens) + " tokens)";
    }
    if (!system_text.empty() && trimmed.find(system_text) != std::string::npos) {
        return "reply echoes the system prompt";
    }
    return std::nullopt;
}

namespace {

fs::path cache_path(const CorrectionConfig& config, const std::string& fingerprint) {
    return fs::path(config.cache_dir) / (fingerprint + ".json");
}

std::optional<std::string> cache_lookup(const CorrectionConfig& config,
                                        const std::string& fingerprint, const std::string& raw) {
    if (config.cache_dir.empty()) return std::nullopt;
    std::ifstream in(cache_path(config, fingerprint));
    if (!in) return std::nullopt;
    try {
        json entry = json::parse(in);
        if (entry.at("original").get<std::string>() != raw) return std::nullopt; // hash collision
        return entry.at("corrected").get<std::string>();
    } catch (const std::exception&) {
        return std::nullopt; // unreadable entry behaves like a miss
    }
}

void cache_store(const CorrectionConfig& config, const std::string& fingerprint,
                 const PromptTemplate& prompt, const std::string& raw,
                 const std::string& corrected) {
    if (config.cache_dir.empty()) return;
    fs::create_directories(config.cache_dir);
    json entry = {
        {"model", config.model_name},
        {"temperature", config.temperature},
        {"system", prompt.system_text},
        {"original", raw},
        {"corrected", corrected},
    };
    std::ostringstream tid;
    tid << std::this_thread::get_id();
    fs::path tmp = cache_path(config, fingerprint + ".tmp." + tid.str());
    {
        std::ofstream out(tmp);
        out << entry.dump(1) << '\n';
    }
    fs::rename(tmp, cache_path(config, fingerprint));
}

} // namespace

CorrectionRecord correct_caption(const std::string& raw, const PromptTemplate& prompt,
                                 const CorrectionConfig& config, ChatTransport& transport) {
    if (raw.empty()) throw std::invalid_argument("cannot correct an empty caption");

    CorrectionRecord record;
    record.original = raw;
    record.request_fingerprint =
        request_fingerprint(prompt.system_text, raw, config.model_name, config.temperature);

    if (auto hit = cache_lookup(config, record.request_fingerprint, raw)) {
        record.corrected = *hit;
        record.status = CorrectionStatus::cached;
        return record;
    }

    ChatRequest request{config.model_name, config.temperature, prompt.system_text, raw};
    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        if (attempt > 0 && config.backoff_base_ms > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(config.backoff_base_ms << (attempt - 1)));
        }
        TransportReply reply = transport.complete(request);
        if (!reply.ok) continue;
        std::string corrected = trim(reply.content);
        if (validate_response(corrected, raw, prompt.system_text)) continue; // rejected = retry
        record.corrected = corrected;
        record.status = CorrectionStatus::fresh;
        cache_store(config, record.request_fingerprint, prompt, raw, corrected);
        return record;
    }

    record.corrected = raw;
    record.status = CorrectionStatus::failed_kept_original;
    return record;
}

CorrectionRun correct_corpus(const Corpus& corpus, const PromptTemplate& prompt,
                             const CorrectionConfig& config, ChatTransport& transport) {
    struct Job {
        size_t entry;
        size_t caption;
    };
    std::vector<Job> jobs;
    for (size_t e = 0; e < corpus.entries.size(); ++e) {
        for (size_t c = 0; c < corpus.entries[e].captions.size(); ++c) {
            jobs.push_back({e, c});
        }
    }

    std::vector<CorrectionRecord> records(jobs.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= jobs.size()) break;
            const auto& entry = corpus.entries[jobs[i].entry];
            const auto& cap = entry.captions[jobs[i].caption];
            records[i] = correct_caption(cap.raw, prompt, config, transport);
            records[i].filename = entry.filename;
            records[i].sentid = cap.sentid;
        }
    };

    const size_t n_threads =
        std::min<size_t>(std::max(1, config.concurrency), std::max<size_t>(1, jobs.size()));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    CorrectionRun run;
    run.corpus = corpus;
    run.corpus.source_label = "corrected";
    run.corpus.warnings.clear();
    for (size_t i = 0; i < jobs.size(); ++i) {
        Caption& cap = run.corpus.entries[jobs[i].entry].captions[jobs[i].caption];
        cap.raw = records[i].corrected;
        cap.tokens = tokenize(cap.raw);
    }
    run.records = std::move(records);
    return run;
}

static std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string records_csv(const std::vector<CorrectionRecord>& records) {
    std::ostringstream out;
    out << "filename,sentid,original,corrected,status\n";
    for (const auto& r : records) {
        out << csv_field(r.filename) << ',' << r.sentid << ',' << csv_field(r.original) << ','
            << csv_field(r.corrected) << ',' << correction_status_name(r.status) << '\n';
    }
    return out.str();
}

} // namespace capforge
