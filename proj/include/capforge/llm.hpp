#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "capforge/corpus.hpp"

namespace capforge {

struct PromptTemplate {
    enum class Mode { grammar_correct, full_describe };
    Mode mode = Mode::grammar_correct;
    std::string system_text;

    static PromptTemplate grammar_correct();
    // Whole-scene caption generation from a user-supplied description. Text
    // only, experimental: no image bytes are ever sent.
    static PromptTemplate full_describe();
};

struct CorrectionConfig {
    std::string model_name = "gpt-3.5-turbo";
    double temperature = 1.0;
    int max_retries = 2;
    int64_t timeout_ms = 30000;
    int64_t backoff_base_ms = 100;
    std::string cache_dir;      // empty = caching disabled
    std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
    int concurrency = 4;
};

enum class CorrectionStatus { fresh, cached, failed_kept_original };
const char* correction_status_name(CorrectionStatus s);

struct CorrectionRecord {
    std::string filename;
    int64_t sentid = 0;
    std::string original;
    std::string corrected;
    CorrectionStatus status = CorrectionStatus::fresh;
    std::string request_fingerprint;
};

struct ChatRequest {
    std::string model;
    double temperature = 1.0;
    std::string system_text;
    std::string user_text;
};

struct TransportReply {
    bool ok = false;
    std::string content; // assistant message when ok, error text otherwise
};

class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    virtual TransportReply complete(const ChatRequest& request) = 0;
};

// Deterministic stand-in for the chat endpoint. Repeated sentences get
// rotating synonym substitutions so corrected corpora de-duplicate the way
// a temperature-1.0 model would. Thread safe; order of calls still decides
// which variant a repeat receives, so run it single-threaded when byte-exact
// output matters.
class MockChatTransport : public ChatTransport {
public:
    TransportReply complete(const ChatRequest& request) override;
    int64_t call_count() const;

private:
    mutable std::mutex mu_;
    int64_t calls_ = 0;
    std::unordered_map<std::string, int> seen_;
    std::unordered_map<std::string, std::vector<std::string>> produced_;
};

// HTTPS chat-completion client. Credential comes from CAPFORGE_API_KEY or
// OPENAI_API_KEY; construction fails fast when it is missing or the endpoint
// URL does not parse.
class HttpChatTransport : public ChatTransport {
public:
    explicit HttpChatTransport(const CorrectionConfig& config);
    TransportReply complete(const ChatRequest& request) override;

private:
    std::string scheme_, host_, path_;
    int port_ = 0;
    std::string api_key_;
    int64_t timeout_ms_ = 30000;
};

std::string request_fingerprint(const std::string& system_text, const std::string& raw,
                                const std::string& model_name, double temperature);

// nullopt = accepted, otherwise the rejection reason.
std::optional<std::string> validate_response(const std::string& corrected,
                                             const std::string& original,
                                             const std::string& system_text);

CorrectionRecord correct_caption(const std::string& raw, const PromptTemplate& prompt,
                                 const CorrectionConfig& config, ChatTransport& transport);

struct CorrectionRun {
    Corpus corpus;
    std::vector<CorrectionRecord> records;
};

CorrectionRun correct_corpus(const Corpus& corpus, const PromptTemplate& prompt,
                             const CorrectionConfig& config, ChatTransport& transport);

std::string records_csv(const std::vector<CorrectionRecord>& records);

} // namespace capforge
