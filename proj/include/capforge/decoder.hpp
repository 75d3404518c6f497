#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "capforge/corpus.hpp"
#include "capforge/features.hpp"

namespace capforge {

struct DecoderDims {
    int vocab = 0;     // V
    int embed = 64;    // m
    int hidden = 128;  // H
    int channels = 0;  // D
    int locations = 0; // L
    int attn = 64;     // k
};

// Soft-attention LSTM caption decoder. All tensors are stored as matrices;
// vectors are n x 1. tensors() exposes every learnable tensor by name in a
// fixed order, which the optimizer, gradient checks and serialization share.
struct DecoderParams {
    DecoderDims dims;

    Eigen::MatrixXd embedding; // V x m

    // gate weights over [embedded token ; context], previous hidden, bias
    Eigen::MatrixXd w_xi, w_xf, w_xo, w_xg; // H x (m+D)
    Eigen::MatrixXd w_hi, w_hf, w_ho, w_hg; // H x H
    Eigen::MatrixXd b_i, b_f, b_o, b_g;     // H x 1

    Eigen::MatrixXd attn_feat;   // k x D
    Eigen::MatrixXd attn_hidden; // k x H
    Eigen::MatrixXd attn_score;  // k x 1

    Eigen::MatrixXd init_h_w, init_h_b; // H x D, H x 1
    Eigen::MatrixXd init_c_w, init_c_b; // H x D, H x 1

    Eigen::MatrixXd out_w, out_b; // V x H, V x 1

    std::vector<std::pair<std::string, Eigen::MatrixXd*>> tensors();
    std::vector<std::pair<std::string, const Eigen::MatrixXd*>> tensors() const;

    static DecoderParams zeros(const DecoderDims& dims);
    double gradient_norm() const; // L2 over every tensor
    void axpy(double alpha, const DecoderParams& other);
    void save(const std::string& path) const;
    static DecoderParams load(const std::string& path);
};

DecoderParams init_decoder(const DecoderDims& dims, uint64_t seed);

struct AttendResult {
    Eigen::VectorXd alpha;   // L
    Eigen::VectorXd context; // D
};

AttendResult attend(const FeatureGrid& features, const Eigen::VectorXd& h_prev,
                    const DecoderParams& params);

struct LstmState {
    Eigen::VectorXd h;
    Eigen::VectorXd c;
};

LstmState lstm_step(const Eigen::VectorXd& embedded, const Eigen::VectorXd& context,
                    const Eigen::VectorXd& h, const Eigen::VectorXd& c,
                    const DecoderParams& params);

// Everything backward() needs, captured during the teacher-forced pass.
struct ForwardTape {
    FeatureGrid features;
    std::vector<int> gold;
    Eigen::VectorXd feat_mean;
    Eigen::VectorXd h0, c0;
    double loss = 0.0;

    struct Step {
        int input_token = 0;
        int target_token = 0;
        Eigen::VectorXd x, alpha, context, u;
        Eigen::MatrixXd attn_tanh; // k x L
        Eigen::VectorXd gate_i, gate_f, gate_o, gate_g;
        Eigen::VectorXd c_prev, h_prev, c, h, c_tanh;
        Eigen::VectorXd probs;
    };
    std::vector<Step> steps;
};

ForwardTape forward_loss(const FeatureGrid& features, const std::vector<int>& gold,
                         const DecoderParams& params);

DecoderParams backward(const ForwardTape& tape, const DecoderParams& params);

struct TrainConfig {
    double learning_rate = 0.1;
    int epochs = 100;
    int batch_size = 4;
    double clip_norm = 5.0;
    uint64_t seed = 1;
    int max_caption_len = 30;
};

struct TrainResult {
    DecoderParams params;
    std::vector<double> loss_curve; // mean loss per epoch
};

class TrainingDiverged : public std::runtime_error {
public:
    TrainingDiverged(int epoch, const std::string& what)
        : std::runtime_error(what), epoch(epoch) {}
    int epoch;
};

TrainResult train(const std::vector<std::pair<FeatureGrid, std::vector<int>>>& dataset,
                  const DecoderDims& dims, const TrainConfig& config);

struct DecodeResult {
    std::vector<int> token_ids;                  // without <start>/<end>
    std::vector<std::string> tokens;
    std::vector<Eigen::VectorXd> attention_maps; // one L-vector per emitted token
};

DecodeResult greedy_decode(const FeatureGrid& features, const DecoderParams& params,
                           const Vocab& vocab, int max_len);

std::string attention_maps_json(const DecodeResult& result);

} // namespace capforge
