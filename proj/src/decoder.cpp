#include "capforge/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

namespace capforge {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd sigmoid(const VectorXd& v) {
    return v.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
}

VectorXd softmax(const VectorXd& v) {
    VectorXd e = (v.array() - v.maxCoeff()).exp();
    return e / e.sum();
}

void check_finite(const Eigen::Ref<const MatrixXd>& m, const char* what) {
    if (!m.allFinite()) throw std::invalid_argument(std::string("non-finite values in ") + what);
}

} // namespace

std::vector<std::pair<std::string, MatrixXd*>> DecoderParams::tensors() {
    return {
        {"embedding", &embedding}, {"w_xi", &w_xi},  {"w_xf", &w_xf},
        {"w_xo", &w_xo},           {"w_xg", &w_xg},  {"w_hi", &w_hi},
        {"w_hf", &w_hf},           {"w_ho", &w_ho},  {"w_hg", &w_hg},
        {"b_i", &b_i},             {"b_f", &b_f},    {"b_o", &b_o},
        {"b_g", &b_g},             {"attn_feat", &attn_feat},
        {"attn_hidden", &attn_hidden},              {"attn_score", &attn_score},
        {"init_h_w", &init_h_w},   {"init_h_b", &init_h_b},
        {"init_c_w", &init_c_w},   {"init_c_b", &init_c_b},
        {"out_w", &out_w},         {"out_b", &out_b},
    };
}

std::vector<std::pair<std::string, const MatrixXd*>> DecoderParams::tensors() const {
    std::vector<std::pair<std::string, const MatrixXd*>> out;
    for (auto& [name, ptr] : const_cast<DecoderParams*>(this)->tensors()) {
        out.emplace_back(name, ptr);
    }
    return out;
}

DecoderParams DecoderParams::zeros(const DecoderDims& dims) {
    if (dims.vocab <= 0 || dims.embed <= 0 || dims.hidden <= 0 || dims.channels <= 0 ||
        dims.locations <= 0 || dims.attn <= 0) {
        throw std::invalid_argument("all decoder dimensions must be positive");
    }
    DecoderParams p;
    p.dims = dims;
    const int V = dims.vocab, m = dims.embed, H = dims.hidden, D = dims.channels, k = dims.attn;
    p.embedding = MatrixXd::Zero(V, m);
    for (MatrixXd* w : {&p.w_xi, &p.w_xf, &p.w_xo, &p.w_xg}) *w = MatrixXd::Zero(H, m + D);
    for (MatrixXd* w : {&p.w_hi, &p.w_hf, &p.w_ho, &p.w_hg}) *w = MatrixXd::Zero(H, H);
    for (MatrixXd* b : {&p.b_i, &p.b_f, &p.b_o, &p.b_g}) *b = MatrixXd::Zero(H, 1);
    p.attn_feat = MatrixXd::Zero(k, D);
    p.attn_hidden = MatrixXd::Zero(k, H);
    p.attn_score = MatrixXd::Zero(k, 1);
    p.init_h_w = MatrixXd::Zero(H, D);
    p.init_h_b = MatrixXd::Zero(H, 1);
    p.init_c_w = MatrixXd::Zero(H, D);
    p.init_c_b = MatrixXd::Zero(H, 1);
    p.out_w = MatrixXd::Zero(V, H);
    p.out_b = MatrixXd::Zero(V, 1);
    return p;
}

double DecoderParams::gradient_norm() const {
    double sum = 0.0;
    for (auto& [name, t] : tensors()) sum += t->squaredNorm();
    return std::sqrt(sum);
}

void DecoderParams::axpy(double alpha, const DecoderParams& other) {
    auto mine = tensors();
    auto theirs = other.tensors();
    for (size_t i = 0; i < mine.size(); ++i) {
        *mine[i].second += alpha * *theirs[i].second;
    }
}

DecoderParams init_decoder(const DecoderDims& dims, uint64_t seed) {
    DecoderParams p = DecoderParams::zeros(dims);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.08, 0.08);
    for (auto& [name, t] : p.tensors()) {
        if (name.rfind("b_", 0) == 0 || name == "init_h_b" || name == "init_c_b" ||
            name == "out_b") {
            continue; // biases stay zero
        }
        for (int c = 0; c < t->cols(); ++c) {
            for (int r = 0; r < t->rows(); ++r) {
                (*t)(r, c) = dist(rng);
            }
        }
    }
    p.b_f.setOnes(); // open forget gates at the start
    return p;
}

AttendResult attend(const FeatureGrid& features, const VectorXd& h_prev,
                    const DecoderParams& params) {
    check_finite(features.values, "feature grid");
    check_finite(h_prev, "hidden state");
    // scores e_i = w . tanh(Wa a_i + Wh h_prev)
    MatrixXd pre = params.attn_feat * features.values.transpose(); // k x L
    pre.colwise() += (params.attn_hidden * h_prev).col(0).eval();
    MatrixXd q = pre.array().tanh();
    VectorXd e = q.transpose() * params.attn_score.col(0);
    AttendResult r;
    r.alpha = softmax(e);
    r.context = features.values.transpose() * r.alpha;
    return r;
}

LstmState lstm_step(const VectorXd& embedded, const VectorXd& context, const VectorXd& h,
                    const VectorXd& c, const DecoderParams& params) {
    check_finite(embedded, "embedded token");
    check_finite(context, "context vector");
    check_finite(h, "hidden state");
    check_finite(c, "cell state");
    VectorXd u(embedded.size() + context.size());
    u << embedded, context;
    VectorXd gi = sigmoid(params.w_xi * u + params.w_hi * h + params.b_i.col(0));
    VectorXd gf = sigmoid(params.w_xf * u + params.w_hf * h + params.b_f.col(0));
    VectorXd go = sigmoid(params.w_xo * u + params.w_ho * h + params.b_o.col(0));
    VectorXd gg = (params.w_xg * u + params.w_hg * h + params.b_g.col(0)).array().tanh();
    LstmState next;
    next.c = gf.cwiseProduct(c) + gi.cwiseProduct(gg);
    next.h = go.cwiseProduct(next.c.array().tanh().matrix());
    return next;
}

ForwardTape forward_loss(const FeatureGrid& features, const std::vector<int>& gold,
                         const DecoderParams& params) {
    const auto& dims = params.dims;
    if (gold.size() < 2 || gold.front() != Vocab::kStart || gold.back() != Vocab::kEnd) {
        throw std::invalid_argument("gold sequence must be wrapped in <start>/<end>");
    }
    for (int id : gold) {
        if (id < 0 || id >= dims.vocab) {
            throw std::out_of_range("gold token id " + std::to_string(id) + " >= vocab size " +
                                    std::to_string(dims.vocab));
        }
    }

    ForwardTape tape;
    tape.features = features;
    tape.gold = gold;
    tape.feat_mean = features.values.colwise().mean().transpose();
    tape.h0 = (params.init_h_w * tape.feat_mean + params.init_h_b.col(0)).array().tanh();
    tape.c0 = (params.init_c_w * tape.feat_mean + params.init_c_b.col(0)).array().tanh();

    VectorXd h = tape.h0, c = tape.c0;
    double total = 0.0;
    const size_t n_steps = gold.size() - 1;
    for (size_t t = 0; t < n_steps; ++t) {
        ForwardTape::Step step;
        step.input_token = gold[t];
        step.target_token = gold[t + 1];
        step.h_prev = h;
        step.c_prev = c;
        step.x = params.embedding.row(gold[t]).transpose();

        MatrixXd pre = params.attn_feat * features.values.transpose();
        pre.colwise() += (params.attn_hidden * h).col(0).eval();
        step.attn_tanh = pre.array().tanh();
        VectorXd e = step.attn_tanh.transpose() * params.attn_score.col(0);
        step.alpha = softmax(e);
        step.context = features.values.transpose() * step.alpha;

        step.u.resize(dims.embed + dims.channels);
        step.u << step.x, step.context;
        step.gate_i = sigmoid(params.w_xi * step.u + params.w_hi * h + params.b_i.col(0));
        step.gate_f = sigmoid(params.w_xf * step.u + params.w_hf * h + params.b_f.col(0));
        step.gate_o = sigmoid(params.w_xo * step.u + params.w_ho * h + params.b_o.col(0));
        step.gate_g = (params.w_xg * step.u + params.w_hg * h + params.b_g.col(0)).array().tanh();
        step.c = step.gate_f.cwiseProduct(c) + step.gate_i.cwiseProduct(step.gate_g);
        step.c_tanh = step.c.array().tanh();
        step.h = step.gate_o.cwiseProduct(step.c_tanh);

        VectorXd logits = params.out_w * step.h + params.out_b.col(0);
        step.probs = softmax(logits);
        total += -std::log(std::max(step.probs(gold[t + 1]), 1e-300));

        h = step.h;
        c = step.c;
        tape.steps.push_back(std::move(step));
    }
    tape.loss = total / static_cast<double>(n_steps);
    return tape;
}

DecoderParams backward(const ForwardTape& tape, const DecoderParams& params) {
    const auto& dims = params.dims;
    DecoderParams g = DecoderParams::zeros(dims);
    const double inv_steps = 1.0 / static_cast<double>(tape.steps.size());

    VectorXd dh_next = VectorXd::Zero(dims.hidden);
    VectorXd dc_next = VectorXd::Zero(dims.hidden);

    for (int t = static_cast<int>(tape.steps.size()) - 1; t >= 0; --t) {
        const auto& s = tape.steps[static_cast<size_t>(t)];

        VectorXd dlogits = s.probs * inv_steps;
        dlogits(s.target_token) -= inv_steps;
        g.out_w += dlogits * s.h.transpose();
        g.out_b.col(0) += dlogits;

        VectorXd dh = params.out_w.transpose() * dlogits + dh_next;
        VectorXd dct = dh.cwiseProduct(s.gate_o)
                           .cwiseProduct((1.0 - s.c_tanh.array().square()).matrix()) +
                       dc_next;

        VectorXd dpre_o = dh.cwiseProduct(s.c_tanh)
                              .cwiseProduct(s.gate_o)
                              .cwiseProduct((1.0 - s.gate_o.array()).matrix());
        VectorXd dpre_f = dct.cwiseProduct(s.c_prev)
                              .cwiseProduct(s.gate_f)
                              .cwiseProduct((1.0 - s.gate_f.array()).matrix());
        VectorXd dpre_i = dct.cwiseProduct(s.gate_g)
                              .cwiseProduct(s.gate_i)
                              .cwiseProduct((1.0 - s.gate_i.array()).matrix());
        VectorXd dpre_g =
            dct.cwiseProduct(s.gate_i).cwiseProduct((1.0 - s.gate_g.array().square()).matrix());

        dc_next = dct.cwiseProduct(s.gate_f);

        g.w_xi += dpre_i * s.u.transpose();
        g.w_xf += dpre_f * s.u.transpose();
        g.w_xo += dpre_o * s.u.transpose();
        g.w_xg += dpre_g * s.u.transpose();
        g.w_hi += dpre_i * s.h_prev.transpose();
        g.w_hf += dpre_f * s.h_prev.transpose();
        g.w_ho += dpre_o * s.h_prev.transpose();
        g.w_hg += dpre_g * s.h_prev.transpose();
        g.b_i.col(0) += dpre_i;
        g.b_f.col(0) += dpre_f;
        g.b_o.col(0) += dpre_o;
        g.b_g.col(0) += dpre_g;

        VectorXd du = params.w_xi.transpose() * dpre_i + params.w_xf.transpose() * dpre_f +
                      params.w_xo.transpose() * dpre_o + params.w_xg.transpose() * dpre_g;
        VectorXd dh_prev = params.w_hi.transpose() * dpre_i + params.w_hf.transpose() * dpre_f +
                           params.w_ho.transpose() * dpre_o + params.w_hg.transpose() * dpre_g;

        g.embedding.row(s.input_token) += du.head(dims.embed).transpose();

        // context -> attention
        VectorXd dz = du.tail(dims.channels);
        VectorXd dalpha = tape.features.values * dz;
        VectorXd de = s.alpha.cwiseProduct(
            (dalpha.array() - s.alpha.dot(dalpha)).matrix());
        MatrixXd dq = params.attn_score.col(0) * de.transpose(); // k x L
        g.attn_score.col(0) += s.attn_tanh * de;
        MatrixXd dpre_attn = dq.cwiseProduct((1.0 - s.attn_tanh.array().square()).matrix());
        g.attn_feat += dpre_attn * tape.features.values;
        VectorXd dpre_sum = dpre_attn.rowwise().sum();
        g.attn_hidden += dpre_sum * s.h_prev.transpose();
        dh_prev += params.attn_hidden.transpose() * dpre_sum;

        dh_next = dh_prev;
    }

    // initial-state maps
    VectorXd dsh = dh_next.cwiseProduct((1.0 - tape.h0.array().square()).matrix());
    VectorXd dsc = dc_next.cwiseProduct((1.0 - tape.c0.array().square()).matrix());
    g.init_h_w += dsh * tape.feat_mean.transpose();
    g.init_h_b.col(0) += dsh;
    g.init_c_w += dsc * tape.feat_mean.transpose();
    g.init_c_b.col(0) += dsc;
    return g;
}

TrainResult train(const std::vector<std::pair<FeatureGrid, std::vector<int>>>& dataset,
                  const DecoderDims& dims, const TrainConfig& config) {
    if (dataset.empty()) throw std::invalid_argument("training dataset is empty");
    if (config.learning_rate <= 0) throw std::invalid_argument("learning_rate must be > 0");

    TrainResult result;
    result.params = init_decoder(dims, config.seed);
    std::mt19937_64 order_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

    std::vector<size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    const int batch_size = std::max(1, config.batch_size);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), order_rng);
        double epoch_loss = 0.0;
        for (size_t start = 0; start < order.size(); start += static_cast<size_t>(batch_size)) {
            const size_t end = std::min(order.size(), start + static_cast<size_t>(batch_size));
            DecoderParams grads = DecoderParams::zeros(dims);
            for (size_t i = start; i < end; ++i) {
                const auto& [features, gold] = dataset[order[i]];
                ForwardTape tape = forward_loss(features, gold, result.params);
                if (!std::isfinite(tape.loss)) {
                    throw TrainingDiverged(epoch, "non-finite loss at epoch " +
                                                      std::to_string(epoch));
                }
                epoch_loss += tape.loss;
                grads.axpy(1.0, backward(tape, result.params));
            }
            const double scale = 1.0 / static_cast<double>(end - start);
            const double norm = grads.gradient_norm() * scale;
            double step = -config.learning_rate * scale;
            if (config.clip_norm > 0 && norm > config.clip_norm) {
                step *= config.clip_norm / norm;
            }
            result.params.axpy(step, grads);
        }
        result.loss_curve.push_back(epoch_loss / static_cast<double>(dataset.size()));
    }
    return result;
}

DecodeResult greedy_decode(const FeatureGrid& features, const DecoderParams& params,
                           const Vocab& vocab, int max_len) {
    DecodeResult out;
    VectorXd feat_mean = features.values.colwise().mean().transpose();
    VectorXd h = (params.init_h_w * feat_mean + params.init_h_b.col(0)).array().tanh();
    VectorXd c = (params.init_c_w * feat_mean + params.init_c_b.col(0)).array().tanh();

    int token = Vocab::kStart;
    for (int t = 0; t < max_len; ++t) {
        AttendResult att = attend(features, h, params);
        VectorXd x = params.embedding.row(token).transpose();
        LstmState next = lstm_step(x, att.context, h, c, params);
        h = next.h;
        c = next.c;
        VectorXd logits = params.out_w * h + params.out_b.col(0);
        int best = 0;
        logits.maxCoeff(&best);
        if (best == Vocab::kEnd) break;
        out.token_ids.push_back(best);
        out.tokens.push_back(vocab.decode(best));
        out.attention_maps.push_back(att.alpha);
        token = best;
    }
    return out;
}

std::string attention_maps_json(const DecodeResult& result) {
    nlohmann::json doc = nlohmann::json::array();
    for (size_t i = 0; i < result.tokens.size(); ++i) {
        nlohmann::json step;
        step["token"] = result.tokens[i];
        step["weights"] = std::vector<double>(
            result.attention_maps[i].data(),
            result.attention_maps[i].data() + result.attention_maps[i].size());
        doc.push_back(std::move(step));
    }
    return doc.dump(1) + "\n";
}

namespace {

constexpr char kParamsMagic[4] = {'C', 'A', 'P', 'P'};

} // namespace

void DecoderParams::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open params file for writing: " + path);
    out.write(kParamsMagic, 4);
    const int32_t header[6] = {dims.vocab, dims.embed, dims.hidden,
                               dims.channels, dims.locations, dims.attn};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    for (auto& [name, t] : tensors()) {
        out.write(reinterpret_cast<const char*>(t->data()),
                  static_cast<std::streamsize>(sizeof(double)) * t->size());
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

DecoderParams DecoderParams::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open params file: " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kParamsMagic, 4) != 0) {
        throw std::runtime_error("bad magic bytes in params file: " + path);
    }
    int32_t header[6];
    if (!in.read(reinterpret_cast<char*>(header), sizeof(header))) {
        throw std::runtime_error("truncated params header: " + path);
    }
    DecoderDims dims{header[0], header[1], header[2], header[3], header[4], header[5]};
    DecoderParams p = DecoderParams::zeros(dims);
    for (auto& [name, t] : p.tensors()) {
        if (!in.read(reinterpret_cast<char*>(t->data()),
                     static_cast<std::streamsize>(sizeof(double)) * t->size())) {
            throw std::runtime_error("truncated params tensor '" + name + "' in " + path);
        }
    }
    return p;
}

} // namespace capforge
