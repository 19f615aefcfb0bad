// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#include "rdrec/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rdrec/errors.hpp"
#include "rdrec/hashing.hpp"
#include "rdrec/rng.hpp"

namespace rdrec {

using json = nlohmann::json;

void ModelConfig::validate_dims_only() const {
    if (d_model % n_heads != 0) {
        fail(Err::ConfigError, "model: d_model must be divisible by n_heads");
    }
    if (n_layers < 1 || d_model < 2 || d_ff < 1 || n_heads < 1) {
        fail(Err::ConfigError, "model: non-positive architecture dimension");
    }
    if (n_prompt_per_task < 1 || n_tasks < 1 || whole_word_capacity < 1) {
        fail(Err::ConfigError, "model: prompt/task/whole-word sizes must be >= 1");
    }
    if (max_seq_len < n_prompt_per_task + 1) {
        fail(Err::ConfigError, "model: max_seq_len too small for the prompts");
    }
}

void ModelConfig::validate() const {
    validate_dims_only();
    if (vocab_size < 4) {
        fail(Err::ConfigError, "model: vocab_size must cover the specials");
    }
}

Tensor sinusoidal_positions(int max_len, int d) {
    Tensor pos({max_len, d});
    for (int p = 0; p < max_len; ++p) {
        for (int i = 0; i < d / 2; ++i) {
            double freq = std::pow(10000.0, -2.0 * i / static_cast<double>(d));
            pos.data[p * d + 2 * i] = std::sin(p * freq);
            pos.data[p * d + 2 * i + 1] = std::cos(p * freq);
        }
    }
    return pos;
}

namespace {

void init_normal(Tensor& t, Rng& rng, double stddev) {
    for (auto& v : t.data) v = rng.normal(0.0, stddev);
}

void add_block_params(Parameters& p, const std::string& prefix, int d, int d_ff,
                      bool cross) {
    auto attn = [&](const std::string& name) {
        p[prefix + "." + name + ".wq"] = Tensor({d, d});
        p[prefix + "." + name + ".wk"] = Tensor({d, d});
        p[prefix + "." + name + ".wv"] = Tensor({d, d});
        p[prefix + "." + name + ".wo"] = Tensor({d, d});
        p[prefix + "." + name + ".bq"] = Tensor({d});
        p[prefix + "." + name + ".bk"] = Tensor({d});
        p[prefix + "." + name + ".bv"] = Tensor({d});
        p[prefix + "." + name + ".bo"] = Tensor({d});
    };
    attn(cross ? "self" : "attn");
    if (cross) attn("cross");
    p[prefix + ".ffn.w1"] = Tensor({d, d_ff});
    p[prefix + ".ffn.b1"] = Tensor({d_ff});
    p[prefix + ".ffn.w2"] = Tensor({d_ff, d});
    p[prefix + ".ffn.b2"] = Tensor({d});
    int n_ln = cross ? 3 : 2;
    for (int i = 1; i <= n_ln; ++i) {
        p[prefix + ".ln" + std::to_string(i) + ".g"] = Tensor::full({d}, 1.0);
        p[prefix + ".ln" + std::to_string(i) + ".b"] = Tensor({d});
    }
}

} // namespace

Parameters init_parameters(const ModelConfig& cfg, uint64_t seed) {
    cfg.validate();
    Parameters p;
    p["token_embedding"] = Tensor({cfg.vocab_size, cfg.d_model});
    p["whole_word_embedding"] = Tensor({cfg.whole_word_capacity, cfg.d_model});
    p["prompt_bank"] = Tensor({cfg.n_tasks * cfg.n_prompt_per_task, cfg.d_model});
    for (int l = 0; l < cfg.n_layers; ++l) {
        add_block_params(p, "enc" + std::to_string(l), cfg.d_model, cfg.d_ff, false);
        add_block_params(p, "dec" + std::to_string(l), cfg.d_model, cfg.d_ff, true);
    }
    p["enc_final_ln.g"] = Tensor::full({cfg.d_model}, 1.0);
    p["enc_final_ln.b"] = Tensor({cfg.d_model});
    p["dec_final_ln.g"] = Tensor::full({cfg.d_model}, 1.0);
    p["dec_final_ln.b"] = Tensor({cfg.d_model});
    p["output_proj.w"] = Tensor({cfg.d_model, cfg.vocab_size});
    p["output_proj.b"] = Tensor({cfg.vocab_size});

    Rng rng(seed);
    // std::map order makes the init draw sequence reproducible
    for (auto& [name, t] : p) {
        bool is_ln = name.find(".ln") != std::string::npos ||
                     name.find("_ln.") != std::string::npos;
        bool is_bias = !is_ln && name.find(".b") == name.size() - 2;
        if (is_ln || is_bias || name.ends_with(".b1") || name.ends_with(".b2") ||
            name.ends_with(".bq") || name.ends_with(".bk") ||
            name.ends_with(".bv") || name.ends_with(".bo")) {
            continue; // zeros / ones already in place
        }
        init_normal(t, rng, 0.02);
    }
    return p;
}

Batch make_batch(const std::vector<SampleSpec>& samples) {
    Batch batch;
    batch.b = static_cast<int>(samples.size());
    for (const auto& s : samples) {
        batch.t_in = std::max(batch.t_in, static_cast<int>(s.input.ids.size()));
        batch.t_out = std::max(batch.t_out, static_cast<int>(s.target.size()) + 1);
    }
    batch.t_in = std::max(batch.t_in, 0);
    batch.t_out = std::max(batch.t_out, 1);
    batch.input_ids.assign(static_cast<size_t>(batch.b) * batch.t_in, Vocab::kPad);
    batch.ww_ids.assign(static_cast<size_t>(batch.b) * batch.t_in, 0);
    batch.target_ids.assign(static_cast<size_t>(batch.b) * batch.t_out, Vocab::kPad);
    for (int r = 0; r < batch.b; ++r) {
        const auto& s = samples[r];
        batch.input_len.push_back(static_cast<int>(s.input.ids.size()));
        batch.task.push_back(static_cast<int>(s.task));
        for (size_t i = 0; i < s.input.ids.size(); ++i) {
            batch.input_ids[r * batch.t_in + i] = s.input.ids[i];
            batch.ww_ids[r * batch.t_in + i] = s.input.whole_word[i];
        }
        for (size_t i = 0; i < s.target.size(); ++i) {
            batch.target_ids[r * batch.t_out + i] = s.target[i];
        }
        batch.target_ids[r * batch.t_out + s.target.size()] = Vocab::kEos;
        batch.target_len.push_back(static_cast<int>(s.target.size()) + 1);
    }
    return batch;
}

RdrecModel::RdrecModel(ModelConfig cfg, uint64_t seed)
    : cfg_(cfg), params_(init_parameters(cfg, seed)),
      positions_(sinusoidal_positions(cfg.max_seq_len + cfg.n_prompt_per_task,
                                      cfg.d_model)) {}

RdrecModel::RdrecModel(ModelConfig cfg, Parameters params)
    : cfg_(cfg), params_(std::move(params)),
      positions_(sinusoidal_positions(cfg.max_seq_len + cfg.n_prompt_per_task,
                                      cfg.d_model)) {
    cfg_.validate();
}

NodePtr RdrecModel::leaf_of(const std::string& name, bool with_grad) {
    auto it = live_leaves_.find(name);
    if (it != live_leaves_.end()) return it->second;
    auto pit = params_.find(name);
    if (pit == params_.end()) {
        fail(Err::InvalidArgument, "model: unknown parameter " + name);
    }
    NodePtr leaf = make_leaf(pit->second, with_grad, pit->first.c_str());
    live_leaves_.emplace(name, leaf);
    return leaf;
}

namespace {

void check_finite(const NodePtr& n, const std::string& where) {
    if (!n->value.all_finite()) {
        fail(Err::NonFinite, "model: non-finite values after " + where);
    }
}

} // namespace

NodePtr RdrecModel::encoder_stack(const Batch& batch, bool with_grad,
                                  std::vector<int>* enc_valid) {
    const int np = cfg_.n_prompt_per_task;
    for (int w : batch.ww_ids) {
        if (w >= cfg_.whole_word_capacity) {
            fail(Err::SeqOverflow,
                 "model: whole-word index " + std::to_string(w) +
                     " exceeds whole_word_capacity " +
                     std::to_string(cfg_.whole_word_capacity));
        }
    }
    for (int r = 0; r < batch.b; ++r) {
        if (batch.input_len[r] + np > cfg_.max_seq_len) {
            fail(Err::SeqOverflow,
                 "model: input length " + std::to_string(batch.input_len[r]) +
                     " plus " + std::to_string(np) + " prompts exceeds max_seq_len " +
                     std::to_string(cfg_.max_seq_len));
        }
    }
    enc_valid->clear();
    for (int r = 0; r < batch.b; ++r) enc_valid->push_back(batch.input_len[r] + np);

    NodePtr h = encoder_input(batch.b, batch.t_in, np, batch.input_ids,
                              batch.ww_ids, batch.input_len, batch.task,
                              leaf_of("token_embedding", with_grad),
                              leaf_of("whole_word_embedding", with_grad),
                              leaf_of("prompt_bank", with_grad), positions_);
    AttnMask mask;
    mask.q_valid = *enc_valid;
    mask.k_valid = *enc_valid;
    for (int l = 0; l < cfg_.n_layers; ++l) {
        std::string pre = "enc" + std::to_string(l);
        NodePtr a = layer_norm(h, leaf_of(pre + ".ln1.g", with_grad),
                               leaf_of(pre + ".ln1.b", with_grad));
        NodePtr qn = linear(a, leaf_of(pre + ".attn.wq", with_grad),
                            leaf_of(pre + ".attn.bq", with_grad));
        NodePtr kn = linear(a, leaf_of(pre + ".attn.wk", with_grad),
                            leaf_of(pre + ".attn.bk", with_grad));
        NodePtr vn = linear(a, leaf_of(pre + ".attn.wv", with_grad),
                            leaf_of(pre + ".attn.bv", with_grad));
        NodePtr att = multihead_attention(qn, kn, vn, cfg_.n_heads, mask);
        NodePtr o = linear(att, leaf_of(pre + ".attn.wo", with_grad),
                           leaf_of(pre + ".attn.bo", with_grad));
        h = add(h, o);
        NodePtr f = layer_norm(h, leaf_of(pre + ".ln2.g", with_grad),
                               leaf_of(pre + ".ln2.b", with_grad));
        f = linear(f, leaf_of(pre + ".ffn.w1", with_grad),
                   leaf_of(pre + ".ffn.b1", with_grad));
        f = relu(f);
        f = linear(f, leaf_of(pre + ".ffn.w2", with_grad),
                   leaf_of(pre + ".ffn.b2", with_grad));
        h = add(h, f);
        check_finite(h, pre);
    }
    h = layer_norm(h, leaf_of("enc_final_ln.g", with_grad),
                   leaf_of("enc_final_ln.b", with_grad));
    return h;
}

NodePtr RdrecModel::decoder_stack(NodePtr enc_out,
                                  const std::vector<int>& enc_valid, int b,
                                  int t_out, const std::vector<int>& dec_in,
                                  const std::vector<int>& dec_valid,
                                  bool with_grad) {
    if (t_out > cfg_.max_seq_len) {
        fail(Err::SeqOverflow, "model: target length " + std::to_string(t_out) +
                                   " exceeds max_seq_len");
    }
    NodePtr h = decoder_input(b, t_out, dec_in,
                              leaf_of("token_embedding", with_grad), positions_);
    AttnMask self_mask;
    self_mask.q_valid = dec_valid;
    self_mask.k_valid = dec_valid;
    self_mask.causal = true;
    AttnMask cross_mask;
    cross_mask.q_valid = dec_valid;
    cross_mask.k_valid = enc_valid;
    for (int l = 0; l < cfg_.n_layers; ++l) {
        std::string pre = "dec" + std::to_string(l);
        NodePtr a = layer_norm(h, leaf_of(pre + ".ln1.g", with_grad),
                               leaf_of(pre + ".ln1.b", with_grad));
        NodePtr qn = linear(a, leaf_of(pre + ".self.wq", with_grad),
                            leaf_of(pre + ".self.bq", with_grad));
        NodePtr kn = linear(a, leaf_of(pre + ".self.wk", with_grad),
                            leaf_of(pre + ".self.bk", with_grad));
        NodePtr vn = linear(a, leaf_of(pre + ".self.wv", with_grad),
                            leaf_of(pre + ".self.bv", with_grad));
        NodePtr att = multihead_attention(qn, kn, vn, cfg_.n_heads, self_mask);
        h = add(h, linear(att, leaf_of(pre + ".self.wo", with_grad),
                          leaf_of(pre + ".self.bo", with_grad)));
        NodePtr c = layer_norm(h, leaf_of(pre + ".ln2.g", with_grad),
                               leaf_of(pre + ".ln2.b", with_grad));
        NodePtr cq = linear(c, leaf_of(pre + ".cross.wq", with_grad),
                            leaf_of(pre + ".cross.bq", with_grad));
        NodePtr ck = linear(enc_out, leaf_of(pre + ".cross.wk", with_grad),
                            leaf_of(pre + ".cross.bk", with_grad));
        NodePtr cv = linear(enc_out, leaf_of(pre + ".cross.wv", with_grad),
                            leaf_of(pre + ".cross.bv", with_grad));
        NodePtr catt = multihead_attention(cq, ck, cv, cfg_.n_heads, cross_mask);
        h = add(h, linear(catt, leaf_of(pre + ".cross.wo", with_grad),
                          leaf_of(pre + ".cross.bo", with_grad)));
        NodePtr f = layer_norm(h, leaf_of(pre + ".ln3.g", with_grad),
                               leaf_of(pre + ".ln3.b", with_grad));
        f = linear(f, leaf_of(pre + ".ffn.w1", with_grad),
                   leaf_of(pre + ".ffn.b1", with_grad));
        f = relu(f);
        f = linear(f, leaf_of(pre + ".ffn.w2", with_grad),
                   leaf_of(pre + ".ffn.b2", with_grad));
        h = add(h, f);
        check_finite(h, pre);
    }
    h = layer_norm(h, leaf_of("dec_final_ln.g", with_grad),
                   leaf_of("dec_final_ln.b", with_grad));
    return h;
}

ForwardOutput RdrecModel::forward(const Batch& batch, bool with_grad) {
    if (batch.b == 0) fail(Err::EmptyInput, "model: empty batch");
    live_leaves_.clear();
    std::vector<int> enc_valid;
    NodePtr enc = encoder_stack(batch, with_grad, &enc_valid);

    // decoder input: shift-right targets with PAD as the start token
    std::vector<int> dec_in(batch.target_ids.size(), Vocab::kPad);
    for (int r = 0; r < batch.b; ++r) {
        for (int t = 1; t < batch.t_out; ++t) {
            dec_in[r * batch.t_out + t] = batch.target_ids[r * batch.t_out + t - 1];
        }
    }
    NodePtr dec = decoder_stack(enc, enc_valid, batch.b, batch.t_out, dec_in,
                                batch.target_len, with_grad);
    NodePtr logits = linear(dec, leaf_of("output_proj.w", with_grad),
                            leaf_of("output_proj.b", with_grad));

    // per-sequence mean over its tokens, then mean over the batch
    std::vector<double> weights(static_cast<size_t>(batch.b) * batch.t_out, 0.0);
    for (int r = 0; r < batch.b; ++r) {
        double w = 1.0 / (static_cast<double>(batch.target_len[r]) *
                          static_cast<double>(batch.b));
        for (int t = 0; t < batch.target_len[r]; ++t) {
            weights[r * batch.t_out + t] = w;
        }
    }
    ForwardOutput fo;
    std::vector<double> nll;
    fo.loss = cross_entropy(logits, batch.target_ids, weights, &nll);
    fo.logits = logits;
    fo.loss_value = fo.loss->value.data[0];
    if (!std::isfinite(fo.loss_value)) {
        fail(Err::NonFinite, "model: non-finite loss");
    }
    fo.row_loss.assign(batch.b, 0.0);
    for (int r = 0; r < batch.b; ++r) {
        double sum = 0.0;
        for (int t = 0; t < batch.target_len[r]; ++t) {
            sum += nll[r * batch.t_out + t];
        }
        fo.row_loss[r] = sum / batch.target_len[r];
    }
    return fo;
}

std::map<std::string, Tensor> RdrecModel::backward(ForwardOutput& fo) {
    if (!fo.loss) fail(Err::InvalidArgument, "model: backward without forward");
    rdrec::backward(fo.loss);
    std::map<std::string, Tensor> grads;
    for (auto& [name, leaf] : live_leaves_) {
        leaf->ensure_grad();
        grads.emplace(name, leaf->grad);
    }
    return grads;
}

RdrecModel::Encoded RdrecModel::encode(const TokenSequence& input, Task task) {
    SampleSpec s;
    s.input = input;
    s.task = task;
    s.target = {}; // unused
    Batch batch = make_batch({s});
    live_leaves_.clear();
    std::vector<int> enc_valid;
    NodePtr enc = encoder_stack(batch, false, &enc_valid);
    Encoded e;
    e.enc_out = enc->value;
    e.valid_len = enc_valid[0];
    live_leaves_.clear();
    return e;
}

std::vector<std::vector<double>> RdrecModel::next_token_logprobs(
    const Encoded& enc, const std::vector<std::vector<int>>& prefixes) {
    const int b = static_cast<int>(prefixes.size());
    const int plen = prefixes.empty() ? 0 : static_cast<int>(prefixes[0].size());
    const int t_out = plen + 1;
    const int d = cfg_.d_model;
    const int t_enc = static_cast<int>(enc.enc_out.shape[1]);
    // replicate the encoder output across rows
    NodePtr enc_rep = make_leaf(Tensor({b, t_enc, d}), false, "enc_rep");
    for (int r = 0; r < b; ++r) {
        std::copy(enc.enc_out.data.begin(), enc.enc_out.data.end(),
                  enc_rep->value.data.begin() + static_cast<size_t>(r) * t_enc * d);
    }
    std::vector<int> dec_in(static_cast<size_t>(b) * t_out, Vocab::kPad);
    for (int r = 0; r < b; ++r) {
        for (int t = 0; t < plen; ++t) {
            dec_in[r * t_out + t + 1] = prefixes[r][t];
        }
    }
    std::vector<int> dec_valid(b, t_out);
    std::vector<int> enc_valid(b, enc.valid_len);
    live_leaves_.clear();
    NodePtr dec = decoder_stack(enc_rep, enc_valid, b, t_out, dec_in, dec_valid,
                                false);
    NodePtr logits = linear(dec, leaf_of("output_proj.w", false),
                            leaf_of("output_proj.b", false));
    live_leaves_.clear();
    const int v = cfg_.vocab_size;
    std::vector<std::vector<double>> out(b, std::vector<double>(v));
    for (int r = 0; r < b; ++r) {
        const double* row = logits->value.ptr() + ((r * t_out) + t_out - 1) * v;
        std::vector<double> probs(row, row + v);
        softmax_row(probs.data(), v);
        for (int j = 0; j < v; ++j) {
            out[r][j] = std::log(std::max(probs[j], 1e-300));
        }
    }
    return out;
}

double RdrecModel::sequence_logprob(const TokenSequence& input, Task task,
                                    const std::vector<int>& target) {
    SampleSpec s;
    s.input = input;
    s.task = task;
    s.target = target;
    Batch batch = make_batch({s});
    ForwardOutput fo = forward(batch, false);
    live_leaves_.clear();
    // row_loss is the mean nll over target_len tokens (EOS included)
    return -fo.row_loss[0] * batch.target_len[0];
}

// ---- checkpoint I/O ----

namespace {

constexpr char kMagic[4] = {'R', 'D', 'R', 'C'};
constexpr uint32_t kVersion = 1;

json config_to_json(const ModelConfig& c) {
    return json{{"n_layers", c.n_layers},
                {"n_heads", c.n_heads},
                {"d_model", c.d_model},
                {"d_ff", c.d_ff},
                {"vocab_size", c.vocab_size},
                {"max_seq_len", c.max_seq_len},
                {"n_prompt_per_task", c.n_prompt_per_task},
                {"n_tasks", c.n_tasks},
                {"whole_word_capacity", c.whole_word_capacity}};
}

ModelConfig config_from_json(const json& j) {
    ModelConfig c;
    c.n_layers = j.at("n_layers").get<int>();
    c.n_heads = j.at("n_heads").get<int>();
    c.d_model = j.at("d_model").get<int>();
    c.d_ff = j.at("d_ff").get<int>();
    c.vocab_size = j.at("vocab_size").get<int>();
    c.max_seq_len = j.at("max_seq_len").get<int>();
    c.n_prompt_per_task = j.at("n_prompt_per_task").get<int>();
    c.n_tasks = j.at("n_tasks").get<int>();
    c.whole_word_capacity = j.at("whole_word_capacity").get<int>();
    return c;
}

template <typename T>
void append_le(std::string& buf, T v) {
    for (size_t i = 0; i < sizeof(T); ++i) {
        buf.push_back(static_cast<char>((static_cast<uint64_t>(v) >> (8 * i)) & 0xff));
    }
}

template <typename T>
T read_le(const std::string& buf, size_t off) {
    uint64_t v = 0;
    for (size_t i = 0; i < sizeof(T); ++i) {
        v |= static_cast<uint64_t>(static_cast<unsigned char>(buf[off + i])) << (8 * i);
    }
    return static_cast<T>(v);
}

} // namespace

void save_checkpoint(const std::string& path, const ModelConfig& cfg,
                     const Parameters& params, const CheckpointMeta& meta) {
    json manifest;
    manifest["config"] = config_to_json(cfg);
    manifest["step"] = meta.step;
    manifest["val_loss"] = meta.val_loss;
    json tensors = json::array();
    int64_t offset = 0;
    for (const auto& [name, t] : params) {
        json e;
        e["name"] = name;
        e["shape"] = t.shape;
        e["offset"] = offset;
        tensors.push_back(e);
        offset += t.numel();
    }
    manifest["tensors"] = tensors;
    std::string mstr = manifest.dump();

    std::string buf;
    buf.append(kMagic, 4);
    append_le<uint32_t>(buf, kVersion);
    append_le<uint64_t>(buf, mstr.size());
    buf += mstr;
    for (const auto& [name, t] : params) {
        for (double v : t.data) {
            float f = static_cast<float>(v);
            uint32_t bits;
            std::memcpy(&bits, &f, 4);
            append_le<uint32_t>(buf, bits);
        }
    }
    append_le<uint32_t>(buf, crc32(buf.data(), buf.size()));

    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Err::IoError, "model: cannot write checkpoint " + path);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Err::MissingFile, "model: cannot open checkpoint " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string buf = ss.str();
    if (buf.size() < 20 || std::memcmp(buf.data(), kMagic, 4) != 0) {
        fail(Err::MalformedLine, "model: not a checkpoint file: " + path);
    }
    uint32_t stored_crc = read_le<uint32_t>(buf, buf.size() - 4);
    if (crc32(buf.data(), buf.size() - 4) != stored_crc) {
        fail(Err::ChecksumMismatch, "model: checkpoint CRC mismatch: " + path);
    }
    uint32_t version = read_le<uint32_t>(buf, 4);
    if (version != kVersion) {
        fail(Err::VersionMismatch,
             "model: unsupported checkpoint version " + std::to_string(version));
    }
    uint64_t mlen = read_le<uint64_t>(buf, 8);
    json manifest = json::parse(buf.substr(16, mlen));
    Checkpoint ck;
    ck.config = config_from_json(manifest.at("config"));
    ck.meta.step = manifest.at("step").get<int64_t>();
    ck.meta.val_loss = manifest.at("val_loss").get<double>();
    size_t payload = 16 + mlen;
    for (const auto& e : manifest.at("tensors")) {
        std::string name = e.at("name").get<std::string>();
        std::vector<int64_t> shape = e.at("shape").get<std::vector<int64_t>>();
        int64_t off = e.at("offset").get<int64_t>();
        Tensor t(shape);
        for (int64_t i = 0; i < t.numel(); ++i) {
            uint32_t bits = read_le<uint32_t>(buf, payload + (off + i) * 4);
            float f;
            std::memcpy(&f, &bits, 4);
            t.data[i] = static_cast<double>(f);
        }
        ck.params.emplace(std::move(name), std::move(t));
    }
    return ck;
}

Checkpoint load_checkpoint_expect(const std::string& path,
                                  const ModelConfig& cfg) {
    Checkpoint ck = load_checkpoint(path);
    if (!(ck.config == cfg)) {
        fail(Err::ConfigMismatch,
             "model: checkpoint config does not match the run config (" + path + ")");
    }
    return ck;
}

} // namespace rdrec
