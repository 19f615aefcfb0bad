// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0

#include "rdrec/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "rdrec/errors.hpp"

namespace rdrec {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Strict section reader: every key must be consumed exactly once.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) {
            fail(Err::ConfigError, "config: " + path_ + " must be an object");
        }
    }
    ~Section() = default;

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    template <typename T>
    void read(const std::string& key, T& out) {
        if (!has(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            fail(Err::ConfigError, "config: type mismatch at " + dotted(key));
        }
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) {
                fail(Err::ConfigError, "config: unknown key " + dotted(key));
            }
        }
    }

    std::string dotted(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void range_check(bool ok, const std::string& path, const std::string& what) {
    if (!ok) fail(Err::ConfigError, "config: " + path + " " + what);
}

} // namespace

void RunConfig::validate() const {
    model.validate_dims_only();
    trainer.validate();
    range_check(beam.width >= 1, "beam.width", "must be >= 1");
    range_check(beam.max_len >= 1, "beam.max_len", "must be >= 1");
    range_check(vocab_cap >= 16, "model.vocab_cap", "must be >= 16");
    range_check(eval.trials >= 1, "eval.trials", "must be >= 1");
    range_check(!eval.ks.empty(), "eval.ks", "must be non-empty");
    for (int k : eval.ks) range_check(k >= 1, "eval.ks", "entries must be >= 1");
    range_check(distill.max_concurrency >= 1, "distill.max_concurrency",
                "must be >= 1");
    range_check(distill.kind != BackendConfig::Kind::Http || !distill.endpoint.empty(),
                "distill.endpoint", "is required for the http backend");
}

void RunConfig::fill_path_defaults() {
    auto def = [&](std::string& field, const std::string& name) {
        if (field.empty()) field = (fs::path(paths.out_dir) / name).string();
    };
    def(paths.vocab, "vocab.txt");
    def(paths.checkpoint_dir, "checkpoints");
    def(paths.splits_seq, "splits_seq.jsonl");
    def(paths.splits_expl, "splits_expl.jsonl");
    def(paths.ranked, "ranked.jsonl");
    def(paths.report, "report.json");
    if (paths.quads.empty()) {
        paths.quads = (fs::path(paths.out_dir) / "quads.jsonl").string();
    }
}

RunConfig parse_config_json(const json& j) {
    RunConfig cfg;
    Section root(j, "");
    root.read("seed", cfg.seed);
    if (root.has("ratios")) { // top-level shorthand
        std::string spec;
        root.read("ratios", spec);
        cfg.trainer.ratios = parse_ratio(spec);
    }
    if (root.has("paths")) {
        Section s(root.raw("paths"), "paths");
        s.read("reviews", cfg.paths.reviews);
        s.read("quads", cfg.paths.quads);
        s.read("out_dir", cfg.paths.out_dir);
        s.read("vocab", cfg.paths.vocab);
        s.read("checkpoint_dir", cfg.paths.checkpoint_dir);
        s.read("splits_seq", cfg.paths.splits_seq);
        s.read("splits_expl", cfg.paths.splits_expl);
        s.read("ranked", cfg.paths.ranked);
        s.read("report", cfg.paths.report);
        s.finish();
    }
    if (root.has("model")) {
        Section s(root.raw("model"), "model");
        s.read("n_layers", cfg.model.n_layers);
        s.read("n_heads", cfg.model.n_heads);
        s.read("d_model", cfg.model.d_model);
        s.read("d_ff", cfg.model.d_ff);
        s.read("max_seq_len", cfg.model.max_seq_len);
        s.read("n_prompt_per_task", cfg.model.n_prompt_per_task);
        s.read("whole_word_capacity", cfg.model.whole_word_capacity);
        s.read("vocab_cap", cfg.vocab_cap);
        s.finish();
    }
    if (root.has("trainer")) {
        Section s(root.raw("trainer"), "trainer");
        s.read("batch_size", cfg.trainer.batch_size);
        s.read("lr", cfg.trainer.lr);
        s.read("weight_decay", cfg.trainer.weight_decay);
        s.read("patience", cfg.trainer.patience);
        s.read("max_epochs", cfg.trainer.max_epochs);
        s.read("n_negatives", cfg.trainer.n_negatives);
        s.read("steps_per_epoch", cfg.trainer.steps_per_epoch);
        s.read("stop_train_loss", cfg.trainer.stop_train_loss);
        s.read("min_len", cfg.trainer.min_len);
        s.read("use_eg", cfg.trainer.use_eg);
        s.read("use_rg_pref", cfg.trainer.use_rg_pref);
        s.read("use_rg_attr", cfg.trainer.use_rg_attr);
        s.read("use_sr", cfg.trainer.use_sr);
        s.read("use_tr", cfg.trainer.use_tr);
        if (s.has("ratios")) {
            std::string spec;
            s.read("ratios", spec);
            cfg.trainer.ratios = parse_ratio(spec);
        }
        s.finish();
    }
    if (root.has("beam")) {
        Section s(root.raw("beam"), "beam");
        s.read("width", cfg.beam.width);
        s.read("max_len", cfg.beam.max_len);
        s.read("length_penalty", cfg.beam.length_penalty);
        s.finish();
    }
    if (root.has("distill")) {
        Section s(root.raw("distill"), "distill");
        if (s.has("backend")) {
            std::string kind;
            s.read("backend", kind);
            if (kind == "mock") {
                cfg.distill.kind = BackendConfig::Kind::Mock;
            } else if (kind == "http") {
                cfg.distill.kind = BackendConfig::Kind::Http;
            } else {
                fail(Err::ConfigError,
                     "config: distill.backend must be 'mock' or 'http'");
            }
        }
        s.read("endpoint", cfg.distill.endpoint);
        s.read("timeout_s", cfg.distill.timeout_s);
        s.read("max_retries", cfg.distill.max_retries);
        s.read("max_concurrency", cfg.distill.max_concurrency);
        s.read("max_tokens", cfg.distill.max_tokens);
        s.read("cache_dir", cfg.distill.cache_dir);
        s.finish();
    }
    if (root.has("eval")) {
        Section s(root.raw("eval"), "eval");
        s.read("ks", cfg.eval.ks);
        s.read("trials", cfg.eval.trials);
        s.read("seed_base", cfg.eval.seed_base);
        s.read("sr_candidates", cfg.eval.sr_candidates);
        s.finish();
    }
    root.finish();
    cfg.trainer.seed = cfg.seed;
    cfg.validate();
    cfg.fill_path_defaults();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Err::MissingFile, "config: cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        fail(Err::ConfigError, "config: " + path + " is not valid JSON");
    }
    return parse_config_json(j);
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    size_t eq = assignment.find('=');
    if (eq == std::string::npos) {
        fail(Err::ConfigError, "config: override must be key.path=value: " + assignment);
    }
    std::string path = assignment.substr(0, eq);
    std::string value = assignment.substr(eq + 1);

    // rebuild a json overlay {"a":{"b":value}} and reparse the merged config
    json overlay = config_to_json(cfg);
    json* cur = &overlay;
    size_t start = 0;
    std::vector<std::string> parts;
    while (true) {
        size_t dot = path.find('.', start);
        parts.push_back(path.substr(start, dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    for (size_t i = 0; i + 1 < parts.size(); ++i) {
        cur = &((*cur)[parts[i]]);
    }
    json parsed = json::parse(value, nullptr, false);
    if (parsed.is_discarded()) parsed = value; // plain strings need no quotes
    (*cur)[parts.back()] = parsed;
    cfg = parse_config_json(overlay);
}

json config_to_json(const RunConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["paths"] = {{"reviews", cfg.paths.reviews},
                  {"quads", cfg.paths.quads},
                  {"out_dir", cfg.paths.out_dir},
                  {"vocab", cfg.paths.vocab},
                  {"checkpoint_dir", cfg.paths.checkpoint_dir},
                  {"splits_seq", cfg.paths.splits_seq},
                  {"splits_expl", cfg.paths.splits_expl},
                  {"ranked", cfg.paths.ranked},
                  {"report", cfg.paths.report}};
    j["model"] = {{"n_layers", cfg.model.n_layers},
                  {"n_heads", cfg.model.n_heads},
                  {"d_model", cfg.model.d_model},
                  {"d_ff", cfg.model.d_ff},
                  {"max_seq_len", cfg.model.max_seq_len},
                  {"n_prompt_per_task", cfg.model.n_prompt_per_task},
                  {"whole_word_capacity", cfg.model.whole_word_capacity},
                  {"vocab_cap", cfg.vocab_cap}};
    std::string ratio = std::to_string(cfg.trainer.ratios.eg) + ":" +
                        std::to_string(cfg.trainer.ratios.rg) + ":" +
                        std::to_string(cfg.trainer.ratios.sr) + ":" +
                        std::to_string(cfg.trainer.ratios.tr);
    j["trainer"] = {{"batch_size", cfg.trainer.batch_size},
                    {"lr", cfg.trainer.lr},
                    {"weight_decay", cfg.trainer.weight_decay},
                    {"patience", cfg.trainer.patience},
                    {"max_epochs", cfg.trainer.max_epochs},
                    {"ratios", ratio},
                    {"n_negatives", cfg.trainer.n_negatives},
                    {"steps_per_epoch", cfg.trainer.steps_per_epoch},
                    {"stop_train_loss", cfg.trainer.stop_train_loss},
                    {"min_len", cfg.trainer.min_len},
                    {"use_eg", cfg.trainer.use_eg},
                    {"use_rg_pref", cfg.trainer.use_rg_pref},
                    {"use_rg_attr", cfg.trainer.use_rg_attr},
                    {"use_sr", cfg.trainer.use_sr},
                    {"use_tr", cfg.trainer.use_tr}};
    j["beam"] = {{"width", cfg.beam.width},
                 {"max_len", cfg.beam.max_len},
                 {"length_penalty", cfg.beam.length_penalty}};
    j["distill"] = {
        {"backend", cfg.distill.kind == BackendConfig::Kind::Http ? "http" : "mock"},
        {"endpoint", cfg.distill.endpoint},
        {"timeout_s", cfg.distill.timeout_s},
        {"max_retries", cfg.distill.max_retries},
        {"max_concurrency", cfg.distill.max_concurrency},
        {"max_tokens", cfg.distill.max_tokens},
        {"cache_dir", cfg.distill.cache_dir}};
    j["eval"] = {{"ks", cfg.eval.ks},
                 {"trials", cfg.eval.trials},
                 {"seed_base", cfg.eval.seed_base},
                 {"sr_candidates", cfg.eval.sr_candidates}};
    return j;
}

} // namespace rdrec
