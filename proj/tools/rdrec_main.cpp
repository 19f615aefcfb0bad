// Copyright 2026 The rdrec authors
// SPDX-License-Identifier: Apache-2.0
//
// rdrec: single entry point for the pipeline
//   synth | stats | distill | prepare | train | recommend | evaluate | explain

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "rdrec/config.hpp"
#include "rdrec/corpus.hpp"
#include "rdrec/distiller.hpp"
#include "rdrec/errors.hpp"
#include "rdrec/evaluator.hpp"
#include "rdrec/hashing.hpp"
#include "rdrec/inference.hpp"
#include "rdrec/model.hpp"
#include "rdrec/synth.hpp"
#include "rdrec/textcodec.hpp"
#include "rdrec/trainer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace rdrec;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;
};

RunConfig load_run_config(const CommonOpts& opts) {
    RunConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = parse_config_file(opts.config_path);
    } else {
        cfg.fill_path_defaults();
    }
    for (const auto& o : opts.overrides) apply_override(cfg, o);
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON run-config file");
    cmd->add_option("--set", opts.overrides,
                    "Override a config key, e.g. --set trainer.patience=3");
}

void write_manifest(const RunConfig& cfg, const std::string& command,
                    const std::vector<std::string>& input_files) {
    fs::create_directories(cfg.paths.out_dir);
    json m;
    m["command"] = command;
    m["config"] = config_to_json(cfg);
    m["seed"] = cfg.seed;
    json inputs = json::object();
    for (const auto& f : input_files) {
        if (fs::exists(f)) inputs[f] = file_fingerprint(f);
    }
    m["inputs"] = inputs;
    std::ofstream out(fs::path(cfg.paths.out_dir) / ("manifest_" + command + ".json"));
    out << m.dump(2) << "\n";
}

void echo_config(const RunConfig& cfg) {
    std::cerr << "rdrec: effective config: " << config_to_json(cfg).dump() << "\n";
}

Vocab load_vocab_for(const RunConfig& cfg) { return Vocab::load(cfg.paths.vocab); }

RdrecModel load_model_for(RunConfig& cfg, const std::string& checkpoint_override) {
    std::string path = checkpoint_override.empty()
                           ? (fs::path(cfg.paths.checkpoint_dir) / "checkpoint_best.rdc")
                                 .string()
                           : checkpoint_override;
    Checkpoint ck = load_checkpoint(path);
    return RdrecModel(ck.config, std::move(ck.params));
}

std::vector<std::string> item_id_table(const ReviewSet& rs) {
    std::vector<std::string> ids;
    ids.reserve(rs.n_items());
    for (size_t i = 0; i < rs.n_items(); ++i) {
        ids.push_back(rs.item_id(static_cast<int>(i)));
    }
    return ids;
}

// ---- subcommand bodies ----

int run_stats(const CommonOpts& common, const std::string& input,
              const std::string& json_out, bool lenient) {
    RunConfig cfg = load_run_config(common);
    std::string path = input.empty() ? cfg.paths.reviews : input;
    LoadOptions lo;
    lo.lenient = lenient;
    LoadReport rep;
    ReviewSet rs = load_reviews(path, lo, &rep);
    DatasetStats st = compute_stats(rs);
    std::cout << format_stats_table(st, fs::path(path).stem().string());
    if (!json_out.empty()) {
        json j{{"n_users", st.n_users},
               {"n_items", st.n_items},
               {"n_reviews", st.n_reviews},
               {"avg_reviews_per_user", st.avg_reviews_per_user},
               {"density_percent", st.density_percent}};
        std::ofstream out(json_out);
        out << j.dump(2) << "\n";
    }
    return kExitOk;
}

int run_synth(const CommonOpts& common, const SynthConfig& synth,
              std::string output) {
    RunConfig cfg = load_run_config(common);
    if (output.empty()) output = cfg.paths.reviews;
    if (output.empty()) {
        fail(Err::ConfigError, "synth: --output or paths.reviews required");
    }
    fs::create_directories(fs::path(output).parent_path().empty()
                               ? "."
                               : fs::path(output).parent_path().string());
    write_synthetic_reviews(synth, output);
    std::cout << "synth: wrote " << output << "\n";
    return kExitOk;
}

int run_distill(const CommonOpts& common, const std::string& input,
                const std::string& output, const std::string& backend,
                const std::string& endpoint, int concurrency,
                const std::string& cache_dir) {
    RunConfig cfg = load_run_config(common);
    if (!input.empty()) cfg.paths.reviews = input;
    if (!output.empty()) cfg.paths.quads = output;
    if (!backend.empty()) {
        if (backend == "mock") cfg.distill.kind = BackendConfig::Kind::Mock;
        else if (backend == "http") cfg.distill.kind = BackendConfig::Kind::Http;
        else fail(Err::ConfigError, "distill: --backend must be mock or http");
    }
    if (!endpoint.empty()) cfg.distill.endpoint = endpoint;
    if (concurrency > 0) cfg.distill.max_concurrency = concurrency;
    if (!cache_dir.empty()) cfg.distill.cache_dir = cache_dir;
    echo_config(cfg);

    ReviewSet rs = load_reviews(cfg.paths.reviews);
    DistillSummary summary;
    std::vector<Quadruplet> quads = distill(rs, cfg.distill, summary);
    fs::create_directories(fs::path(cfg.paths.quads).parent_path().empty()
                               ? "."
                               : fs::path(cfg.paths.quads).parent_path().string());
    save_quadruplets(quads, cfg.paths.quads);
    write_manifest(cfg, "distill", {cfg.paths.reviews});
    std::cout << "distill: total " << summary.total << " ok " << summary.ok
              << " skipped " << summary.skipped << " fallback " << summary.fallback
              << " failed " << summary.failed << " cache_hits "
              << summary.cache_hits << " backend_calls " << summary.backend_calls
              << "\n";
    return kExitOk;
}

int run_prepare(const CommonOpts& common) {
    RunConfig cfg = load_run_config(common);
    echo_config(cfg);
    ReviewSet rs = load_reviews(cfg.paths.reviews);
    std::vector<Quadruplet> quads = load_quadruplets(cfg.paths.quads);
    SplitSet splits = make_splits(rs, cfg.trainer.min_len, cfg.seed);
    fs::create_directories(cfg.paths.out_dir);
    save_splits(rs, splits, cfg.paths.splits_seq, cfg.paths.splits_expl);
    Vocab vocab = build_vocab(vocab_corpus(rs, quads),
                              static_cast<size_t>(cfg.vocab_cap));
    vocab.save(cfg.paths.vocab);
    write_manifest(cfg, "prepare", {cfg.paths.reviews, cfg.paths.quads});
    std::cout << "prepare: " << splits.seq.size() << " users retained, "
              << splits.excluded_users.size() << " excluded; vocab "
              << vocab.size() << " tokens\n";
    return kExitOk;
}

int run_train(const CommonOpts& common) {
    RunConfig cfg = load_run_config(common);
    echo_config(cfg);
    ReviewSet rs = load_reviews(cfg.paths.reviews);
    std::vector<Quadruplet> quads = load_quadruplets(cfg.paths.quads);
    SplitSet splits = load_splits(rs, cfg.paths.splits_seq, cfg.paths.splits_expl);
    Vocab vocab = load_vocab_for(cfg);
    cfg.model.vocab_size = static_cast<int>(vocab.size());

    SamplePools pools(rs, splits, quads, vocab, cfg.trainer);
    RdrecModel model(cfg.model, cfg.seed);
    TrainResult result = train(model, pools, cfg.trainer, cfg.paths.checkpoint_dir);
    write_loss_history_csv(result.history,
                           (fs::path(cfg.paths.out_dir) / "loss_history.csv").string());
    write_manifest(cfg, "train",
                   {cfg.paths.reviews, cfg.paths.quads, cfg.paths.splits_seq,
                    cfg.paths.splits_expl, cfg.paths.vocab});
    std::cout << "train: best epoch " << result.best_epoch << " val_loss "
              << result.best_val_loss << " (" << result.stop_reason << "), "
              << "checkpoint " << result.best_checkpoint << "\n";
    return kExitOk;
}

// Deterministic per-user candidate sets for top-N evaluation.
std::vector<int> topn_candidates(const ReviewSet& rs, const SplitSet::UserSeq& us,
                                 int n_negatives, uint64_t seed) {
    Rng rng(seed ^ (0x9e3779b97f4a7c15ULL * (us.user + 1)));
    std::vector<int> interacted = rs.item_sequence(us.user);
    std::set<int> seen(interacted.begin(), interacted.end());
    std::vector<int> pool;
    for (size_t i = 0; i < rs.n_items(); ++i) {
        int item = static_cast<int>(i);
        if (!seen.count(item)) pool.push_back(item);
    }
    int take = std::min<int>(n_negatives, static_cast<int>(pool.size()));
    for (int i = 0; i < take; ++i) {
        size_t j = i + static_cast<size_t>(rng.uniform_below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    std::vector<int> cands(pool.begin(), pool.begin() + take);
    cands.push_back(us.test_item);
    rng.shuffle(cands);
    return cands;
}

std::map<std::string, RankedList> rank_all_users(
    RdrecModel& model, const Vocab& vocab, const ReviewSet& rs,
    const SplitSet& splits, const RunConfig& cfg, const std::string& task,
    uint64_t eval_seed) {
    std::vector<std::string> ids = item_id_table(rs);
    std::map<std::string, RankedList> ranked;
    std::vector<int> universe;
    for (size_t i = 0; i < rs.n_items(); ++i) universe.push_back(static_cast<int>(i));
    for (const auto& us : splits.seq) {
        if (task == "seq") {
            std::vector<int> history = us.train_items;
            history.push_back(us.val_item);
            std::vector<int> domain = universe;
            if (cfg.eval.sr_candidates > 0 &&
                cfg.eval.sr_candidates < static_cast<int>(universe.size())) {
                domain = topn_candidates(rs, us, cfg.eval.sr_candidates - 1, eval_seed);
            }
            ranked[rs.user_id(us.user)] = recommend_sequential(
                model, vocab, us.user, history, domain, ids, cfg.beam);
        } else {
            std::vector<int> cands =
                topn_candidates(rs, us, cfg.trainer.n_negatives, eval_seed);
            ranked[rs.user_id(us.user)] =
                recommend_topn(model, vocab, us.user, cands, ids, cfg.beam);
        }
    }
    return ranked;
}

void save_ranked(const std::map<std::string, RankedList>& ranked,
                 const std::string& path, int k) {
    std::ofstream out(path);
    if (!out) fail(Err::IoError, "recommend: cannot write " + path);
    for (const auto& [user, rl] : ranked) {
        json j;
        j["user"] = user;
        json items = json::array(), scores = json::array();
        int n = 0;
        for (const auto& [item, score] : rl.entries) {
            if (k > 0 && n >= k) break;
            items.push_back(item);
            scores.push_back(score);
            ++n;
        }
        j["items"] = items;
        j["scores"] = scores;
        out << j.dump() << "\n";
    }
}

std::map<std::string, RankedList> load_ranked(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Err::MissingFile, "evaluate: cannot open " + path);
    std::map<std::string, RankedList> ranked;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        RankedList rl;
        auto items = j.at("items");
        auto scores = j.at("scores");
        for (size_t i = 0; i < items.size(); ++i) {
            rl.entries.emplace_back(items[i].get<std::string>(),
                                    scores[i].get<double>());
        }
        ranked[j.at("user").get<std::string>()] = rl;
    }
    return ranked;
}

int run_recommend(const CommonOpts& common, const std::string& task,
                  const std::string& checkpoint, const std::string& output,
                  int k) {
    RunConfig cfg = load_run_config(common);
    if (task != "seq" && task != "topn") {
        fail(Err::ConfigError, "recommend: --task must be seq or topn");
    }
    echo_config(cfg);
    ReviewSet rs = load_reviews(cfg.paths.reviews);
    SplitSet splits = load_splits(rs, cfg.paths.splits_seq, cfg.paths.splits_expl);
    Vocab vocab = load_vocab_for(cfg);
    RdrecModel model = load_model_for(cfg, checkpoint);
    auto ranked = rank_all_users(model, vocab, rs, splits, cfg, task,
                                 cfg.eval.seed_base);
    std::string out_path = output.empty() ? cfg.paths.ranked : output;
    save_ranked(ranked, out_path, k);
    write_manifest(cfg, "recommend_" + task, {cfg.paths.reviews, cfg.paths.vocab});
    std::cout << "recommend: wrote " << ranked.size() << " ranked lists to "
              << out_path << "\n";
    return kExitOk;
}

json report_to_json(const std::string& task, const MetricReport& rep) {
    json hr = json::object(), ndcg = json::object();
    for (const auto& [k, v] : rep.hr) hr[std::to_string(k)] = v;
    for (const auto& [k, v] : rep.ndcg) ndcg[std::to_string(k)] = v;
    return json{{"task", task},
                {"hr", hr},
                {"ndcg", ndcg},
                {"n_users", rep.n_users},
                {"missing_positive", rep.n_missing_positive}};
}

int run_evaluate(const CommonOpts& common, const std::string& task,
                 const std::string& ranked_file, const std::string& checkpoint,
                 int trials_flag, const std::string& baseline,
                 const std::string& report_out) {
    RunConfig cfg = load_run_config(common);
    if (task != "seq" && task != "topn") {
        fail(Err::ConfigError, "evaluate: --task must be seq or topn");
    }
    int trials = trials_flag > 0 ? trials_flag : cfg.eval.trials;
    ReviewSet rs = load_reviews(cfg.paths.reviews);
    SplitSet splits = load_splits(rs, cfg.paths.splits_seq, cfg.paths.splits_expl);
    std::map<std::string, std::string> positives;
    for (const auto& us : splits.seq) {
        positives[rs.user_id(us.user)] = rs.item_id(us.test_item);
    }

    std::vector<MetricReport> reports;
    if (!ranked_file.empty() && trials == 1) {
        reports.push_back(evaluate(load_ranked(ranked_file), positives, cfg.eval.ks));
    } else {
        Vocab vocab = load_vocab_for(cfg);
        RdrecModel model = load_model_for(cfg, checkpoint);
        for (int t = 0; t < trials; ++t) {
            auto ranked = rank_all_users(model, vocab, rs, splits, cfg, task,
                                         cfg.eval.seed_base + t);
            reports.push_back(evaluate(ranked, positives, cfg.eval.ks));
        }
    }

    json out = report_to_json(task, reports[0]);
    if (reports.size() > 1) {
        json trials_json = json::array();
        for (size_t t = 0; t < reports.size(); ++t) {
            json tj = report_to_json(task, reports[t]);
            tj["seed"] = cfg.eval.seed_base + t;
            trials_json.push_back(tj);
        }
        out["trials"] = trials_json;
        json mean = json::object(), stddev = json::object();
        for (int k : cfg.eval.ks) {
            for (const char* metric : {"hr", "ndcg"}) {
                std::vector<double> vals;
                for (const auto& r : reports) {
                    vals.push_back(metric == std::string("hr") ? r.hr.at(k)
                                                               : r.ndcg.at(k));
                }
                double m = 0.0;
                for (double v : vals) m += v;
                m /= vals.size();
                double s2 = 0.0;
                for (double v : vals) s2 += (v - m) * (v - m);
                double sd = vals.size() > 1 ? std::sqrt(s2 / (vals.size() - 1)) : 0.0;
                std::string key = std::string(metric) + "@" + std::to_string(k);
                mean[key] = m;
                stddev[key] = sd;
                std::cout << "evaluate: " << key << " mean " << m << " std " << sd
                          << "\n";
            }
        }
        out["mean"] = mean;
        out["std"] = stddev;
    }
    for (const auto& r : reports) std::cout << format_metric_report(r);

    if (!baseline.empty()) {
        std::ifstream in(baseline);
        if (!in) fail(Err::MissingFile, "evaluate: cannot open baseline " + baseline);
        json base = json::parse(in);
        if (!base.contains("trials") || reports.size() < 2) {
            std::cerr << "evaluate: baseline comparison needs --trials >= 2 on "
                         "both sides\n";
        } else {
            for (int k : cfg.eval.ks) {
                for (const char* metric : {"hr", "ndcg"}) {
                    std::vector<double> ours, theirs;
                    for (const auto& r : reports) {
                        ours.push_back(metric == std::string("hr") ? r.hr.at(k)
                                                                   : r.ndcg.at(k));
                    }
                    for (const auto& tj : base["trials"]) {
                        theirs.push_back(
                            tj.at(metric).at(std::to_string(k)).get<double>());
                    }
                    TTestResult tt = welch_t_test(ours, theirs);
                    std::cout << "evaluate: " << metric << "@" << k
                              << " vs baseline: t " << tt.t_statistic << " p "
                              << tt.p_value << "\n";
                }
            }
        }
    }

    std::string rpath = report_out.empty() ? cfg.paths.report : report_out;
    std::ofstream rout(rpath);
    rout << out.dump(2) << "\n";
    std::cout << "evaluate: report written to " << rpath << "\n";
    return kExitOk;
}

int run_explain(const CommonOpts& common, const std::string& task,
                const std::string& user_id, const std::string& item_id,
                const std::string& checkpoint) {
    RunConfig cfg = load_run_config(common);
    ReviewSet rs = load_reviews(cfg.paths.reviews);
    Vocab vocab = load_vocab_for(cfg);
    RdrecModel model = load_model_for(cfg, checkpoint);

    Task t;
    TaskFields f;
    if (task == "eg") {
        t = Task::EG;
        f.user = rs.user_index(user_id);
        f.item = rs.item_index(item_id);
        if (f.user < 0 || f.item < 0) {
            fail(Err::InvalidArgument, "explain: unknown user or item id");
        }
    } else if (task == "rg-pref") {
        t = Task::RGPref;
        f.user = rs.user_index(user_id);
        if (f.user < 0) fail(Err::InvalidArgument, "explain: unknown user id");
    } else if (task == "rg-attr") {
        t = Task::RGAttr;
        f.item = rs.item_index(item_id);
        if (f.item < 0) fail(Err::InvalidArgument, "explain: unknown item id");
    } else {
        fail(Err::ConfigError, "explain: --task must be eg, rg-pref or rg-attr");
    }
    TokenSequence seq = encode_rendered(render_task_input(t, f), vocab);
    auto hyps = beam_search(model, seq, t, cfg.beam);
    for (size_t i = 0; i < hyps.size() && i < 3; ++i) {
        std::cout << (i == 0 ? "explain: " : "         ")
                  << decode(hyps[i].tokens, vocab) << "  (logp "
                  << hyps[i].log_prob << (hyps[i].complete ? "" : ", partial")
                  << ")\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rdrec: rationale-distilled recommender pipeline"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    CommonOpts common;

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Generate the synthetic review corpus");
    SynthConfig synth_cfg;
    std::string synth_out;
    add_common(synth_cmd, common);
    synth_cmd->add_option("--output", synth_out, "Output reviews JSONL");
    synth_cmd->add_option("--users", synth_cfg.n_users, "Number of users");
    synth_cmd->add_option("--items", synth_cfg.n_items, "Number of items");
    synth_cmd->add_option("--genres", synth_cfg.n_genres, "Number of genres");
    synth_cmd->add_option("--min-len", synth_cfg.min_len, "Min interactions per user");
    synth_cmd->add_option("--max-len", synth_cfg.max_len, "Max interactions per user");
    synth_cmd->add_option("--seed", synth_cfg.seed, "Corpus seed");

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "Dataset statistics table");
    std::string stats_input, stats_json;
    bool stats_lenient = false;
    add_common(stats_cmd, common);
    stats_cmd->add_option("--input", stats_input, "Reviews JSONL file");
    stats_cmd->add_option("--json", stats_json, "Also write stats as JSON");
    stats_cmd->add_flag("--lenient", stats_lenient, "Skip malformed lines");

    // distill
    auto* distill_cmd = app.add_subcommand("distill", "Distill rationales from reviews");
    std::string d_input, d_output, d_backend, d_endpoint, d_cache;
    int d_concurrency = 0;
    add_common(distill_cmd, common);
    distill_cmd->add_option("--input", d_input, "Reviews JSONL file");
    distill_cmd->add_option("--output", d_output, "Quadruplets JSONL file");
    distill_cmd->add_option("--backend", d_backend, "mock or http");
    distill_cmd->add_option("--endpoint", d_endpoint, "HTTP backend endpoint URL");
    distill_cmd->add_option("--concurrency", d_concurrency, "Max in-flight requests");
    distill_cmd->add_option("--cache-dir", d_cache, "Response cache directory");

    // prepare
    auto* prepare_cmd = app.add_subcommand("prepare", "Build splits and vocabulary");
    add_common(prepare_cmd, common);

    // train
    auto* train_cmd = app.add_subcommand("train", "Train the recommender");
    add_common(train_cmd, common);

    // recommend
    auto* rec_cmd = app.add_subcommand("recommend", "Produce ranked lists");
    std::string rec_task = "seq", rec_checkpoint, rec_output;
    int rec_k = 0;
    add_common(rec_cmd, common);
    rec_cmd->add_option("--task", rec_task, "seq or topn");
    rec_cmd->add_option("--checkpoint", rec_checkpoint, "Checkpoint file");
    rec_cmd->add_option("--output", rec_output, "Ranked-list JSONL output");
    rec_cmd->add_option("--k", rec_k, "Truncate output lists to k items");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Compute HR@k / NDCG@k");
    std::string ev_task = "seq", ev_ranked, ev_checkpoint, ev_baseline, ev_report;
    int ev_trials = 0;
    add_common(eval_cmd, common);
    eval_cmd->add_option("--task", ev_task, "seq or topn");
    eval_cmd->add_option("--ranked", ev_ranked, "Pre-computed ranked-list JSONL");
    eval_cmd->add_option("--checkpoint", ev_checkpoint, "Checkpoint file");
    eval_cmd->add_option("--trials", ev_trials,
                         "Re-rank with seeds seed_base..seed_base+N-1");
    eval_cmd->add_option("--baseline", ev_baseline,
                         "Baseline report JSON for significance tests");
    eval_cmd->add_option("--report", ev_report, "Report JSON output path");

    // explain
    auto* expl_cmd = app.add_subcommand("explain", "Generate explanation/rationale text");
    std::string ex_task = "eg", ex_user, ex_item, ex_checkpoint;
    add_common(expl_cmd, common);
    expl_cmd->add_option("--task", ex_task, "eg, rg-pref or rg-attr");
    expl_cmd->add_option("--user", ex_user, "User id (as in the reviews file)");
    expl_cmd->add_option("--item", ex_item, "Item id (as in the reviews file)");
    expl_cmd->add_option("--checkpoint", ex_checkpoint, "Checkpoint file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (synth_cmd->parsed()) return run_synth(common, synth_cfg, synth_out);
        if (stats_cmd->parsed()) {
            return run_stats(common, stats_input, stats_json, stats_lenient);
        }
        if (distill_cmd->parsed()) {
            return run_distill(common, d_input, d_output, d_backend, d_endpoint,
                               d_concurrency, d_cache);
        }
        if (prepare_cmd->parsed()) return run_prepare(common);
        if (train_cmd->parsed()) return run_train(common);
        if (rec_cmd->parsed()) {
            return run_recommend(common, rec_task, rec_checkpoint, rec_output, rec_k);
        }
        if (eval_cmd->parsed()) {
            return run_evaluate(common, ev_task, ev_ranked, ev_checkpoint, ev_trials,
                                ev_baseline, ev_report);
        }
        if (expl_cmd->parsed()) {
            return run_explain(common, ex_task, ex_user, ex_item, ex_checkpoint);
        }
    } catch (const RdrecError& e) {
        std::cerr << "rdrec: error: " << e.what() << "\n";
        return (e.code() == Err::ConfigError || e.code() == Err::RangeError)
                   ? kExitConfig
                   : kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "rdrec: error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitConfig;
}
