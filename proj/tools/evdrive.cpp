// Command-line front end: closed-loop scenario runs, batch sweeps,
// perception-loss evaluation, fusion kernel self-test, and offline event
// synthesis from image sequences.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "evdrive/config.hpp"
#include "evdrive/events.hpp"
#include "evdrive/fusion.hpp"
#include "evdrive/harness.hpp"
#include "evdrive/scenario.hpp"

namespace fs = std::filesystem;
using namespace evdrive;

namespace {

Config load_base_config(const std::string& cli_config) {
    const std::string path = resolve_config_path(cli_config);
    if (path.empty()) return Config{};
    return load_config(path);
}

Scenario resolve_scenario(const std::string& arg, Config& cfg) {
    if (fs::exists(arg)) return load_scenario_file(arg, cfg);
    const auto ids = scenario_ids();
    if (std::find(ids.begin(), ids.end(), arg) != ids.end()) return make_scenario(arg);
    throw std::runtime_error("scenario not found (no such file or built-in): " + arg);
}

// "7" -> {7}; "1..5" -> {1,2,3,4,5}; "1,3,9" -> {1,3,9}.
std::vector<std::uint64_t> parse_seed_spec(const std::string& spec) {
    std::vector<std::uint64_t> seeds;
    const auto range_pos = spec.find("..");
    if (range_pos != std::string::npos) {
        const std::uint64_t lo = std::stoull(spec.substr(0, range_pos));
        const std::uint64_t hi = std::stoull(spec.substr(range_pos + 2));
        if (hi < lo) throw std::runtime_error("seed range is inverted: " + spec);
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        return seeds;
    }
    std::size_t start = 0;
    while (start <= spec.size()) {
        const auto comma = spec.find(',', start);
        const std::string tok = spec.substr(start, comma == std::string::npos ? spec.size() - start
                                                                              : comma - start);
        if (!tok.empty()) seeds.push_back(std::stoull(tok));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (seeds.empty()) throw std::runtime_error("no seeds in spec: " + spec);
    return seeds;
}

int cmd_run(const std::string& scenario_arg, std::uint64_t seed, const std::string& trace_path,
            const std::string& report_path, const std::string& config_path,
            const NoiseConfig& noise) {
    Config cfg = load_base_config(config_path);
    const Scenario scenario = resolve_scenario(scenario_arg, cfg);
    RunOptions opt;
    opt.seed = seed;
    opt.noise = noise;
    opt.trace_path = trace_path;
    opt.report_path = report_path;
    const RunResult r = run_scenario(scenario, cfg, opt);
    std::printf("scenario=%s seed=%llu exit=%s ticks=%zu DS=%.3f RC=%.3f IS=%.3f infractions=%zu\n",
                scenario.name.c_str(), static_cast<unsigned long long>(seed), to_string(r.exit),
                r.records.size(), r.report.driving_score, r.report.route_completion,
                r.report.infraction_score, r.infractions.events.size());
    for (const InfractionEvent& e : r.infractions.events)
        std::printf("  tick %lld: %s at (%.2f, %.2f)\n", static_cast<long long>(e.tick),
                    to_string(e.type), e.position.x, e.position.y);
    return r.exit_code();
}

int cmd_batch(const std::string& dir, const std::string& seed_spec, int jobs,
              const std::string& out_path, const std::string& config_path,
              const NoiseConfig& noise) {
    const Config cfg = load_base_config(config_path);
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".toml")
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("no .toml scenarios in " + dir);

    std::vector<BatchJob> batch;
    for (const std::string& f : files)
        for (std::uint64_t s : parse_seed_spec(seed_spec)) batch.push_back({f, s});

    const std::string csv = run_batch(batch, cfg, noise, jobs);
    if (out_path.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << csv;
    }
    return csv.find(",error,") == std::string::npos ? 0 : 1;
}

int cmd_eval_perception(const std::string& trace_path) {
    std::ifstream in(trace_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read trace: " + trace_path);
    std::string jsonl((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto losses = losses_from_jsonl(jsonl);
    if (losses.empty()) throw std::runtime_error("trace has no records: " + trace_path);
    std::fputs(perception_loss_csv(losses).c_str(), stdout);
    return 0;
}

bool close_enough(double a, double b, double tol) { return std::abs(a - b) <= tol; }

int cmd_fusion_selftest() {
    int failures = 0;
    auto check = [&failures](bool ok, const char* what) {
        std::printf("[%s] %s\n", ok ? "OK" : "FAIL", what);
        if (!ok) ++failures;
    };

    FusionParams params;  // 256-wide, 8 heads, 6 layers
    Rng rng(2024);

    // Positional code sanity at position 0: alternating sin(0)=0, cos(0)=1.
    const auto pe0 = sinusoidal_pe(0, params.d_model);
    bool pe_ok = true;
    for (int i = 0; i < params.d_model; i += 2)
        pe_ok = pe_ok && pe0[i] == 0.0 && pe0[i + 1] == 1.0;
    check(pe_ok, "positional code at 0 alternates 0/1");

    // Row-stochastic softmax.
    Mat logits = Mat::random_uniform(64, 96, -8.0, 8.0, rng);
    softmax_rows(logits);
    bool rows_ok = true;
    for (int r = 0; r < logits.rows(); ++r) {
        double sum = 0.0;
        for (int c = 0; c < logits.cols(); ++c) sum += logits.at(r, c);
        rows_ok = rows_ok && close_enough(sum, 1.0, 1e-9);
    }
    check(rows_ok, "softmax rows sum to 1");

    // Parallel attention against the naive reference.
    bool attn_ok = true;
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 5 + static_cast<int>(rng.next_u64() % 40);
        const int dk = 4 + static_cast<int>(rng.next_u64() % 28);
        Mat q = Mat::random_uniform(n, dk, -2.0, 2.0, rng);
        Mat k = Mat::random_uniform(n, dk, -2.0, 2.0, rng);
        Mat v = Mat::random_uniform(n, dk, -2.0, 2.0, rng);
        const Mat a = scaled_dot_attention(q, k, v);
        const Mat b = serial::scaled_dot_attention(q, k, v);
        for (int r = 0; r < a.rows(); ++r)
            for (int c = 0; c < a.cols(); ++c)
                attn_ok = attn_ok && close_enough(a.at(r, c), b.at(r, c), 1e-12);
    }
    check(attn_ok, "attention matches the serial reference to 1e-12");

    // Single-head identity projections degenerate to plain attention.
    AttentionWeights ident;
    ident.d_model = 32;
    ident.heads = 1;
    ident.wq = ident.wk = ident.wv = ident.wo = Mat::identity(32);
    Mat s = Mat::random_uniform(24, 32, -1.0, 1.0, rng);
    const Mat mha = multi_head_attention(s, ident);
    const Mat plain = scaled_dot_attention(s, s, s);
    bool ident_ok = true;
    for (int r = 0; r < mha.rows(); ++r)
        for (int c = 0; c < mha.cols(); ++c)
            ident_ok = ident_ok && close_enough(mha.at(r, c), plain.at(r, c), 1e-12);
    check(ident_ok, "one identity head equals scaled dot attention");

    // Full stack: tokenize stubbed sensor features, run the encoder, verify
    // shape, determinism, and weight transfer.
    const int kC = 16, kH = 4, kW = 4;
    Rng proj_rng(7);
    const Mat projection =
        Mat::random_uniform(params.d_model, kC, -0.25, 0.25, proj_rng);
    Mat pe(kH * kW, params.d_model);
    for (int t = 0; t < kH * kW; ++t) {
        const auto row = sinusoidal_pe(t, params.d_model);
        for (int c = 0; c < params.d_model; ++c) pe.at(t, c) = row[c];
    }
    TokenSequence seq;
    const TokenSource all_sources[] = {
        TokenSource::RgbFront, TokenSource::RgbLeft,  TokenSource::RgbRight,
        TokenSource::RgbCenter, TokenSource::LidarBev, TokenSource::DvsFront,
        TokenSource::DvsLeft,  TokenSource::DvsRight};
    Mat tokens(0, params.d_model);
    std::vector<Mat> per_sensor;
    for (TokenSource src : all_sources) {
        const auto feat = stub_backbone_features(src, kC, kH, kW, 99);
        per_sensor.push_back(tokenize(feat, kC, kH, kW, projection, pe));
        for (int t = 0; t < kH * kW; ++t) seq.sources.push_back(src);
    }
    Mat all(static_cast<int>(per_sensor.size()) * kH * kW, params.d_model);
    int row = 0;
    for (const Mat& m : per_sensor)
        for (int r = 0; r < m.rows(); ++r, ++row)
            for (int c = 0; c < m.cols(); ++c) all.at(row, c) = m.at(r, c);
    seq.tokens = all;

    EncoderStack enc = init_encoder(params, 31337);
    const Mat out1 = encoder_forward(enc, seq.tokens);
    const Mat out2 = encoder_forward(enc, seq.tokens);
    check(out1.rows() == seq.tokens.rows() && out1.cols() == params.d_model,
          "encoder preserves sequence shape");
    check(out1.raw() == out2.raw(), "encoder forward is deterministic");

    EncoderStack other = init_encoder(params, 5150);
    check(!weights_equal(enc, other), "independent seeds give different weights");
    copy_weights(enc, other);
    check(weights_equal(enc, other), "weight transfer copies every parameter");
    const Mat out3 = encoder_forward(other, seq.tokens);
    check(out1.raw() == out3.raw(), "transferred weights reproduce the output");

    std::printf("%s\n", failures == 0 ? "selftest passed" : "selftest FAILED");
    return failures == 0 ? 0 : 1;
}

int cmd_events(const std::string& in_dir, const std::string& out_path, double threshold,
               double fps) {
    std::vector<std::string> frames;
    for (const auto& entry : fs::directory_iterator(in_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pgm")
            frames.push_back(entry.path().string());
    }
    std::sort(frames.begin(), frames.end());
    if (frames.size() < 2) throw std::runtime_error("need at least two .pgm frames in " + in_dir);

    EventSynthesizer synth(threshold, 1.0 / 255.0);
    std::vector<Event> all;
    int width = 0, height = 0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        IntensityFrame f = read_pgm(frames[i]);
        f.t_us = static_cast<std::uint64_t>(std::llround(i * 1e6 / fps));
        if (i == 0) {
            width = f.width;
            height = f.height;
        } else if (f.width != width || f.height != height) {
            throw std::runtime_error("frame size changed at " + frames[i]);
        }
        const auto ev = synth.process(f);
        all.insert(all.end(), ev.begin(), ev.end());
    }
    write_events(out_path, all, width, height);
    std::printf("%zu frames -> %zu events -> %s\n", frames.size(), all.size(), out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic closed-loop driving micro-simulator"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "defaults file (or set EVDRIVE_CONFIG)");

    NoiseConfig noise;
    auto add_noise_flags = [&noise](CLI::App* cmd) {
        cmd->add_option("--noise-miss", noise.p_miss, "per-detection drop probability");
        cmd->add_option("--noise-fp", noise.p_fp, "per-frame false positive probability");
        cmd->add_option("--noise-jitter", noise.jitter_sigma, "position/velocity jitter sigma");
        cmd->add_option("--noise-tl-flip", noise.tl_flip, "traffic light belief flip probability");
    };

    auto* run = app.add_subcommand("run", "run one scenario closed-loop");
    std::string scenario_arg, trace_path, report_path;
    std::uint64_t seed = 1;
    run->add_option("--scenario", scenario_arg, "scenario file or built-in name")->required();
    run->add_option("--seed", seed, "run seed");
    run->add_option("--trace", trace_path, "JSONL trace output path");
    run->add_option("--report", report_path, "CSV report output path");
    add_noise_flags(run);

    auto* batch = app.add_subcommand("batch", "run a directory of scenarios");
    std::string batch_dir, seed_spec = "1", batch_out;
    int jobs = 1;
    batch->add_option("--dir", batch_dir, "directory of scenario .toml files")->required();
    batch->add_option("--seeds", seed_spec, "seed spec: N, lo..hi, or a,b,c");
    batch->add_option("-j,--jobs", jobs, "parallel runs");
    batch->add_option("--out", batch_out, "CSV output path (default stdout)");
    add_noise_flags(batch);

    auto* evalp = app.add_subcommand("eval-perception", "mean perception losses of a trace");
    std::string eval_trace;
    evalp->add_option("--trace", eval_trace, "JSONL trace path")->required();

    app.add_subcommand("fusion-selftest", "verify the attention stack invariants");

    auto* events_cmd = app.add_subcommand("events", "synthesize an event stream from PGM frames");
    std::string events_in, events_out;
    double threshold = 0.2, fps = 20.0;
    events_cmd->add_option("--in", events_in, "directory of .pgm frames")->required();
    events_cmd->add_option("--out", events_out, "output event stream path")->required();
    events_cmd->add_option("--threshold", threshold, "log-intensity contrast threshold");
    events_cmd->add_option("--fps", fps, "frame rate used for timestamps");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(scenario_arg, seed, trace_path, report_path, config_path, noise);
        if (batch->parsed())
            return cmd_batch(batch_dir, seed_spec, jobs, batch_out, config_path, noise);
        if (evalp->parsed()) return cmd_eval_perception(eval_trace);
        if (app.get_subcommand("fusion-selftest")->parsed()) return cmd_fusion_selftest();
        if (events_cmd->parsed()) return cmd_events(events_in, events_out, threshold, fps);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
