// curvseg command-line front end: segment, corpus export/eval, serve.

#include <algorithm>
#include <atomic>
#include <csignal>
#include <pthread.h>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "curvseg/segmenter.hpp"
#include "curvseg/service.hpp"
#include "curvseg/synthcorpus.hpp"

namespace fs = std::filesystem;
using namespace curvseg;

namespace {

struct ParamFlags {
    double p = 2.0;
    double beta = 20.0;
    double lambda = 2.0;
    std::string mode = "magnitude";
    bool no_probe = false;
    std::string fallback = "bg";

    SegmentationParams resolve() const {
        SegmentationParams params;
        params.curvature.p = p;
        params.curvature.beta = beta;
        params.lambda = lambda;
        params.mode = parse_attraction_mode(mode);
        params.solver.probing = !no_probe;
        params.solver.fallback = parse_fill_policy(fallback);
        params.validate();
        return params;
    }
};

void add_param_flags(CLI::App* cmd, ParamFlags& f) {
    cmd->add_option("--p", f.p, "Angle exponent")->capture_default_str();
    cmd->add_option("--beta", f.beta, "Contrast strength")->capture_default_str();
    cmd->add_option("--lambda", f.lambda, "Attraction weight")->capture_default_str();
    cmd->add_option("--mode", f.mode, "Attraction mode")
        ->check(CLI::IsMember({"magnitude", "signed"}))
        ->capture_default_str();
    cmd->add_flag("--no-probe", f.no_probe, "Disable probing");
    cmd->add_option("--fallback", f.fallback, "Label for unresolved pixels")
        ->check(CLI::IsMember({"bg", "fg"}))
        ->capture_default_str();
}

int worker_count() {
    int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("CURVSEG_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1) {
                n = std::min(n, cap);
            }
        } catch (const std::exception&) {
        }
    }
    return n;
}

struct EvalLine {
    std::string text;
    bool ok = true;
};

EvalLine eval_case(const fs::path& dir, const SegmentationParams& params) {
    const auto name = dir.filename().string();
    try {
        const auto image = load_image(dir / "image.pgm");
        const auto seeds = load_seeds(dir / "seeds.pgm");
        const auto truth = mask_from_raster(read_pgm(dir / "truth.pgm"));
        const auto r = segment(image, seeds, params);
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%s dice=%.6f unlabeled=%lld energy=%.10g ms=%.1f", name.c_str(),
                      dice(r.mask, truth), static_cast<long long>(r.report.unlabeled_count),
                      r.report.energy_of_completion, r.report.runtime_ms);
        return {buf, true};
    } catch (const std::exception& e) {
        return {name + " error=" + e.what(), false};
    }
}

int run_eval(const fs::path& root, const SegmentationParams& params) {
    std::vector<fs::path> cases;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(root, ec)) {
        if (entry.is_directory() && fs::exists(entry.path() / "image.pgm")) {
            cases.push_back(entry.path());
        }
    }
    if (ec) {
        throw Error("cannot read directory " + root.string() + ": " + ec.message());
    }
    if (cases.empty()) {
        throw Error("no corpus cases found in " + root.string());
    }
    std::sort(cases.begin(), cases.end());

    std::vector<EvalLine> lines(cases.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < cases.size(); i = next++) {
            lines[i] = eval_case(cases[i], params);
        }
    };
    const int n = std::min<int>(worker_count(), static_cast<int>(cases.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) {
        pool.emplace_back(work);
    }
    work();
    for (auto& t : pool) {
        t.join();
    }
    bool ok = true;
    for (const auto& line : lines) {
        std::cout << line.text << '\n';
        ok = ok && line.ok;
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Curvature-regularized seeded segmentation"};
    app.require_subcommand(1);

    std::string image_path, seeds_path, out_path;
    ParamFlags seg_flags;
    auto* seg = app.add_subcommand("segment", "Segment an image from seed scribbles");
    seg->add_option("--image", image_path, "Input image (PGM or PNG)")->required();
    seg->add_option("--seeds", seeds_path, "Seed image (PGM or PNG)")->required();
    seg->add_option("--out", out_path, "Output mask PNG")->required();
    add_param_flags(seg, seg_flags);

    auto* corpus = app.add_subcommand("corpus", "Synthetic control corpus");
    corpus->require_subcommand(1);
    std::string export_dir, eval_dir;
    auto* exp = corpus->add_subcommand("export", "Write the control cases as PGM files");
    exp->add_option("--dir", export_dir, "Output directory")->required();
    ParamFlags eval_flags;
    auto* eval = corpus->add_subcommand("eval", "Segment every exported case and report Dice");
    eval->add_option("--dir", eval_dir, "Corpus directory")->required();
    add_param_flags(eval, eval_flags);

    ServiceConfig serve_cfg;
    std::string static_dir;
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("--host", serve_cfg.host, "Listen address")->capture_default_str();
    serve->add_option("--port", serve_cfg.port, "Listen port")->capture_default_str();
    serve->add_option("--static", static_dir, "UI bundle directory served at /");
    serve->add_option("--workers", serve_cfg.workers, "Worker threads (0: one per core)")->capture_default_str();
    serve->add_option("--queue-limit", serve_cfg.queue_limit, "Max queued requests")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*seg) {
            const auto params = seg_flags.resolve();
            const auto result = segment(load_image(image_path), load_seeds(seeds_path), params);
            save_result(result, out_path);
            std::cout << format_report(result) << '\n';
            return 0;
        }
        if (*exp) {
            const auto cases = default_corpus();
            export_corpus(export_dir, cases);
            for (const auto& c : cases) {
                std::cout << (fs::path(export_dir) / c.name).string() << '\n';
            }
            return 0;
        }
        if (*eval) {
            return run_eval(eval_dir, eval_flags.resolve());
        }
        if (*serve) {
            serve_cfg.static_dir = static_dir;
            // Block the stop signals in every thread; a dedicated thread waits for them.
            sigset_t stop_signals;
            sigemptyset(&stop_signals);
            sigaddset(&stop_signals, SIGINT);
            sigaddset(&stop_signals, SIGTERM);
            pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);
            Server server(serve_cfg);
            const int port = server.bind();
            std::cout << "listening on http://" << serve_cfg.host << ":" << port << std::endl;
            std::thread waiter([&] {
                int sig = 0;
                sigwait(&stop_signals, &sig);
                server.stop();
            });
            server.serve();
            if (waiter.joinable()) {
                // serve() only returns after stop(), which the waiter issued.
                waiter.join();
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
