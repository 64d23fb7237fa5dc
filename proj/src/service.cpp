#include "curvseg/service.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "curvseg/base64.hpp"
#include "curvseg/segmenter.hpp"
#include "curvseg/synthcorpus.hpp"

namespace curvseg {

namespace {

using nlohmann::json;

/// Client-side problem; mapped to a 4xx status.
struct BadRequest : Error {
    int status;
    BadRequest(int s, const std::string& msg) : Error(msg), status(s) {}
};

HttpReply json_reply(int status, const json& j) { return {status, "application/json", j.dump()}; }

HttpReply error_reply(int status, const std::string& message) { return json_reply(status, json{{"error", message}}); }

std::string png_base64(const RasterGray& raster) { return base64_encode(encode_png(raster)); }

/// Reads width/height from a PNG IHDR or PGM header without decoding pixels.
std::pair<long, long> peek_dimensions(const std::vector<std::uint8_t>& bytes) {
    static constexpr std::uint8_t kPng[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    if (bytes.size() >= 24 && std::equal(std::begin(kPng), std::end(kPng), bytes.begin())) {
        auto be32 = [&](std::size_t off) {
            return (static_cast<long>(bytes[off]) << 24) | (static_cast<long>(bytes[off + 1]) << 16) |
                   (static_cast<long>(bytes[off + 2]) << 8) | static_cast<long>(bytes[off + 3]);
        };
        return {be32(16), be32(20)};
    }
    const auto r = decode_pgm(bytes);
    return {r.width, r.height};
}

json rle_of(const SeedMask& seeds) {
    json runs = json::array();
    const auto labels = seeds.labels();
    std::size_t i = 0;
    while (i < labels.size()) {
        std::size_t j = i;
        while (j < labels.size() && labels[j] == labels[i]) {
            ++j;
        }
        runs.push_back(json::array({static_cast<int>(labels[i]), j - i}));
        i = j;
    }
    return json{{"width", seeds.width()}, {"height", seeds.height()}, {"runs", runs}};
}

Seed parse_class(const json& c) {
    if (c.is_string()) {
        const auto s = c.get<std::string>();
        if (s == "fg" || s == "foreground") {
            return Seed::Foreground;
        }
        if (s == "bg" || s == "background") {
            return Seed::Background;
        }
    } else if (c.is_number_integer()) {
        const int v = c.get<int>();
        if (v == 1) {
            return Seed::Foreground;
        }
        if (v == 2) {
            return Seed::Background;
        }
    }
    throw BadRequest(400, "invalid seed class: " + c.dump());
}

void apply_rle(const json& rle, SeedMask& seeds) {
    if (rle.value("width", -1) != seeds.width() || rle.value("height", -1) != seeds.height()) {
        throw BadRequest(400, "seed rle dimensions do not match image");
    }
    const auto& runs = rle.at("runs");
    std::size_t pos = 0;
    for (const auto& run : runs) {
        if (!run.is_array() || run.size() != 2) {
            throw BadRequest(400, "seed rle runs must be [class, count] pairs");
        }
        const int value = run[0].get<int>();
        const auto count = run[1].get<std::size_t>();
        if (value < 0 || value > 2) {
            throw BadRequest(400, "invalid seed class in rle: " + std::to_string(value));
        }
        if (count > seeds.size() - pos) {
            throw BadRequest(400, "seed rle longer than image");
        }
        for (std::size_t k = 0; k < count; ++k, ++pos) {
            const int row = static_cast<int>(pos) / seeds.width();
            seeds.set(row, static_cast<int>(pos) - row * seeds.width(), static_cast<Seed>(value));
        }
    }
    if (pos != seeds.size()) {
        throw BadRequest(400, "seed rle shorter than image");
    }
}

/// Scribble points paint a disk of `brush_radius` (pixel centers with
/// distance <= radius); later points overwrite earlier ones.
void apply_points(const json& points, double radius, SeedMask& seeds) {
    const int reach = static_cast<int>(std::floor(radius));
    for (const auto& pt : points) {
        const int x = pt.at("x").get<int>();
        const int y = pt.at("y").get<int>();
        if (x < 0 || y < 0 || x >= seeds.width() || y >= seeds.height()) {
            throw BadRequest(400, "seed point out of bounds");
        }
        const Seed s = parse_class(pt.at("class"));
        for (int r = std::max(0, y - reach); r <= std::min(seeds.height() - 1, y + reach); ++r) {
            for (int c = std::max(0, x - reach); c <= std::min(seeds.width() - 1, x + reach); ++c) {
                if (std::hypot(r - y, c - x) <= radius) {
                    seeds.set(r, c, s);
                }
            }
        }
    }
}

SeedMask parse_seeds(const json& j, int width, int height) {
    SeedMask seeds(width, height);
    if (!j.is_object()) {
        throw BadRequest(400, "seeds must be an object");
    }
    if (j.contains("rle")) {
        apply_rle(j.at("rle"), seeds);
    }
    if (j.contains("points")) {
        const double radius = j.value("brush_radius", 0.0);
        if (!(radius >= 0.0) || radius > kMaxServiceSide) {
            throw BadRequest(400, "brush_radius must be in [0, 1024]");
        }
        apply_points(j.at("points"), radius, seeds);
    }
    return seeds;
}

SegmentationParams parse_params(const json& j) {
    SegmentationParams p;
    if (j.is_null()) {
        return p;
    }
    if (!j.is_object()) {
        throw BadRequest(400, "params must be an object");
    }
    p.curvature.p = j.value("p", p.curvature.p);
    p.curvature.beta = j.value("beta", p.curvature.beta);
    p.lambda = j.value("lambda", p.lambda);
    if (j.contains("mode")) {
        p.mode = parse_attraction_mode(j.at("mode").get<std::string>());
    }
    p.solver.probing = j.value("probing", p.solver.probing);
    if (j.contains("fallback")) {
        p.solver.fallback = parse_fill_policy(j.at("fallback").get<std::string>());
    }
    p.validate();
    return p;
}

json params_json(const SegmentationParams& p) {
    return json{{"p", p.curvature.p},
                {"beta", p.curvature.beta},
                {"lambda", p.lambda},
                {"mode", to_string(p.mode)},
                {"probing", p.solver.probing},
                {"fallback", to_string(p.solver.fallback)}};
}

struct Job {
    GrayImage image;
    SeedMask seeds;
    SegmentationParams params;
};

Job parse_segment_request(const std::string& body) {
    json req;
    try {
        req = json::parse(body);
    } catch (const json::exception& e) {
        throw BadRequest(400, std::string("malformed JSON: ") + e.what());
    }
    if (!req.is_object() || !req.contains("image") || !req.at("image").is_string()) {
        throw BadRequest(400, "missing image");
    }
    Job job;
    const auto image_field = req.at("image").get<std::string>();
    std::optional<ControlCase> preset = find_case(image_field);
    try {
        if (preset) {
            job.image = preset->image;
        } else {
            const auto bytes = base64_decode(image_field);
            const auto [w, h] = peek_dimensions(bytes);
            if (w > kMaxServiceSide || h > kMaxServiceSide) {
                throw BadRequest(413, "image too large: " + std::to_string(w) + "x" + std::to_string(h) +
                                          " exceeds 1024x1024");
            }
            job.image = decode_image(bytes);
        }
        if (req.contains("seeds") && !req.at("seeds").is_null()) {
            job.seeds = parse_seeds(req.at("seeds"), job.image.width(), job.image.height());
        } else if (preset) {
            job.seeds = preset->seeds;
        } else {
            throw BadRequest(400, "missing seeds");
        }
        job.params = parse_params(req.value("params", json()));
    } catch (const BadRequest&) {
        throw;
    } catch (const json::exception& e) {
        throw BadRequest(400, std::string("malformed request: ") + e.what());
    } catch (const Error& e) {
        throw BadRequest(400, e.what());
    }
    if (job.seeds.count(Seed::Foreground) == 0 || job.seeds.count(Seed::Background) == 0) {
        throw BadRequest(400, "both seed classes required");
    }
    return job;
}

}  // namespace

HttpReply handle_segment(const std::string& body) {
    Job job;
    try {
        job = parse_segment_request(body);
    } catch (const BadRequest& e) {
        return error_reply(e.status, e.what());
    }
    try {
        const auto result = segment(job.image, job.seeds, job.params);
        const auto& r = result.report;
        json stats{{"energy", r.energy_of_completion},
                   {"lower_bound", r.lower_bound},
                   {"unlabeled_count", r.unlabeled_count},
                   {"runtime_ms", r.runtime_ms},
                   {"probes_run", r.probes_run},
                   {"seed_penalty", result.seed_penalty}};
        return json_reply(200, json{{"mask", png_base64(to_raster(result.mask))},
                                    {"width", result.mask.width},
                                    {"height", result.mask.height},
                                    {"stats", stats},
                                    {"params", params_json(job.params)}});
    } catch (const std::exception& e) {
        return error_reply(500, e.what());
    }
}

HttpReply handle_corpus_list() {
    json names = json::array();
    for (const auto& c : default_corpus()) {
        names.push_back(c.name);
    }
    return json_reply(200, json{{"cases", names}});
}

HttpReply handle_corpus_case(const std::string& name) {
    const auto c = find_case(name);
    if (!c) {
        return error_reply(404, "unknown corpus case: " + name);
    }
    return json_reply(200, json{{"name", c->name},
                                {"description", c->description},
                                {"width", c->image.width()},
                                {"height", c->image.height()},
                                {"image", png_base64(to_raster(c->image))},
                                {"seeds", json{{"rle", rle_of(c->seeds)}}},
                                {"ground_truth", png_base64(to_raster(c->ground_truth))}});
}

struct Server::Impl {
    ServiceConfig config;
    httplib::Server http;
    int port = -1;
};

namespace {

void send(httplib::Response& res, const HttpReply& reply) {
    res.status = reply.status;
    res.set_content(reply.body, reply.content_type);
}

}  // namespace

Server::Server(ServiceConfig config) : impl_(std::make_unique<Impl>()) {
    impl_->config = std::move(config);
    auto& http = impl_->http;
    const auto workers = static_cast<std::size_t>(
        impl_->config.workers > 0 ? impl_->config.workers : std::max(1u, std::thread::hardware_concurrency()));
    const auto queue_limit = impl_->config.queue_limit;
    http.new_task_queue = [workers, queue_limit] { return new httplib::ThreadPool(workers, queue_limit); };
    http.set_payload_max_length(64 * 1024 * 1024);

    http.Post("/api/segment",
              [](const httplib::Request& req, httplib::Response& res) { send(res, handle_segment(req.body)); });
    http.Get("/api/corpus", [](const httplib::Request&, httplib::Response& res) { send(res, handle_corpus_list()); });
    http.Get(R"(/api/corpus/([A-Za-z0-9_\-]+))", [](const httplib::Request& req, httplib::Response& res) {
        send(res, handle_corpus_case(req.matches[1]));
    });
    http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            message = e.what();
        } catch (...) {
        }
        send(res, error_reply(500, message));
    });
    if (!impl_->config.static_dir.empty()) {
        if (!http.set_mount_point("/", impl_->config.static_dir.string())) {
            throw Error("static directory not found: " + impl_->config.static_dir.string());
        }
    }
}

Server::~Server() { stop(); }

int Server::bind() {
    auto& cfg = impl_->config;
    if (cfg.port == 0) {
        impl_->port = impl_->http.bind_to_any_port(cfg.host);
    } else if (impl_->http.bind_to_port(cfg.host, cfg.port)) {
        impl_->port = cfg.port;
    }
    if (impl_->port < 0) {
        throw Error("cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
    }
    return impl_->port;
}

void Server::serve() {
    if (impl_->port < 0) {
        bind();
    }
    impl_->http.listen_after_bind();
}

void Server::stop() {
    if (impl_->http.is_running()) {
        impl_->http.stop();
    }
}

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace curvseg
