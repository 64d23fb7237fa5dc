#include "curvseg/synthcorpus.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

namespace curvseg {

namespace {

struct Canvas {
    int width;
    int height;
    std::vector<double> values;
    BinaryMask truth;
    SeedMask seeds;

    Canvas(int w, int h)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, 0.0), truth(w, h), seeds(w, h) {}

    double& value(int r, int c) { return values[static_cast<std::size_t>(node_at(r, c, width))]; }

    void seed_disk(double cr, double cc, double radius, Seed s) {
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) {
                if (std::hypot(r - cr, c - cc) < radius) {
                    seeds.mark(r, c, s);
                }
            }
        }
    }

    void seed_border(Seed s) {
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) {
                if (r == 0 || c == 0 || r == height - 1 || c == width - 1) {
                    seeds.mark(r, c, s);
                }
            }
        }
    }

    ControlCase finish(std::string name, std::string description) {
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) {
                const Seed s = seeds.at(r, c);
                if ((s == Seed::Foreground && !truth.at(r, c)) || (s == Seed::Background && truth.at(r, c))) {
                    throw Error("control case seeds contradict ground truth");
                }
            }
        }
        return ControlCase{std::move(name), GrayImage(width, height, std::move(values)), std::move(truth),
                           std::move(seeds), std::move(description), std::nullopt, BinaryMask{}};
    }
};

struct Vec2 {
    double x;  // column
    double y;  // row
};

double cross(Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

bool inside_convex(const std::vector<Vec2>& poly, Vec2 p) {
    bool pos = false;
    bool neg = false;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const double s = cross(poly[i], poly[(i + 1) % poly.size()], p);
        pos = pos || s > 1e-9;
        neg = neg || s < -1e-9;
    }
    return !(pos && neg);
}

/// Distance from p to segment ab and the arc-length parameter of the foot point.
std::pair<double, double> segment_distance(Vec2 a, Vec2 b, Vec2 p) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
    const double fx = a.x + t * dx;
    const double fy = a.y + t * dy;
    return {std::hypot(p.x - fx, p.y - fy), t * std::sqrt(len2)};
}

bool on_dash(double arc, int gap_len, int dot_len) {
    if (gap_len == 0) {
        return true;
    }
    const double period = gap_len + dot_len;
    return std::fmod(arc, period) < dot_len;
}

}  // namespace

ControlCase gen_bar(int width, int height, int bar_len, int bar_thickness) {
    if (width < 3 || height < 3) {
        throw Error("bar canvas too small");
    }
    if (bar_len < 5 || bar_thickness < 1 || bar_len > width - 2 || bar_thickness > height - 2) {
        throw Error("bar does not fit in canvas");
    }
    Canvas cv(width, height);
    const int r0 = (height - bar_thickness) / 2;
    const int c0 = (width - bar_len) / 2;
    for (int r = r0; r < r0 + bar_thickness; ++r) {
        for (int c = c0; c < c0 + bar_len; ++c) {
            cv.value(r, c) = 1.0;
            cv.truth.at(r, c) = 1;
        }
    }
    // FG scribble near the start of the bar, well inside its first fifth.
    const int fg_cols = std::max(1, bar_len / 10);
    for (int r = r0 + bar_thickness / 2 - (bar_thickness > 1 ? 1 : 0); r <= r0 + bar_thickness / 2; ++r) {
        for (int c = c0 + 1; c < c0 + 1 + fg_cols; ++c) {
            cv.seeds.mark(std::min(r, r0 + bar_thickness - 1), c, Seed::Foreground);
        }
    }
    cv.seed_border(Seed::Background);
    return cv.finish("bar", "white bar ending mid-image; FG seed near one end only");
}

ControlCase gen_dotted_outline(OutlineShape shape, int gap_len, int dot_len) {
    if (gap_len < 0) {
        throw Error("gap length must be >= 0");
    }
    if (dot_len < 1) {
        throw Error("dot length must be >= 1");
    }
    constexpr int kSize = 40;
    constexpr double kHalfBand = 1.0;  // outline band half-width in pixels
    Canvas cv(kSize, kSize);
    std::string name;
    std::string description;

    if (shape == OutlineShape::Circle) {
        constexpr double kRadius = 12.0;
        const double cy = kSize / 2.0;
        const double cx = kSize / 2.0;
        for (int r = 0; r < kSize; ++r) {
            for (int c = 0; c < kSize; ++c) {
                const double d = std::hypot(r - cy, c - cx);
                double theta = std::atan2(r - cy, c - cx);
                if (theta < 0) {
                    theta += 2 * std::numbers::pi;
                }
                if (std::abs(d - kRadius) < kHalfBand && on_dash(theta * kRadius, gap_len, dot_len)) {
                    cv.value(r, c) = 1.0;
                }
                if (d < kRadius + kHalfBand) {
                    cv.truth.at(r, c) = 1;
                }
            }
        }
        cv.seed_disk(cy, cx, 5.0, Seed::Foreground);
        name = "dotted_circle";
        description = "dashed circle outline with zero inside/outside contrast";
    } else {
        const std::vector<Vec2> tri = {{6.0, 32.0}, {34.0, 32.0}, {20.0, 6.0}};
        double perimeter_offset = 0.0;
        std::vector<double> offsets;
        for (std::size_t i = 0; i < tri.size(); ++i) {
            offsets.push_back(perimeter_offset);
            const auto& a = tri[i];
            const auto& b = tri[(i + 1) % tri.size()];
            perimeter_offset += std::hypot(b.x - a.x, b.y - a.y);
        }
        for (int r = 0; r < kSize; ++r) {
            for (int c = 0; c < kSize; ++c) {
                const Vec2 p{static_cast<double>(c), static_cast<double>(r)};
                double best = std::numeric_limits<double>::infinity();
                double arc = 0.0;
                for (std::size_t i = 0; i < tri.size(); ++i) {
                    const auto [d, t] = segment_distance(tri[i], tri[(i + 1) % tri.size()], p);
                    if (d < best) {
                        best = d;
                        arc = offsets[i] + t;
                    }
                }
                if (best < kHalfBand && on_dash(arc, gap_len, dot_len)) {
                    cv.value(r, c) = 1.0;
                }
                if (best < kHalfBand || inside_convex(tri, p)) {
                    cv.truth.at(r, c) = 1;
                }
            }
        }
        cv.seed_disk(23.0, 20.0, 6.0, Seed::Foreground);
        name = "dotted_triangle";
        description = "dashed triangle outline with zero inside/outside contrast";
    }
    cv.seed_border(Seed::Background);
    return cv.finish(std::move(name), std::move(description));
}

ControlCase gen_circle_bump(int big_radius, int small_radius) {
    if (small_radius < 1 || big_radius < 2) {
        throw Error("radii must be positive");
    }
    if (small_radius >= big_radius) {
        throw Error("bump radius must be smaller than disk radius");
    }
    const int size = std::max(48, 2 * (big_radius + small_radius) + 8);
    Canvas cv(size, size);
    const double cy = size / 2.0;
    const double cx = size / 2.0 - small_radius;
    const double by = cy;
    const double bx = cx + big_radius;
    BinaryMask bump(size, size);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            const bool in_big = std::hypot(r - cy, c - cx) < big_radius;
            const bool in_small = std::hypot(r - by, c - bx) < small_radius;
            if (in_big || in_small) {
                cv.value(r, c) = 1.0;
            }
            if (in_big) {
                cv.truth.at(r, c) = 1;
            } else if (in_small) {
                bump.at(r, c) = 1;
            }
        }
    }
    cv.seed_disk(cy, cx, big_radius / 3.0, Seed::Foreground);
    cv.seed_disk(by, bx + small_radius / 2.0, 2.0, Seed::Background);
    cv.seed_border(Seed::Background);
    auto out = cv.finish("circle_bump", "disk with a same-intensity bump on its rim");
    out.excluded = std::move(bump);
    return out;
}

ControlCase gen_corner_shape(double angle_deg) {
    if (!(angle_deg >= 15.0 && angle_deg <= 165.0)) {
        throw Error("corner angle must be in [15, 165] degrees");
    }
    constexpr int kSize = 48;
    constexpr double kLeg = 26.0;
    Canvas cv(kSize, kSize);
    const double half = angle_deg * std::numbers::pi / 360.0;
    const Vec2 apex{8.0, 24.0};
    const std::vector<Vec2> tri = {
        apex,
        {apex.x + kLeg * std::cos(half), apex.y + kLeg * std::sin(half)},
        {apex.x + kLeg * std::cos(half), apex.y - kLeg * std::sin(half)},
    };
    for (int r = 0; r < kSize; ++r) {
        for (int c = 0; c < kSize; ++c) {
            if (inside_convex(tri, {static_cast<double>(c), static_cast<double>(r)})) {
                cv.value(r, c) = 1.0;
                cv.truth.at(r, c) = 1;
            }
        }
    }
    const double centroid_x = (tri[0].x + tri[1].x + tri[2].x) / 3.0;
    cv.seed_disk(apex.y, centroid_x + 4.0, 1.5, Seed::Foreground);
    cv.seed_border(Seed::Background);
    const int deg = static_cast<int>(std::lround(angle_deg));
    auto out = cv.finish("corner_" + std::to_string(deg), "high-contrast triangle with a " + std::to_string(deg) +
                                                              " degree apex");
    out.apex = PixelPoint{static_cast<int>(apex.y), static_cast<int>(apex.x)};
    return out;
}

std::vector<ControlCase> default_corpus() {
    std::vector<ControlCase> cases;
    cases.push_back(gen_bar());
    cases.push_back(gen_circle_bump());
    cases.push_back(gen_corner_shape(45.0));
    cases.push_back(gen_corner_shape(90.0));
    cases.push_back(gen_dotted_outline(OutlineShape::Circle, 3, 4));
    cases.push_back(gen_dotted_outline(OutlineShape::Polygon, 3, 4));
    std::sort(cases.begin(), cases.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return cases;
}

std::optional<ControlCase> find_case(const std::string& name) {
    for (auto& c : default_corpus()) {
        if (c.name == name) {
            return std::move(c);
        }
    }
    return std::nullopt;
}

void export_corpus(const std::filesystem::path& dir, const std::vector<ControlCase>& cases) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error("cannot create directory " + dir.string() + ": " + ec.message());
    }
    for (const auto& c : cases) {
        const auto sub = dir / c.name;
        std::filesystem::create_directories(sub, ec);
        if (ec) {
            throw Error("cannot create directory " + sub.string() + ": " + ec.message());
        }
        write_pgm(sub / "image.pgm", to_raster(c.image));
        write_pgm(sub / "seeds.pgm", seeds_to_raster(c.seeds));
        write_pgm(sub / "truth.pgm", to_raster(c.ground_truth));
    }
}

template <typename T>
BruteForceResult brute_force_optimum(const BasicEnergy<T>& e) {
    const std::int32_t n = e.size();
    if (n > 24) {
        throw Error("brute force limited to 24 variables");
    }
    std::vector<std::uint8_t> best(static_cast<std::size_t>(n), 0);
    T best_value = evaluate_bits(e, best);
    std::vector<std::uint8_t> x = best;
    const std::uint64_t total = std::uint64_t{1} << n;
    // Lexicographic order with x_0 most significant is plain counting order
    // over the reversed bit string, so the first strict improvement wins ties.
    for (std::uint64_t code = 1; code < total; ++code) {
        for (std::int32_t i = 0; i < n; ++i) {
            x[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((code >> (n - 1 - i)) & 1u);
        }
        const T v = evaluate_bits(e, x);
        if (v < best_value) {
            best_value = v;
            best = x;
        }
    }
    return {best, static_cast<double>(best_value)};
}

template BruteForceResult brute_force_optimum(const Energy&);
template BruteForceResult brute_force_optimum(const IntEnergy&);

template <typename T>
std::vector<std::uint32_t> brute_force_argmin_set(const BasicEnergy<T>& e, double tolerance) {
    const std::int32_t n = e.size();
    if (n > 20) {
        throw Error("argmin enumeration limited to 20 variables");
    }
    const std::uint32_t total = std::uint32_t{1} << n;
    std::vector<T> values(total);
    std::vector<std::uint8_t> x(static_cast<std::size_t>(n), 0);
    T best = std::numeric_limits<T>::max();
    for (std::uint32_t code = 0; code < total; ++code) {
        for (std::int32_t i = 0; i < n; ++i) {
            x[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((code >> i) & 1u);
        }
        values[code] = evaluate_bits(e, x);
        best = std::min(best, values[code]);
    }
    std::vector<std::uint32_t> out;
    for (std::uint32_t code = 0; code < total; ++code) {
        if (static_cast<double>(values[code]) <= static_cast<double>(best) + tolerance) {
            out.push_back(code);
        }
    }
    return out;
}

template std::vector<std::uint32_t> brute_force_argmin_set(const Energy&, double);
template std::vector<std::uint32_t> brute_force_argmin_set(const IntEnergy&, double);

int count_components8(const BinaryMask& mask) {
    std::vector<std::uint8_t> seen(mask.values.size(), 0);
    int components = 0;
    std::vector<NodeId> stack;
    for (NodeId start = 0; start < static_cast<NodeId>(mask.values.size()); ++start) {
        if (!mask.values[static_cast<std::size_t>(start)] || seen[static_cast<std::size_t>(start)]) {
            continue;
        }
        ++components;
        seen[static_cast<std::size_t>(start)] = 1;
        stack.push_back(start);
        while (!stack.empty()) {
            const NodeId v = stack.back();
            stack.pop_back();
            for (const auto& nb : neighbors(v, mask.width, mask.height)) {
                const auto u = static_cast<std::size_t>(nb.node);
                if (mask.values[u] && !seen[u]) {
                    seen[u] = 1;
                    stack.push_back(nb.node);
                }
            }
        }
    }
    return components;
}

}  // namespace curvseg
