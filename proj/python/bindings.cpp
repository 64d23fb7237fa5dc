#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "curvseg/curvature.hpp"
#include "curvseg/energy.hpp"
#include "curvseg/qpbo.hpp"
#include "curvseg/segmenter.hpp"
#include "curvseg/synthcorpus.hpp"

namespace py = pybind11;
using namespace curvseg;

namespace {

using ImageArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ByteArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

GrayImage image_from_array(const ImageArray& a) {
    if (a.ndim() != 2) {
        throw Error("image must be a 2-D array");
    }
    const auto h = static_cast<int>(a.shape(0));
    const auto w = static_cast<int>(a.shape(1));
    return GrayImage(w, h, std::vector<double>(a.data(), a.data() + a.size()));
}

SeedMask seeds_from_array(const ByteArray& a) {
    if (a.ndim() != 2) {
        throw Error("seeds must be a 2-D array");
    }
    std::vector<Seed> labels;
    labels.reserve(static_cast<std::size_t>(a.size()));
    for (py::ssize_t i = 0; i < a.size(); ++i) {
        const auto v = a.data()[i];
        if (v > 2) {
            throw Error("seed values must be 0 (none), 1 (foreground) or 2 (background)");
        }
        labels.push_back(static_cast<Seed>(v));
    }
    return SeedMask(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)), std::move(labels));
}

py::array_t<double> to_array(const GrayImage& img) {
    py::array_t<double> out({img.height(), img.width()});
    std::copy(img.values().begin(), img.values().end(), out.mutable_data());
    return out;
}

py::array_t<std::uint8_t> to_array(int width, int height, std::span<const std::uint8_t> v) {
    py::array_t<std::uint8_t> out({height, width});
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::array_t<std::uint8_t> to_array(const SeedMask& s) {
    std::vector<std::uint8_t> v;
    for (const auto l : s.labels()) {
        v.push_back(static_cast<std::uint8_t>(l));
    }
    return to_array(s.width(), s.height(), v);
}

using UnaryList = std::vector<std::tuple<std::int32_t, double, double>>;
using PairList = std::vector<std::tuple<std::int32_t, std::int32_t, std::array<double, 4>>>;

Energy energy_from_lists(std::int32_t n, const UnaryList& unary, const PairList& pairwise, double constant) {
    Energy e(n);
    e.add_constant(constant);
    for (const auto& [i, c0, c1] : unary) {
        e.add_unary(i, c0, c1);
    }
    for (const auto& [u, v, t] : pairwise) {
        e.add_pairwise(u, v, t);
    }
    return e;
}

std::vector<int> labels_to_ints(std::span<const Label> l) {
    std::vector<int> out;
    out.reserve(l.size());
    for (const auto x : l) {
        out.push_back(static_cast<int>(x));
    }
    return out;
}

py::dict case_dict(const ControlCase& c) {
    py::dict d;
    d["name"] = c.name;
    d["description"] = c.description;
    d["image"] = to_array(c.image);
    d["seeds"] = to_array(c.seeds);
    d["ground_truth"] = to_array(c.ground_truth.width, c.ground_truth.height, c.ground_truth.values);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Curvature-regularized binary segmentation";
    py::register_exception<Error>(m, "CurvsegError", PyExc_ValueError);

    m.def(
        "segment",
        [](const ImageArray& image, const ByteArray& seeds, double p, double beta, double lambda,
           const std::string& mode, bool probing, const std::string& fallback) {
            SegmentationParams params;
            params.curvature.p = p;
            params.curvature.beta = beta;
            params.lambda = lambda;
            params.mode = parse_attraction_mode(mode);
            params.solver.probing = probing;
            params.solver.fallback = parse_fill_policy(fallback);
            const auto img = image_from_array(image);
            const auto sm = seeds_from_array(seeds);
            SegmentationResult r;
            {
                py::gil_scoped_release release;
                r = segment(img, sm, params);
            }
            py::dict d;
            d["mask"] = to_array(r.mask.width, r.mask.height, r.mask.values);
            d["energy"] = r.report.energy_of_completion;
            d["lower_bound"] = r.report.lower_bound;
            d["unlabeled_count"] = r.report.unlabeled_count;
            d["probes_run"] = r.report.probes_run;
            d["runtime_ms"] = r.report.runtime_ms;
            return d;
        },
        py::arg("image"), py::arg("seeds"), py::kw_only(), py::arg("p") = 2.0, py::arg("beta") = 20.0,
        py::arg("lam") = 2.0, py::arg("mode") = "magnitude", py::arg("probing") = true, py::arg("fallback") = "bg",
        "Segment a [0, 1] float image given seeds (0 none, 1 foreground, 2 background).");

    m.def(
        "curvature_edges",
        [](const ImageArray& image, double p, double beta) {
            std::vector<std::tuple<NodeId, NodeId, double>> out;
            for (const auto& e : curvature_edges(image_from_array(image), {p, beta})) {
                out.emplace_back(e.u, e.v, e.weight);
            }
            return out;
        },
        py::arg("image"), py::kw_only(), py::arg("p") = 2.0, py::arg("beta") = 20.0,
        "Accumulated effective edges (u, v, weight) of the image lattice.");

    m.def(
        "solve_energy",
        [](std::int32_t n, const UnaryList& unary, const PairList& pairwise, double constant, bool probing) {
            SolverOptions opts;
            opts.probing = probing;
            const auto r = solve_energy(energy_from_lists(n, unary, pairwise, constant), opts);
            py::dict d;
            d["labeling"] = labels_to_ints(r.labeling);
            d["unlabeled_count"] = r.unlabeled_count;
            d["lower_bound"] = r.lower_bound;
            d["energy"] = r.energy_of_completion;
            d["probes_run"] = r.probes_run;
            return d;
        },
        py::arg("n"), py::arg("unary") = UnaryList{}, py::arg("pairwise") = PairList{}, py::arg("constant") = 0.0,
        py::arg("probing") = true,
        "Minimize a quadratic pseudo-Boolean energy. unary: (i, c0, c1); pairwise: (u, v, (t00, t01, t10, t11)).");

    m.def(
        "solve_qpbo",
        [](std::int32_t n, const UnaryList& unary, const PairList& pairwise, double constant) {
            const auto q = quantize(energy_from_lists(n, unary, pairwise, constant));
            const auto r = solve_qpbo(q);
            return py::make_tuple(labels_to_ints(r.labeling), r.lower_bound / static_cast<double>(kDefaultScale));
        },
        py::arg("n"), py::arg("unary") = UnaryList{}, py::arg("pairwise") = PairList{}, py::arg("constant") = 0.0,
        "Roof-dual partial labeling (-1 = unlabeled) and lower bound.");

    m.def(
        "brute_force",
        [](std::int32_t n, const UnaryList& unary, const PairList& pairwise, double constant) {
            const auto r = brute_force_optimum(energy_from_lists(n, unary, pairwise, constant));
            return py::make_tuple(std::vector<int>(r.labeling.begin(), r.labeling.end()), r.energy);
        },
        py::arg("n"), py::arg("unary") = UnaryList{}, py::arg("pairwise") = PairList{}, py::arg("constant") = 0.0,
        "Exhaustive minimizer for small n.");

    m.def("corpus_names", [] {
        std::vector<std::string> names;
        for (const auto& c : default_corpus()) {
            names.push_back(c.name);
        }
        return names;
    });
    m.def(
        "corpus_case",
        [](const std::string& name) {
            const auto c = find_case(name);
            if (!c) {
                throw py::key_error("unknown corpus case: " + name);
            }
            return case_dict(*c);
        },
        py::arg("name"));
    m.def(
        "export_corpus", [](const std::string& dir) { export_corpus(dir, default_corpus()); }, py::arg("dir"));

    m.def(
        "load_image", [](const std::string& path) { return to_array(load_image(path)); }, py::arg("path"));
    m.def(
        "load_seeds", [](const std::string& path) { return to_array(load_seeds(path)); }, py::arg("path"));
    m.def(
        "dice",
        [](const ByteArray& a, const ByteArray& b) {
            auto mask = [](const ByteArray& x) {
                if (x.ndim() != 2) {
                    throw Error("mask must be a 2-D array");
                }
                BinaryMask mk(static_cast<int>(x.shape(1)), static_cast<int>(x.shape(0)));
                for (py::ssize_t i = 0; i < x.size(); ++i) {
                    mk.values[static_cast<std::size_t>(i)] = x.data()[i] ? 1 : 0;
                }
                return mk;
            };
            return dice(mask(a), mask(b));
        },
        py::arg("a"), py::arg("b"));
}
