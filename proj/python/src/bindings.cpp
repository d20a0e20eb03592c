#include "qwp/crossboost.hpp"
#include "qwp/harness.hpp"
#include "qwp/image_io.hpp"
#include "qwp/metrics.hpp"
#include "qwp/noise.hpp"
#include "qwp/parallel.hpp"
#include "qwp/qwp2d.hpp"
#include "qwp/qwpdn.hpp"
#include "qwp/report.hpp"
#include "qwp/wnnm.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <cstring>

namespace py = pybind11;
using namespace qwp;

namespace {

using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ComplexArray = py::array_t<cdouble, py::array::c_style>;

ImageGrid to_grid(const RealArray& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected a 2D array");
    const auto rows = static_cast<std::size_t>(a.shape(0));
    const auto cols = static_cast<std::size_t>(a.shape(1));
    return ImageGrid(rows, cols, RealVec(a.data(), a.data() + rows * cols));
}

template <typename T>
py::array_t<T> to_array(const Grid<T>& g) {
    py::array_t<T> out({g.rows(), g.cols()});
    std::copy(g.data().begin(), g.data().end(), out.mutable_data());
    return out;
}

Sign parse_sign(const std::string& s) {
    if (s == "+" || s == "plus") return Sign::plus;
    if (s == "-" || s == "minus") return Sign::minus;
    throw std::invalid_argument("sign must be '+' or '-'");
}

DenoiseParams make_params(std::vector<int> levels, int spline_order, std::vector<int> windows,
                          std::vector<double> weights, std::optional<std::size_t> margin) {
    DenoiseParams p;
    p.levels = std::move(levels);
    p.spline_order = spline_order;
    p.window_sizes = std::move(windows);
    p.weights = std::move(weights);
    p.margin = margin;
    return p;
}

std::vector<std::string> validate_text(const std::string& text, bool bench) {
    const nlohmann::json doc = nlohmann::json::parse(text);
    return bench ? validate_bench_report(doc) : validate_run_report(doc);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Directional wavelet-packet and cross-boosted WNNM image denoising";
    py::register_exception<invalid_state>(m, "InvalidStateError", PyExc_RuntimeError);

    m.def("thread_count", &thread_count, "Worker threads used by parallel loops.");
    m.def("set_thread_count", &set_thread_count, py::arg("n"), "Bounds parallelism; 0 restores the default.");

    m.def(
        "add_gaussian_noise",
        [](const RealArray& x, double sigma, std::uint64_t seed) {
            return to_array(add_gaussian_noise(to_grid(x), sigma, seed));
        },
        py::arg("image"), py::arg("sigma"), py::arg("seed") = 0,
        "Adds reproducible N(0, sigma^2) noise; no clipping.");

    m.def("psnr", [](const RealArray& x, const RealArray& y) { return psnr(to_grid(x), to_grid(y)); },
          py::arg("clean"), py::arg("estimate"), "PSNR in dB for peak 255, capped at 400.");
    m.def("ssim", [](const RealArray& x, const RealArray& y) { return ssim(to_grid(x), to_grid(y)); },
          py::arg("clean"), py::arg("estimate"), "Mean SSIM, 11x11 Gaussian window, sigma 1.5.");
    m.def("ssim_map", [](const RealArray& x, const RealArray& y) { return to_array(ssim_map(to_grid(x), to_grid(y))); },
          py::arg("clean"), py::arg("estimate"), "Per-pixel SSIM with mirrored borders.");

    m.def(
        "qwpdn",
        [](const RealArray& noisy, std::vector<int> levels, int spline_order, std::vector<int> windows,
           std::vector<double> weights, std::optional<std::size_t> margin) {
            const ImageGrid x = to_grid(noisy);
            const DenoiseParams p = make_params(std::move(levels), spline_order, std::move(windows), std::move(weights),
                                                margin);
            QwpdnResult r;
            {
                py::gil_scoped_release release;
                r = qwpdn_detailed(x, p);
            }
            return py::make_tuple(to_array(r.image), r.estimated_sigma);
        },
        py::arg("noisy"), py::arg("levels") = std::vector<int>{2, 3, 4}, py::arg("spline_order") = kDefaultSplineOrder,
        py::arg("windows") = std::vector<int>{8}, py::arg("weights") = std::vector<double>{1.0},
        py::arg("margin") = py::none(),
        "Wavelet-packet bivariate shrinkage. Returns (image, estimated noise STD).");

    m.def(
        "wnnm",
        [](const RealArray& noisy, double sigma) {
            const ImageGrid x = to_grid(noisy);
            ImageGrid out;
            {
                py::gil_scoped_release release;
                out = wnnm_denoise(x, sigma, WnnmParams::for_sigma(sigma));
            }
            return to_array(out);
        },
        py::arg("noisy"), py::arg("sigma"), "Weighted nuclear norm minimization with noise-level defaults.");

    m.def(
        "denoise",
        [](const RealArray& clean, const std::string& method, double sigma, std::uint64_t seed,
           const std::string& image_name, int iterations, const std::string& variant) {
            RunConfig cfg;
            cfg.method = parse_method(method);
            cfg.sigma = sigma;
            cfg.seed = seed;
            cfg.boost_iterations = iterations;
            cfg.variant = parse_variant(variant);
            cfg.validate();
            const ImageGrid x = to_grid(clean);
            RunOutcome o;
            {
                py::gil_scoped_release release;
                o = run_on_image(x, cfg, image_name);
            }
            return py::make_tuple(to_array(o.noisy), to_array(o.restored.image), o.report.dump());
        },
        py::arg("clean"), py::arg("method"), py::arg("sigma"), py::arg("seed") = 0, py::arg("image_name") = "image",
        py::arg("iterations") = kDefaultBoostIterations, py::arg("variant") = "auto",
        "Noises a clean image, restores it and returns (noisy, restored, report JSON text).");

    m.def("validate_report", &validate_text, py::arg("text"), py::arg("bench") = false,
          "Validation errors of a run (or bench) report; empty when valid.");

    m.def("direction_count", &direction_count, py::arg("level"));
    m.def(
        "qwp2d_block",
        [](const RealArray& x, int level, int j, int l, const std::string& sign, int spline_order) {
            const QwpDecomposition d = qwp2d_analysis(to_grid(x), spline_order, level);
            return to_array(d.level(parse_sign(sign), level).at(j, l));
        },
        py::arg("image"), py::arg("level"), py::arg("j"), py::arg("l"), py::arg("sign") = "+",
        py::arg("spline_order") = kDefaultSplineOrder, "Complex coefficient block (j, l) of one sign.");
    m.def(
        "qwp2d_roundtrip",
        [](const RealArray& x, int level, int spline_order) {
            const QwpDecomposition d = qwp2d_analysis(to_grid(x), spline_order, level);
            return to_array(qwp2d_synthesis(d, level));
        },
        py::arg("image"), py::arg("level"), py::arg("spline_order") = kDefaultSplineOrder,
        "Analysis followed by frame synthesis from one level.");

    m.def("read_image", [](const std::filesystem::path& p) { return to_array(read_image(p)); }, py::arg("path"),
          "Reads a P5 PGM or PNG as gray levels.");
    m.def("write_pgm", [](const std::filesystem::path& p, const RealArray& x) { write_pgm(p, to_grid(x)); },
          py::arg("path"), py::arg("image"), "Writes an 8-bit P5 PGM, rounding and clipping.");
    m.def(
        "read_dump",
        [](const std::filesystem::path& p) -> py::array {
            const DumpContents d = read_dump(p);
            if (d.flags & kDumpComplexFlag) {
                ComplexArray out({d.rows, d.cols});
                std::memcpy(out.mutable_data(), d.samples.data(), d.samples.size() * sizeof(double));
                return out;
            }
            py::array_t<double> out({d.rows, d.cols});
            std::copy(d.samples.begin(), d.samples.end(), out.mutable_data());
            return out;
        },
        py::arg("path"), "Reads a QWP2 dump as a real or complex array.");

    m.attr("NOISE_GENERATOR") = kNoiseGenerator;
}
