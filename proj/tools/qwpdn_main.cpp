#include "qwp/harness.hpp"
#include "qwp/image_io.hpp"
#include "qwp/qwp2d.hpp"
#include "qwp/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace {

struct SharedOptions {
    std::vector<int> levels{2, 3, 4};
    int spline_order = qwp::kDefaultSplineOrder;
    std::vector<int> windows{8};
    std::vector<double> alphas{1.0};
    int margin = -1;
    int iters = qwp::kDefaultBoostIterations;
    std::string variant = "auto";
};

void add_shared(CLI::App* app, SharedOptions& o) {
    app->add_option("--levels", o.levels, "Restoration levels")->delimiter(',')->capture_default_str();
    app->add_option("--spline-order", o.spline_order, "Spline order p")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--win", o.windows, "Neighborhood side W_m, one value or one per level")
        ->delimiter(',')
        ->capture_default_str();
    app->add_option("--alphas", o.alphas, "Level weights, one value or one per level")->delimiter(',')->capture_default_str();
    app->add_option("--margin", o.margin, "Extension margin T in pixels (default N/4)");
    app->add_option("--iters", o.iters, "Cross-boost iterations")->check(CLI::Range(1, 6))->capture_default_str();
    app->add_option("--variant", o.variant, "Cross-boost estimate: cbwnnm, cbqwp, hybrid or auto")
        ->check(CLI::IsMember({"cbwnnm", "cbqwp", "hybrid", "auto"}, CLI::ignore_case))
        ->capture_default_str();
}

qwp::RunConfig base_config(const SharedOptions& o) {
    qwp::RunConfig cfg;
    cfg.qwp.levels = o.levels;
    cfg.qwp.spline_order = o.spline_order;
    cfg.qwp.window_sizes = o.windows;
    cfg.qwp.weights = o.alphas;
    if (o.margin >= 0) cfg.qwp.margin = static_cast<std::size_t>(o.margin);
    cfg.boost_iterations = o.iters;
    cfg.variant = qwp::parse_variant(o.variant);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Directional wavelet-packet and cross-boosted WNNM image denoising"};
    app.require_subcommand(1);

    SharedOptions denoise_opts;
    std::string input, method = "qwpdn", out_image, out_report;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    auto* denoise = app.add_subcommand("denoise", "Add noise to a clean image, restore it and report metrics");
    denoise->add_option("--input", input, "Clean input image (P5 PGM or PNG)")->required()->check(CLI::ExistingFile);
    denoise->add_option("--method", method, "noised, qwpdn, wnnm, cbwnnm, cbqwp, hybrid or crossboost")
        ->check(CLI::IsMember({"noised", "qwpdn", "wnnm", "cbwnnm", "cbqwp", "hybrid", "crossboost"}, CLI::ignore_case))
        ->capture_default_str();
    denoise->add_option("--sigma", sigma, "Noise STD in gray levels")->required()->check(CLI::NonNegativeNumber);
    denoise->add_option("--seed", seed, "Noise seed")->capture_default_str();
    denoise->add_option("--out-image", out_image, "Restored image (8-bit PGM)")->required();
    denoise->add_option("--out-report", out_report, "JSON report")->required();
    add_shared(denoise, denoise_opts);

    SharedOptions bench_opts;
    std::string images_dir, bench_out, golden_csv = qwp::GoldenTable::default_path().string();
    std::vector<double> sigmas{5, 10, 25, 40, 50, 80, 100};
    std::vector<std::string> methods{"wnnm", "cbwnnm", "hybrid"};
    std::vector<std::uint64_t> seeds{0, 1, 2};
    auto* bench = app.add_subcommand("bench", "Run the method x sigma grid over a directory of images");
    bench->add_option("--images", images_dir, "Directory of clean images")->required()->check(CLI::ExistingDirectory);
    bench->add_option("--sigmas", sigmas, "Noise levels")->delimiter(',')->capture_default_str();
    bench->add_option("--methods", methods, "Methods")
        ->delimiter(',')
        ->check(CLI::IsMember({"noised", "qwpdn", "wnnm", "cbwnnm", "cbqwp", "hybrid", "crossboost"}, CLI::ignore_case))
        ->capture_default_str();
    bench->add_option("--seeds", seeds, "Noise seeds averaged per cell")->delimiter(',')->capture_default_str();
    bench->add_option("--golden", golden_csv, "Golden values CSV")->check(CLI::ExistingFile)->capture_default_str();
    bench->add_option("--out", bench_out, "JSON report")->required();
    add_shared(bench, bench_opts);

    std::string dump_input, dump_out, sign = "+";
    int dump_level = 1, dump_order = qwp::kDefaultSplineOrder;
    std::vector<int> band{0, 0};
    bool waveform = false;
    auto* dump = app.add_subcommand("dump", "Write one qWP coefficient block or waveform as a QWP2 file");
    dump->add_option("--input", dump_input, "Square image (omit with --waveform)");
    dump->add_option("--level", dump_level, "Decomposition level m")->check(CLI::PositiveNumber)->capture_default_str();
    dump->add_option("--band", band, "Band j,l")->delimiter(',')->expected(2)->capture_default_str();
    dump->add_option("--sign", sign, "+ or -")->check(CLI::IsMember({"+", "-"}))->capture_default_str();
    dump->add_option("--spline-order", dump_order, "Spline order p")->check(CLI::PositiveNumber)->capture_default_str();
    std::size_t waveform_size = 64;
    dump->add_flag("--waveform", waveform, "Dump the 2D qWP waveform instead of coefficients");
    dump->add_option("--waveform-size", waveform_size, "Waveform side N")->capture_default_str();
    dump->add_option("--out", dump_out, "Output file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (denoise->parsed()) {
            qwp::RunConfig cfg = base_config(denoise_opts);
            cfg.input = input;
            cfg.method = qwp::parse_method(method);
            cfg.sigma = sigma;
            cfg.seed = seed;
            cfg.out_image = out_image;
            cfg.out_report = out_report;
            const qwp::RunOutcome out = qwp::run_single(cfg);
            const auto problems = qwp::validate_run_report(out.report);
            for (const auto& p : problems) std::cerr << "report schema violation: " << p << '\n';
            std::printf("%s sigma=%g seed=%llu: noisy %.2f dB / %.4f -> restored %.2f dB / %.4f (%.1f s)\n",
                        qwp::method_name(cfg.method).c_str(), sigma, static_cast<unsigned long long>(seed),
                        out.noisy_metrics.psnr_db, out.noisy_metrics.ssim, out.metrics.psnr_db, out.metrics.ssim,
                        out.seconds);
            return problems.empty() ? 0 : 1;
        }
        if (bench->parsed()) {
            qwp::BenchConfig cfg;
            cfg.base = base_config(bench_opts);
            cfg.images_dir = images_dir;
            cfg.sigmas = sigmas;
            cfg.methods.clear();
            for (const auto& m : methods) cfg.methods.push_back(qwp::parse_method(m));
            cfg.seeds = seeds;
            cfg.golden_csv = golden_csv;
            const auto doc = qwp::run_table(cfg);
            std::ofstream os(bench_out);
            if (!os) throw std::runtime_error("cannot open report for writing: " + bench_out);
            os << doc.dump(2) << '\n';
            if (!os) throw std::runtime_error("failed writing report: " + bench_out);
            for (const auto& cell : doc["cells"]) {
                std::printf("%-12s sigma=%-5g %-10s %6.2f / %.4f", cell["image"].get<std::string>().c_str(),
                            cell["sigma"].get<double>(), cell["method"].get<std::string>().c_str(),
                            cell["psnr"].get<double>(), cell["ssim"].get<double>());
                if (!cell["delta"].is_null()) {
                    std::printf("  (paper delta %+.2f / %+.4f)", cell["delta"]["psnr"].get<double>(),
                                cell["delta"]["ssim"].get<double>());
                }
                std::printf("\n");
            }
            if (!doc["missing_images"].empty()) std::printf("missing reference images: %s\n", doc["missing_images"].dump().c_str());
            return qwp::validate_bench_report(doc).empty() ? 0 : 1;
        }
        if (dump->parsed()) {
            const qwp::Sign s = sign == "+" ? qwp::Sign::plus : qwp::Sign::minus;
            if (waveform) {
                qwp::write_dump(dump_out, qwp::qwp2d_waveform(dump_order, waveform_size, dump_level, band[0], band[1], s));
            } else {
                if (dump_input.empty()) throw std::invalid_argument("dump: --input is required without --waveform");
                const qwp::ImageGrid x = qwp::read_image(dump_input);
                const auto d = qwp::qwp2d_analysis(x, dump_order, dump_level);
                qwp::write_dump(dump_out, d.level(s, dump_level).at(band[0], band[1]));
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
