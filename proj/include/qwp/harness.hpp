#pragma once

// Experiment plumbing: method dispatch, single runs, benchmark tables and
// the golden reference values.

#include "qwp/crossboost.hpp"
#include "qwp/grid.hpp"
#include "qwp/metrics.hpp"
#include "qwp/qwpdn.hpp"
#include "qwp/wnnm.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qwp {

/// `noised` skips denoising; `crossboost` uses RunConfig::variant.
enum class Method { noised, qwpdn, wnnm, cbwnnm, cbqwp, hybrid, crossboost };

Method parse_method(std::string_view name);
std::string method_name(Method m);

struct RunConfig {
    std::filesystem::path input;
    Method method = Method::qwpdn;
    double sigma = 25.0;
    std::uint64_t seed = 0;
    DenoiseParams qwp;
    /// Unset: WnnmParams::for_sigma of the sigma each WNNM call receives.
    std::optional<WnnmParams> wnnm;
    int boost_iterations = kDefaultBoostIterations;
    Variant variant = Variant::automatic;
    std::filesystem::path out_image;
    std::filesystem::path out_report;

    /// Throws std::invalid_argument.
    void validate() const;
};

struct Restoration {
    ImageGrid image;
    Method method = Method::noised;
    std::optional<Variant> variant;          // resolved cross-boost variant
    std::optional<double> estimated_sigma;   // qwpdn self-estimate, gray levels
    std::vector<double> w_sigmas;            // sigma handed to WNNM, per call
};

/// Runs one method on a noisy image. `image_name` drives the auto variant.
Restoration restore(const ImageGrid& noisy, const RunConfig& cfg, std::string_view image_name);

struct RunOutcome {
    ImageGrid clean;
    ImageGrid noisy;
    Restoration restored;
    MetricReport noisy_metrics;
    MetricReport metrics;
    double seconds = 0.0;
    nlohmann::json report;
};

/// Noise, restoration and metrics for an in-memory clean image.
RunOutcome run_on_image(const ImageGrid& clean, const RunConfig& cfg, std::string_view image_name);

/// Loads cfg.input, runs it, and writes out_image / out_report when set.
RunOutcome run_single(const RunConfig& cfg);

/// Build identifier recorded in reports (git describe at configure time).
std::string build_id();

// ---- golden values ----------------------------------------------------------

struct GoldenEntry {
    std::string image;
    int sigma = 0;
    std::string method;
    double psnr = 0.0;
    double ssim = 0.0;
};

class GoldenTable {
public:
    static GoldenTable load(const std::filesystem::path& csv);
    /// QWP_GOLDEN_CSV if set, else the copy in the source tree.
    static std::filesystem::path default_path();

    std::optional<GoldenEntry> find(std::string_view image, int sigma, std::string_view method) const;
    const std::vector<GoldenEntry>& entries() const { return entries_; }
    /// Image names in first-appearance order, excluding "Average".
    std::vector<std::string> images() const;

private:
    std::vector<GoldenEntry> entries_;
};

/// Golden image name matched by a file stem (case-insensitive substring,
/// longest name wins), if any.
std::optional<std::string> match_golden_image(std::string_view stem, const GoldenTable& golden);

/// Golden method label for a restoration, if tabulated.
std::optional<std::string> golden_method(Method m, std::optional<Variant> resolved);

// ---- benchmark ----------------------------------------------------------------

struct BenchConfig {
    std::filesystem::path images_dir;
    std::vector<double> sigmas{5, 10, 25, 40, 50, 80, 100};
    std::vector<Method> methods{Method::wnnm, Method::cbwnnm, Method::hybrid};
    std::vector<std::uint64_t> seeds{0, 1, 2};
    RunConfig base;  // parameters shared by every cell
    std::filesystem::path golden_csv = GoldenTable::default_path();
};

/// Every (image, sigma, method) cell averaged over seeds, with deltas to the
/// golden values. Throws std::runtime_error listing the expected image names
/// when the directory holds no readable images.
nlohmann::json run_table(const BenchConfig& cfg);

}  // namespace qwp
