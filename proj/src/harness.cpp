#include "qwp/harness.hpp"

#include "qwp/image_io.hpp"
#include "qwp/noise.hpp"
#include "qwp/report.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#ifndef QWP_BUILD_ID
#define QWP_BUILD_ID "unknown"
#endif
#ifndef QWP_DATA_DIR
#define QWP_DATA_DIR "data"
#endif

namespace qwp {

using nlohmann::json;

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::string sigma_key(double sigma) {
    std::ostringstream os;
    os << sigma;
    return os.str();
}

WnnmParams wnnm_for(const RunConfig& cfg, double sigma) {
    return cfg.wnnm ? *cfg.wnnm : WnnmParams::for_sigma(sigma);
}

json parameter_ledger(const RunConfig& cfg, std::size_t side, const std::vector<double>& w_sigmas) {
    return {{"qwpdn", to_json(cfg.qwp, side)},
            {"wnnm", to_json(wnnm_for(cfg, cfg.sigma))},
            {"wnnm_per_call_defaults", !cfg.wnnm.has_value()},
            {"crossboost",
             {{"iterations", cfg.boost_iterations}, {"sigma_decay", kSigmaDecay}, {"w_sigmas", w_sigmas}}}};
}

}  // namespace

Method parse_method(std::string_view name) {
    const std::string s = lower(name);
    if (s == "noised") return Method::noised;
    if (s == "qwpdn") return Method::qwpdn;
    if (s == "wnnm") return Method::wnnm;
    if (s == "cbwnnm") return Method::cbwnnm;
    if (s == "cbqwp") return Method::cbqwp;
    if (s == "hybrid") return Method::hybrid;
    if (s == "crossboost") return Method::crossboost;
    throw std::invalid_argument("unknown method: " + std::string(name));
}

std::string method_name(Method m) {
    switch (m) {
        case Method::noised: return "noised";
        case Method::qwpdn: return "qwpdn";
        case Method::wnnm: return "wnnm";
        case Method::cbwnnm: return "cbwnnm";
        case Method::cbqwp: return "cbqwp";
        case Method::hybrid: return "hybrid";
        case Method::crossboost: return "crossboost";
    }
    return "unknown";
}

void RunConfig::validate() const {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be a non-negative number");
    if (boost_iterations < 1 || boost_iterations > 6) {
        throw std::invalid_argument("boost iterations must be in 1..6");
    }
    if (wnnm) wnnm->validate();
    const bool needs_sigma = method == Method::wnnm || method == Method::cbwnnm || method == Method::cbqwp ||
                             method == Method::hybrid || method == Method::crossboost;
    if (needs_sigma && sigma == 0.0) throw std::invalid_argument(method_name(method) + " requires sigma > 0");
}

std::string build_id() { return QWP_BUILD_ID; }

Restoration restore(const ImageGrid& noisy, const RunConfig& cfg, std::string_view image_name) {
    Restoration r;
    r.method = cfg.method;
    auto w_op = [&cfg, &r](const ImageGrid& x, double sigma) {
        r.w_sigmas.push_back(sigma);
        return wnnm_denoise(x, sigma, wnnm_for(cfg, sigma));
    };
    switch (cfg.method) {
        case Method::noised:
            r.image = noisy;
            return r;
        case Method::qwpdn: {
            QwpdnResult q = qwpdn_detailed(noisy, cfg.qwp);
            r.image = std::move(q.image);
            r.estimated_sigma = q.estimated_sigma;
            return r;
        }
        case Method::wnnm:
            r.image = w_op(noisy, cfg.sigma);
            return r;
        case Method::cbwnnm:
        case Method::cbqwp:
        case Method::hybrid:
        case Method::crossboost: {
            Variant v = Variant::hybrid;
            if (cfg.method == Method::cbwnnm) v = Variant::cbwnnm;
            if (cfg.method == Method::cbqwp) v = Variant::cbqwp;
            if (cfg.method == Method::crossboost) v = resolve_variant(cfg.variant, image_name);
            const BoostState s =
                run_crossboost(noisy, cfg.sigma, cfg.boost_iterations, make_q_operator(cfg.qwp), w_op);
            r.image = final_estimate(s.yq, s.yw, v);
            r.variant = v;
            return r;
        }
    }
    throw std::invalid_argument("restore: unhandled method");
}

RunOutcome run_on_image(const ImageGrid& clean, const RunConfig& cfg, std::string_view image_name) {
    cfg.validate();
    RunOutcome out;
    out.clean = clean;
    out.noisy = add_gaussian_noise(clean, cfg.sigma, cfg.seed);
    const auto start = std::chrono::steady_clock::now();
    out.restored = restore(out.noisy, cfg, image_name);
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.noisy_metrics = evaluate(clean, out.noisy);
    out.metrics = evaluate(clean, out.restored.image);

    json report;
    report["schema"] = kRunReportSchema;
    report["schema_version"] = kReportSchemaVersion;
    report["build"] = build_id();
    report["input"] = {{"path", cfg.input.string()},
                       {"name", std::string(image_name)},
                       {"rows", clean.rows()},
                       {"cols", clean.cols()}};
    report["method"] = method_name(cfg.method);
    report["variant"] = out.restored.variant ? json(variant_name(*out.restored.variant)) : json(nullptr);
    report["sigma"] = cfg.sigma;
    report["seed"] = cfg.seed;
    report["noise"] = {{"generator", kNoiseGenerator}, {"version", kNoiseGeneratorVersion}, {"clipped", false}};
    report["parameters"] = parameter_ledger(cfg, clean.rows(), out.restored.w_sigmas);
    report["metrics"] = {{"noisy", to_json(out.noisy_metrics)}, {"restored", to_json(out.metrics)}};
    report["estimated_sigma"] =
        out.restored.estimated_sigma ? json(*out.restored.estimated_sigma) : json(nullptr);
    report["timing"] = {{"seconds", out.seconds}};
    report["outputs"] = {
        {"image", cfg.out_image.empty() ? json(nullptr) : json(cfg.out_image.string())},
        {"report", cfg.out_report.empty() ? json(nullptr) : json(cfg.out_report.string())}};
    out.report = std::move(report);
    return out;
}

RunOutcome run_single(const RunConfig& cfg) {
    cfg.validate();
    const ImageGrid clean = read_image(cfg.input);
    RunOutcome out = run_on_image(clean, cfg, cfg.input.stem().string());
    if (!cfg.out_image.empty()) write_pgm(cfg.out_image, out.restored.image);
    if (!cfg.out_report.empty()) {
        std::ofstream os(cfg.out_report);
        if (!os) throw std::runtime_error("cannot open report for writing: " + cfg.out_report.string());
        os << out.report.dump(2) << '\n';
        if (!os) throw std::runtime_error("failed writing report: " + cfg.out_report.string());
    }
    return out;
}

// ---- golden values ----------------------------------------------------------

GoldenTable GoldenTable::load(const std::filesystem::path& csv) {
    std::ifstream is(csv);
    if (!is) throw std::runtime_error("cannot open golden table: " + csv.string());
    GoldenTable table;
    std::string line;
    std::getline(is, line);
    if (line.rfind("image,sigma,method,psnr,ssim", 0) != 0) {
        throw std::runtime_error("unexpected golden table header: " + csv.string());
    }
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != 5) {
            throw std::runtime_error("malformed golden row " + std::to_string(line_no) + ": " + csv.string());
        }
        table.entries_.push_back({fields[0], std::stoi(fields[1]), fields[2], std::stod(fields[3]), std::stod(fields[4])});
    }
    return table;
}

std::filesystem::path GoldenTable::default_path() {
    if (const char* env = std::getenv("QWP_GOLDEN_CSV"); env && *env) return env;
    return std::filesystem::path(QWP_DATA_DIR) / "golden_tables.csv";
}

std::optional<GoldenEntry> GoldenTable::find(std::string_view image, int sigma, std::string_view method) const {
    const std::string img = lower(image);
    const std::string meth = lower(method);
    for (const auto& e : entries_) {
        if (e.sigma == sigma && lower(e.image) == img && lower(e.method) == meth) return e;
    }
    return std::nullopt;
}

std::vector<std::string> GoldenTable::images() const {
    std::vector<std::string> names;
    for (const auto& e : entries_) {
        if (e.image == "Average") continue;
        if (std::find(names.begin(), names.end(), e.image) == names.end()) names.push_back(e.image);
    }
    return names;
}

std::optional<std::string> match_golden_image(std::string_view stem, const GoldenTable& golden) {
    const std::string s = lower(stem);
    std::optional<std::string> best;
    for (const auto& name : golden.images()) {
        if (s.find(lower(name)) != std::string::npos && (!best || name.size() > best->size())) best = name;
    }
    return best;
}

std::optional<std::string> golden_method(Method m, std::optional<Variant> resolved) {
    switch (m) {
        case Method::noised:
        case Method::wnnm:
        case Method::cbwnnm:
        case Method::cbqwp:
        case Method::hybrid: return method_name(m);
        case Method::crossboost:
            if (resolved) return variant_name(*resolved);
            return std::nullopt;
        case Method::qwpdn: return std::nullopt;
    }
    return std::nullopt;
}

// ---- benchmark ----------------------------------------------------------------

json run_table(const BenchConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const GoldenTable golden = GoldenTable::load(cfg.golden_csv);

    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(cfg.images_dir)) {
        for (const auto& entry : std::filesystem::directory_iterator(cfg.images_dir)) {
            if (entry.is_regular_file() && is_supported_image(entry.path())) files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::string expected;
        for (const auto& name : golden.images()) expected += (expected.empty() ? "" : ", ") + name;
        throw std::runtime_error("no benchmark images (.pgm/.png) found in " + cfg.images_dir.string() +
                                 "; expected images named after: " + expected);
    }

    json images = json::array();
    std::vector<std::string> found;
    for (const auto& f : files) {
        const auto g = match_golden_image(f.stem().string(), golden);
        images.push_back({{"name", f.stem().string()}, {"file", f.string()}, {"golden_name", g ? json(*g) : json(nullptr)}});
        if (g) found.push_back(*g);
    }
    json missing = json::array();
    for (const auto& name : golden.images()) {
        if (std::find(found.begin(), found.end(), name) == found.end()) missing.push_back(name);
    }

    json cells = json::array();
    json tables = json::object();
    for (std::size_t fi = 0; fi < files.size(); ++fi) {
        const ImageGrid clean = read_image(files[fi]);
        const std::string name = files[fi].stem().string();
        const auto golden_name = match_golden_image(name, golden);
        for (double sigma : cfg.sigmas) {
            for (Method method : cfg.methods) {
                RunConfig rc = cfg.base;
                rc.input = files[fi];
                rc.method = method;
                rc.sigma = sigma;
                json runs = json::array();
                double psnr_sum = 0.0;
                double ssim_sum = 0.0;
                std::optional<Variant> variant;
                for (std::uint64_t seed : cfg.seeds) {
                    rc.seed = seed;
                    const RunOutcome out = run_on_image(clean, rc, name);
                    variant = out.restored.variant;
                    runs.push_back({{"seed", seed},
                                    {"psnr", out.metrics.psnr_db},
                                    {"ssim", out.metrics.ssim},
                                    {"seconds", out.seconds}});
                    psnr_sum += out.metrics.psnr_db;
                    ssim_sum += out.metrics.ssim;
                }
                const auto count = static_cast<double>(cfg.seeds.size());
                const double psnr_mean = psnr_sum / count;
                const double ssim_mean = ssim_sum / count;
                json gold = nullptr;
                json delta = nullptr;
                const auto gm = golden_method(method, variant);
                const double rounded = std::round(sigma);
                if (golden_name && gm && rounded == sigma) {
                    if (const auto e = golden.find(*golden_name, static_cast<int>(rounded), *gm)) {
                        gold = {{"psnr", e->psnr}, {"ssim", e->ssim}};
                        delta = {{"psnr", psnr_mean - e->psnr}, {"ssim", ssim_mean - e->ssim}};
                    }
                }
                cells.push_back({{"image", name},
                                 {"sigma", sigma},
                                 {"method", method_name(method)},
                                 {"variant", variant ? json(variant_name(*variant)) : json(nullptr)},
                                 {"psnr", psnr_mean},
                                 {"ssim", ssim_mean},
                                 {"runs", runs},
                                 {"golden", gold},
                                 {"delta", delta}});
                tables[name][method_name(method)][sigma_key(sigma)] = {{"psnr", psnr_mean}, {"ssim", ssim_mean}, {"golden", gold}};
            }
        }
    }

    json methods = json::array();
    for (Method m : cfg.methods) methods.push_back(method_name(m));
    json params = parameter_ledger(cfg.base, 512, {});
    params["wnnm"] = cfg.base.wnnm ? to_json(*cfg.base.wnnm) : json(nullptr);
    params["qwpdn"]["margin"] = cfg.base.qwp.margin ? json(*cfg.base.qwp.margin) : json(nullptr);
    params["crossboost"]["variant"] = variant_name(cfg.base.variant);
    params["crossboost"].erase("w_sigmas");

    json doc;
    doc["schema"] = kBenchReportSchema;
    doc["schema_version"] = kReportSchemaVersion;
    doc["build"] = build_id();
    doc["config"] = {{"images_dir", cfg.images_dir.string()},
                     {"sigmas", cfg.sigmas},
                     {"methods", methods},
                     {"seeds", cfg.seeds},
                     {"parameters", params}};
    doc["noise"] = {{"generator", kNoiseGenerator}, {"version", kNoiseGeneratorVersion}};
    doc["images"] = images;
    doc["missing_images"] = missing;
    doc["cells"] = cells;
    doc["tables"] = tables;
    doc["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    return doc;
}

}  // namespace qwp
