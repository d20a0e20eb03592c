#include "qwp/report.hpp"

#include <algorithm>
#include <cstdint>

namespace qwp {

using nlohmann::json;

json to_json(const MetricReport& m) { return {{"psnr", m.psnr_db}, {"ssim", m.ssim}}; }

json to_json(const DenoiseParams& p, std::size_t image_side) {
    json windows = json::array();
    json weights = json::array();
    for (int m : p.levels) {
        windows.push_back(p.window_for(m));
        weights.push_back(p.weight_for(m));
    }
    return {{"spline_order", p.spline_order},
            {"levels", p.levels},
            {"window_sizes", windows},
            {"weights", weights},
            {"margin", p.margin_for(image_side)},
            {"deepest_level", p.deepest_level()},
            {"shrink", p.shrink}};
}

json to_json(const WnnmParams& p) {
    return {{"patch_side", p.patch_side},
            {"search_radius", p.search_radius},
            {"patches", p.patches},
            {"step", p.step},
            {"c", p.c},
            {"eps", p.eps},
            {"iterations", p.iterations},
            {"delta", p.delta},
            {"gamma", p.gamma},
            {"rule", p.rule == WnnmRule::soft ? "soft" : "reweighted"},
            {"centering", p.centering == PatchCentering::mean_patch ? "mean_patch" : "patch_mean"}};
}

namespace {

class Checker {
public:
    std::vector<std::string> errors;

    const json* field(const json& obj, const std::string& path, const std::string& key) {
        if (!obj.is_object()) {
            fail(path, "expected an object");
            return nullptr;
        }
        auto it = obj.find(key);
        if (it == obj.end()) {
            fail(join(path, key), "missing");
            return nullptr;
        }
        return &*it;
    }

    const json* object(const json& obj, const std::string& path, const std::string& key) {
        const json* v = field(obj, path, key);
        if (v && !v->is_object()) {
            fail(join(path, key), "expected an object");
            return nullptr;
        }
        return v;
    }

    void string(const json& obj, const std::string& path, const std::string& key, bool nullable = false) {
        const json* v = field(obj, path, key);
        if (v && !(v->is_string() || (nullable && v->is_null()))) fail(join(path, key), "expected a string");
    }

    void constant(const json& obj, const std::string& path, const std::string& key, const json& expected) {
        const json* v = field(obj, path, key);
        if (v && *v != expected) fail(join(path, key), "expected " + expected.dump());
    }

    void one_of(const json& obj, const std::string& path, const std::string& key,
                const std::vector<std::string>& allowed, bool nullable = false) {
        const json* v = field(obj, path, key);
        if (!v) return;
        if (nullable && v->is_null()) return;
        if (!v->is_string() ||
            std::find(allowed.begin(), allowed.end(), v->get<std::string>()) == allowed.end()) {
            fail(join(path, key), "unexpected value " + v->dump());
        }
    }

    void number(const json& obj, const std::string& path, const std::string& key, double lo, double hi,
                bool nullable = false) {
        const json* v = field(obj, path, key);
        if (!v) return;
        if (nullable && v->is_null()) return;
        if (!v->is_number()) {
            fail(join(path, key), "expected a number");
            return;
        }
        const double d = v->get<double>();
        if (!(d >= lo && d <= hi)) fail(join(path, key), "out of range");
    }

    void integer(const json& obj, const std::string& path, const std::string& key, bool non_negative = true,
                 bool nullable = false) {
        const json* v = field(obj, path, key);
        if (!v) return;
        if (nullable && v->is_null()) return;
        if (!v->is_number_integer() || (non_negative && !v->is_number_unsigned() && v->get<std::int64_t>() < 0)) {
            fail(join(path, key), non_negative ? "expected a non-negative integer" : "expected an integer");
        }
    }

    void boolean(const json& obj, const std::string& path, const std::string& key) {
        const json* v = field(obj, path, key);
        if (v && !v->is_boolean()) fail(join(path, key), "expected a boolean");
    }

    const json* array(const json& obj, const std::string& path, const std::string& key) {
        const json* v = field(obj, path, key);
        if (v && !v->is_array()) {
            fail(join(path, key), "expected an array");
            return nullptr;
        }
        return v;
    }

    void metric(const json& obj, const std::string& path, const std::string& key) {
        const json* m = object(obj, path, key);
        if (!m) return;
        const std::string p = join(path, key);
        number(*m, p, "psnr", 0.0, 400.0);
        number(*m, p, "ssim", -1.0, 1.0);
    }

    void qwpdn_params(const json& obj, const std::string& path, const std::string& key) {
        const json* q = object(obj, path, key);
        if (!q) return;
        const std::string p = join(path, key);
        integer(*q, p, "spline_order");
        array(*q, p, "levels");
        array(*q, p, "window_sizes");
        array(*q, p, "weights");
        integer(*q, p, "margin", true, true);
        integer(*q, p, "deepest_level");
        boolean(*q, p, "shrink");
    }

    void wnnm_params(const json& obj, const std::string& path, const std::string& key) {
        const json* w = field(obj, path, key);
        if (!w || w->is_null()) return;
        if (!w->is_object()) {
            fail(join(path, key), "expected an object or null");
            return;
        }
        const std::string p = join(path, key);
        for (const char* k : {"patch_side", "search_radius", "patches", "step", "iterations"}) integer(*w, p, k);
        for (const char* k : {"c", "eps", "delta", "gamma"}) number(*w, p, k, 0.0, 1e300);
        one_of(*w, p, "rule", {"soft", "reweighted"});
        one_of(*w, p, "centering", {"mean_patch", "patch_mean"});
    }

    void fail(const std::string& path, const std::string& what) { errors.push_back(path + ": " + what); }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }
};

const std::vector<std::string> kMethods{"noised", "qwpdn", "wnnm", "cbwnnm", "cbqwp", "hybrid", "crossboost"};
const std::vector<std::string> kVariants{"cbwnnm", "cbqwp", "hybrid"};

}  // namespace

std::vector<std::string> validate_run_report(const json& doc) {
    Checker c;
    if (!doc.is_object()) return {"document: expected an object"};
    c.constant(doc, "", "schema", kRunReportSchema);
    c.constant(doc, "", "schema_version", kReportSchemaVersion);
    c.string(doc, "", "build");
    if (const json* in = c.object(doc, "", "input")) {
        c.string(*in, "input", "path");
        c.string(*in, "input", "name");
        c.integer(*in, "input", "rows");
        c.integer(*in, "input", "cols");
    }
    c.one_of(doc, "", "method", kMethods);
    c.one_of(doc, "", "variant", kVariants, true);
    c.number(doc, "", "sigma", 0.0, 1e6);
    c.integer(doc, "", "seed");
    if (const json* n = c.object(doc, "", "noise")) {
        c.string(*n, "noise", "generator");
        c.integer(*n, "noise", "version");
        c.boolean(*n, "noise", "clipped");
    }
    if (const json* p = c.object(doc, "", "parameters")) {
        c.qwpdn_params(*p, "parameters", "qwpdn");
        c.wnnm_params(*p, "parameters", "wnnm");
        c.boolean(*p, "parameters", "wnnm_per_call_defaults");
        if (const json* b = c.object(*p, "parameters", "crossboost")) {
            c.integer(*b, "parameters.crossboost", "iterations");
            c.number(*b, "parameters.crossboost", "sigma_decay", 0.0, 1.0);
            if (const json* s = c.array(*b, "parameters.crossboost", "w_sigmas")) {
                for (const auto& v : *s) {
                    if (!v.is_number()) c.fail("parameters.crossboost.w_sigmas", "expected numbers");
                }
            }
        }
    }
    if (const json* m = c.object(doc, "", "metrics")) {
        c.metric(*m, "metrics", "noisy");
        c.metric(*m, "metrics", "restored");
    }
    c.number(doc, "", "estimated_sigma", 0.0, 1e6, true);
    if (const json* t = c.object(doc, "", "timing")) c.number(*t, "timing", "seconds", 0.0, 1e9);
    if (const json* o = c.object(doc, "", "outputs")) {
        c.string(*o, "outputs", "image", true);
        c.string(*o, "outputs", "report", true);
    }
    return c.errors;
}

std::vector<std::string> validate_bench_report(const json& doc) {
    Checker c;
    if (!doc.is_object()) return {"document: expected an object"};
    c.constant(doc, "", "schema", kBenchReportSchema);
    c.constant(doc, "", "schema_version", kReportSchemaVersion);
    c.string(doc, "", "build");
    if (const json* cfg = c.object(doc, "", "config")) {
        c.string(*cfg, "config", "images_dir");
        c.array(*cfg, "config", "sigmas");
        c.array(*cfg, "config", "methods");
        c.array(*cfg, "config", "seeds");
        if (const json* p = c.object(*cfg, "config", "parameters")) {
            c.qwpdn_params(*p, "config.parameters", "qwpdn");
            c.wnnm_params(*p, "config.parameters", "wnnm");
        }
    }
    if (const json* n = c.object(doc, "", "noise")) {
        c.string(*n, "noise", "generator");
        c.integer(*n, "noise", "version");
    }
    if (const json* imgs = c.array(doc, "", "images")) {
        for (std::size_t i = 0; i < imgs->size(); ++i) {
            const std::string p = "images[" + std::to_string(i) + "]";
            c.string((*imgs)[i], p, "name");
            c.string((*imgs)[i], p, "file");
            c.string((*imgs)[i], p, "golden_name", true);
        }
    }
    c.array(doc, "", "missing_images");
    if (const json* cells = c.array(doc, "", "cells")) {
        for (std::size_t i = 0; i < cells->size(); ++i) {
            const json& cell = (*cells)[i];
            const std::string p = "cells[" + std::to_string(i) + "]";
            c.string(cell, p, "image");
            c.number(cell, p, "sigma", 0.0, 1e6);
            c.one_of(cell, p, "method", kMethods);
            c.one_of(cell, p, "variant", kVariants, true);
            c.number(cell, p, "psnr", 0.0, 400.0);
            c.number(cell, p, "ssim", -1.0, 1.0);
            if (const json* runs = c.array(cell, p, "runs")) {
                for (std::size_t r = 0; r < runs->size(); ++r) {
                    const std::string rp = p + ".runs[" + std::to_string(r) + "]";
                    c.integer((*runs)[r], rp, "seed");
                    c.number((*runs)[r], rp, "psnr", 0.0, 400.0);
                    c.number((*runs)[r], rp, "ssim", -1.0, 1.0);
                    c.number((*runs)[r], rp, "seconds", 0.0, 1e9);
                }
            }
            for (const char* k : {"golden", "delta"}) {
                const json* g = c.field(cell, p, k);
                if (g && !g->is_null()) {
                    c.number(*g, p + "." + k, "psnr", -400.0, 400.0);
                    c.number(*g, p + "." + k, "ssim", -2.0, 2.0);
                }
            }
        }
    }
    c.object(doc, "", "tables");
    if (const json* t = c.object(doc, "", "timing")) c.number(*t, "timing", "seconds", 0.0, 1e9);
    return c.errors;
}

}  // namespace qwp
