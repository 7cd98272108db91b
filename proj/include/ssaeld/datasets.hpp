#pragma once

// Built-in test systems and the JSON system-file format.
//
// System file layout (all powers in MW):
//
//   {
//     "name": "case6",
//     "demand_mw": 1263,
//     "units": [
//       { "p_min": 100, "p_max": 500,
//         "fuels": [ { "a": 240, "b": 7.0, "c": 0.007, "e": 0, "f": 0 } ],
//         "ramp_up": 80, "ramp_down": 120, "p_prev": 440,      (optional, all three or none)
//         "poz": [ [210, 240], [350, 380] ] },                 (optional)
//       ...
//     ],
//     "loss": { "scale": "mw", "b2": [[...]], "b1": [...], "b0": 0.0 }   (optional)
//   }
//
// `e` and `f` default to 0. A loss block with "scale": "per_unit" also needs
// "base_mva"; it is rescaled on load to B2/base, B1, B0*base so that the loss
// comes out in MW for outputs in MW. Unknown keys are rejected.

#include "ssaeld/errors.hpp"
#include "ssaeld/model.hpp"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#ifndef SSAELD_DATA_DIR
#define SSAELD_DATA_DIR "data"
#endif

namespace ssaeld {

inline constexpr std::string_view kBuiltinNames[] = {"case13", "case40", "case10mf", "case6", "case15"};

// ---------------------------------------------------------------------------
// Data directory and loss fixtures
// ---------------------------------------------------------------------------

/// $SSAELD_DATA_DIR if set, otherwise the directory configured at build time.
inline std::filesystem::path data_dir() {
    if (const char* env = std::getenv("SSAELD_DATA_DIR"); env && *env)
        return env;
    return SSAELD_DATA_DIR;
}

namespace detail {

using json = nlohmann::json;

/// Field access with path-qualified diagnostics.
class Reader {
public:
    Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

    const json& node() const { return node_; }
    const std::string& path() const { return path_; }

    [[noreturn]] void fail(const std::string& what) const {
        if (path_.empty() || path_.back() == ':')
            throw ParseError(path_ + (path_.empty() ? "" : " ") + what);
        throw ParseError(path_ + ": " + what);
    }

    void require_object(std::initializer_list<std::string_view> allowed) const {
        if (!node_.is_object())
            fail("expected an object");
        for (const auto& [key, _] : node_.items())
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
                fail("unknown field '" + key + "'");
    }

    bool has(const std::string& key) const { return node_.contains(key); }

    Reader child(const std::string& key) const {
        if (!node_.contains(key))
            fail("missing field '" + key + "'");
        return {node_.at(key), join(key)};
    }

    Reader element(std::size_t i) const { return {node_.at(i), path_ + "[" + std::to_string(i) + "]"}; }

    double number() const {
        if (!node_.is_number())
            fail("expected a number");
        const double x = node_.get<double>();
        if (!std::isfinite(x))
            fail("expected a finite number");
        return x;
    }

    double number(const std::string& key) const { return child(key).number(); }

    double number_or(const std::string& key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    std::string string(const std::string& key) const {
        const auto c = child(key);
        if (!c.node_.is_string())
            c.fail("expected a string");
        return c.node_.get<std::string>();
    }

    std::size_t array_size() const {
        if (!node_.is_array())
            fail("expected an array");
        return node_.size();
    }

    std::vector<double> numbers() const {
        std::vector<double> out(array_size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = element(i).number();
        return out;
    }

private:
    std::string join(const std::string& key) const {
        return path_.empty() || path_.back() == ':' ? path_ + key : path_ + "." + key;
    }

    const json& node_;
    std::string path_;
};

inline json parse_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

/// Reads b2/b1/b0 plus the scale declaration and converts to MW form.
inline LossMatrix read_loss_block(const Reader& r, std::initializer_list<std::string_view> extra_keys = {}) {
    std::vector<std::string_view> keys = {"b2", "b1", "b0", "scale", "base_mva"};
    keys.insert(keys.end(), extra_keys.begin(), extra_keys.end());
    if (!r.node().is_object())
        r.fail("expected an object");
    for (const auto& [key, _] : r.node().items())
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            r.fail("unknown field '" + key + "'");

    const auto b2r = r.child("b2");
    const std::size_t n = b2r.array_size();
    LossMatrix loss;
    loss.n = n;
    loss.b2.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = b2r.element(i).numbers();
        if (row.size() != n)
            b2r.element(i).fail("expected " + std::to_string(n) + " entries");
        loss.b2.insert(loss.b2.end(), row.begin(), row.end());
    }
    loss.b1 = r.child("b1").numbers();
    if (loss.b1.size() != n)
        r.child("b1").fail("expected " + std::to_string(n) + " entries");
    loss.b0 = r.number("b0");

    const std::string scale = r.has("scale") ? r.string("scale") : "mw";
    if (scale == "per_unit") {
        const double base = r.number("base_mva");
        if (!(base > 0.0))
            r.child("base_mva").fail("must be positive");
        for (double& x : loss.b2)
            x /= base;
        loss.b0 *= base;
    } else if (scale == "mw") {
        if (r.has("base_mva"))
            r.fail("'base_mva' only applies to per_unit scale");
    } else {
        r.child("scale").fail("expected \"mw\" or \"per_unit\"");
    }
    return loss;
}

} // namespace detail

/// Loss coefficients for case6 or case15, read from the data directory and
/// checked against a published loss value before being returned.
inline LossMatrix loss_matrix_fixture(std::string_view name) {
    // Published schedule whose reported loss the matrix must reproduce.
    struct Check {
        std::string_view name;
        std::vector<double> schedule;
        double loss;
    };
    static const Check checks[] = {
        {"case6", {447.4970, 173.3221, 263.4745, 139.0594, 165.4761, 87.1280}, 12.9584},
        {"case15",
         {455.0, 380.0, 130.0, 130.0, 170.0, 460.0, 430.0, 71.7526, 58.9090, 160.0, 80.0, 80.0, 25.0, 15.0, 15.0},
         30.6616},
    };
    const auto it = std::find_if(std::begin(checks), std::end(checks), [&](const Check& c) { return c.name == name; });
    if (it == std::end(checks))
        throw ConfigError("no loss fixture named '" + std::string(name) + "'");

    const auto path = data_dir() / "loss" / (std::string(name) + ".json");
    const auto doc = detail::parse_json_file(path);
    const LossMatrix loss = detail::read_loss_block(detail::Reader(doc, path.filename().string()), {"system", "source"});
    validate_loss(loss, it->schedule.size());

    const double got = line_loss(loss, it->schedule);
    if (std::abs(got - it->loss) > 0.05)
        throw ConfigError("loss fixture '" + std::string(name) + "' fails its oracle: " + std::to_string(got) +
                          " MW, expected " + std::to_string(it->loss) + " MW");
    return loss;
}

// ---------------------------------------------------------------------------
// Built-in systems
// ---------------------------------------------------------------------------

namespace detail {

struct VpeRow {
    double p_min, p_max, a, b, c, e, f;
};

inline PowerUnit vpe_unit(const VpeRow& r) {
    return {r.p_min, r.p_max, {{r.a, r.b, r.c, r.e, r.f}}, std::nullopt, {}};
}

struct RampPozRow {
    double p_min, p_max, a, b, c, up, down, prev;
    std::vector<Interval> poz;
};

inline PowerUnit ramp_poz_unit(const RampPozRow& r) {
    return {r.p_min, r.p_max, {{r.a, r.b, r.c, 0.0, 0.0}}, RampLimits{r.up, r.down, r.prev}, r.poz};
}

inline TestSystem case13() {
    static const VpeRow rows[] = {
        {0, 680, 550, 8.1, 0.00028, 300, 0.035},  {0, 360, 309, 8.1, 0.00056, 200, 0.042},
        {0, 360, 307, 8.1, 0.00056, 200, 0.042},  {60, 180, 240, 7.74, 0.00324, 150, 0.063},
        {60, 180, 240, 7.74, 0.00324, 150, 0.063}, {60, 180, 240, 7.74, 0.00324, 150, 0.063},
        {60, 180, 240, 7.74, 0.00324, 150, 0.063}, {60, 180, 240, 7.74, 0.00324, 150, 0.063},
        {60, 180, 240, 7.74, 0.00324, 150, 0.063}, {40, 120, 126, 8.6, 0.00284, 100, 0.084},
        {40, 120, 126, 8.6, 0.00284, 100, 0.084},  {55, 120, 126, 8.6, 0.00284, 100, 0.084},
        {55, 120, 126, 8.6, 0.00284, 100, 0.084},
    };
    TestSystem s{"case13", {}, 1800.0, std::nullopt};
    for (const auto& r : rows)
        s.units.push_back(vpe_unit(r));
    return s;
}

inline TestSystem case40() {
    static const VpeRow rows[] = {
        {36, 114, 94.705, 6.73, 0.0069, 100, 0.084},    {36, 114, 94.705, 6.73, 0.0069, 100, 0.084},
        {60, 120, 309.54, 7.07, 0.02028, 100, 0.084},   {80, 190, 369.03, 8.18, 0.00942, 150, 0.063},
        {47, 97, 148.89, 5.35, 0.01140, 120, 0.077},    {68, 140, 222.33, 8.05, 0.01142, 100, 0.084},
        {110, 300, 287.71, 8.03, 0.00357, 200, 0.042},  {135, 300, 391.98, 6.99, 0.00492, 200, 0.042},
        {135, 300, 455.76, 6.6, 0.00573, 200, 0.042},   {130, 300, 722.82, 12.9, 0.00605, 200, 0.042},
        {94, 375, 635.20, 12.9, 0.00515, 200, 0.042},   {94, 375, 654.69, 12.8, 0.00569, 200, 0.042},
        {125, 500, 913.40, 12.5, 0.00421, 300, 0.035},  {125, 500, 1760.4, 8.84, 0.00752, 300, 0.035},
        {125, 500, 1728.3, 9.15, 0.00708, 300, 0.035},  {125, 500, 1728.3, 9.15, 0.00708, 300, 0.035},
        {220, 500, 647.85, 7.97, 0.00313, 300, 0.035},  {220, 500, 649.69, 7.95, 0.00313, 300, 0.035},
        {242, 550, 647.83, 7.97, 0.00313, 300, 0.035},  {242, 550, 647.81, 7.97, 0.00313, 300, 0.035},
        {254, 550, 785.96, 6.63, 0.00298, 300, 0.035},  {254, 550, 785.96, 6.63, 0.00298, 300, 0.035},
        {254, 550, 794.53, 6.66, 0.00284, 300, 0.035},  {254, 550, 794.53, 6.66, 0.00284, 300, 0.035},
        {254, 550, 801.32, 7.10, 0.00277, 300, 0.035},  {254, 550, 801.32, 7.10, 0.00277, 300, 0.035},
        {10, 150, 1055.1, 3.33, 0.52124, 120, 0.077},   {10, 150, 1055.1, 3.33, 0.52124, 120, 0.077},
        {10, 150, 1055.1, 3.33, 0.52124, 120, 0.077},   {47, 94, 148.89, 5.35, 0.01140, 120, 0.077},
        {60, 190, 222.92, 6.43, 0.00160, 150, 0.063},   {60, 190, 222.92, 6.43, 0.00160, 150, 0.063},
        {60, 190, 222.92, 6.43, 0.00160, 150, 0.063},   {90, 200, 107.87, 8.95, 0.00010, 200, 0.042},
        {90, 200, 116.58, 8.62, 0.00010, 200, 0.042},   {90, 200, 116.58, 8.62, 0.00010, 200, 0.042},
        {25, 110, 307.45, 5.88, 0.01610, 80, 0.098},    {25, 110, 307.45, 5.88, 0.01610, 80, 0.098},
        {25, 110, 307.45, 5.88, 0.01610, 80, 0.098},    {242, 550, 647.83, 7.97, 0.00313, 300, 0.035},
    };
    TestSystem s{"case40", {}, 10500.0, std::nullopt};
    for (const auto& r : rows)
        s.units.push_back(vpe_unit(r));
    return s;
}

inline TestSystem case10mf() {
    struct Row {
        double p_min, p_max;
        std::vector<FuelOption> fuels;
    };
    static const Row rows[] = {
        {100, 250, {{26.97, -0.3975, 0.002176, 0.02697, -3.9750}, {21.13, -0.3059, 0.001861, 0.02113, -3.0590}}},
        {50, 230,
         {{118.4, -1.2690, 0.004194, 0.11840, -12.690},
          {1.865, -0.0399, 0.001138, 0.00187, -0.3988},
          {13.65, -0.1980, 0.001620, 0.01365, -1.9800}}},
        {200, 500,
         {{39.79, -0.3116, 0.001457, 0.03979, -3.1160},
          {-59.14, 0.4864, 0.00001176, -0.05914, 4.8640},
          {-2.876, 0.0339, 0.0008035, -0.00288, 0.3389}}},
        {99, 265,
         {{1.983, -0.0311, 0.001049, 0.00198, -0.3114},
          {52.85, -0.6348, 0.002758, 0.05285, -6.3480},
          {266.8, -2.3380, 0.005935, 0.26680, -23.380}}},
        {190, 490,
         {{13.92, -0.0873, 0.001066, 0.01392, -0.8733},
          {99.76, -0.5206, 0.001597, 0.09976, -5.2060},
          {-53.99, 0.4462, 0.0001498, -0.05399, 4.4620}}},
        {85, 265,
         {{52.15, -0.6348, 0.002758, 0.05285, -6.3480},
          {1.983, -0.0311, 0.001049, 0.00198, -0.3114},
          {266.6, -2.3380, 0.005935, 0.26680, -23.380}}},
        {200, 500,
         {{18.93, -0.1325, 0.001107, 0.01893, -1.3250},
          {43.77, -0.2267, 0.001165, 0.04377, -2.2670},
          {43.35, 0.3559, 0.0002454, -0.04335, 3.5590}}},
        {99, 265,
         {{1.983, -0.0311, 0.001049, 0.00198, -0.3114},
          {52.85, -0.6348, 0.002758, 0.05285, -6.3480},
          {266.8, -2.3380, 0.005935, 0.26680, -23.380}}},
        {130, 440,
         {{88.53, -0.5675, 0.001554, 0.08853, -5.6750},
          {15.32, -0.0451, 0.007033, 0.01423, -0.1817},
          {14.23, -0.0182, 0.0006121, 0.01423, -0.1817}}},
        {200, 490,
         {{13.97, -0.0994, 0.001102, 0.01397, -0.9938},
          {-61.13, 0.5084, 0.00004164, -0.06113, 5.0840},
          {46.71, -0.2024, 0.001137, 0.04671, -2.0240}}},
    };
    TestSystem s{"case10mf", {}, 2700.0, std::nullopt};
    for (const auto& r : rows)
        s.units.push_back({r.p_min, r.p_max, r.fuels, std::nullopt, {}});
    return s;
}

inline TestSystem case6() {
    static const RampPozRow rows[] = {
        {100, 500, 240, 7.0, 0.0070, 80, 120, 440, {{210, 240}, {350, 380}}},
        {50, 200, 200, 10.0, 0.0095, 50, 90, 170, {{90, 110}, {140, 160}}},
        {80, 300, 220, 8.5, 0.0090, 65, 100, 200, {{150, 170}, {210, 240}}},
        {50, 150, 200, 11.0, 0.0090, 50, 90, 150, {{80, 90}, {110, 120}}},
        {50, 200, 220, 10.5, 0.0080, 50, 90, 190, {{90, 110}, {140, 150}}},
        {50, 120, 190, 12.0, 0.0075, 50, 90, 110, {{75, 85}, {100, 105}}},
    };
    TestSystem s{"case6", {}, 1263.0, loss_matrix_fixture("case6")};
    for (const auto& r : rows)
        s.units.push_back(ramp_poz_unit(r));
    return s;
}

inline TestSystem case15() {
    static const RampPozRow rows[] = {
        {150, 455, 671, 10.1, 0.000299, 80, 120, 400, {}},
        {150, 455, 574, 10.2, 0.000183, 80, 120, 300, {{185, 225}, {305, 335}, {420, 450}}},
        {20, 130, 374, 8.80, 0.001126, 130, 130, 105, {}},
        {20, 130, 374, 8.80, 0.001126, 130, 130, 100, {}},
        {150, 470, 461, 10.4, 0.000205, 80, 120, 90, {{180, 200}, {305, 335}, {390, 420}}},
        {135, 460, 630, 10.1, 0.000301, 80, 120, 400, {{230, 255}, {365, 395}, {430, 455}}},
        {135, 465, 548, 9.80, 0.000364, 80, 120, 350, {}},
        {60, 300, 227, 11.2, 0.000338, 65, 100, 95, {}},
        {25, 162, 173, 11.2, 0.000807, 60, 100, 105, {}},
        {25, 160, 175, 10.7, 0.001203, 60, 100, 110, {}},
        {20, 80, 186, 10.2, 0.003586, 80, 80, 60, {}},
        {20, 80, 230, 9.90, 0.005513, 80, 80, 40, {{30, 40}, {55, 65}}},
        {25, 85, 225, 13.1, 0.000371, 80, 80, 30, {}},
        {15, 55, 309, 12.1, 0.001929, 55, 55, 20, {}},
        {15, 55, 323, 12.4, 0.004447, 55, 55, 20, {}},
    };
    TestSystem s{"case15", {}, 2630.0, loss_matrix_fixture("case15")};
    for (const auto& r : rows)
        s.units.push_back(ramp_poz_unit(r));
    return s;
}

} // namespace detail

inline bool is_builtin(std::string_view name) {
    return std::find(std::begin(kBuiltinNames), std::end(kBuiltinNames), name) != std::end(kBuiltinNames);
}

/// One of case13, case40, case10mf, case6, case15, validated.
inline TestSystem builtin_system(std::string_view name) {
    TestSystem s;
    if (name == "case13")
        s = detail::case13();
    else if (name == "case40")
        s = detail::case40();
    else if (name == "case10mf")
        s = detail::case10mf();
    else if (name == "case6")
        s = detail::case6();
    else if (name == "case15")
        s = detail::case15();
    else
        throw ConfigError("unknown system '" + std::string(name) + "'");
    validate(s);
    return s;
}

// ---------------------------------------------------------------------------
// System files
// ---------------------------------------------------------------------------

inline TestSystem parse_system(const nlohmann::json& doc, const std::string& origin = {}) {
    using detail::Reader;
    const Reader root(doc, origin.empty() ? "" : origin + ":");
    root.require_object({"name", "demand_mw", "units", "loss"});

    TestSystem s;
    s.name = root.string("name");
    s.demand = root.number("demand_mw");

    const auto units = root.child("units");
    const std::size_t n = units.array_size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto u = units.element(i);
        u.require_object({"p_min", "p_max", "fuels", "ramp_up", "ramp_down", "p_prev", "poz"});
        PowerUnit unit;
        unit.p_min = u.number("p_min");
        unit.p_max = u.number("p_max");

        const auto fuels = u.child("fuels");
        for (std::size_t k = 0; k < fuels.array_size(); ++k) {
            const auto f = fuels.element(k);
            f.require_object({"a", "b", "c", "e", "f"});
            unit.fuels.push_back({f.number("a"), f.number("b"), f.number("c"), f.number_or("e", 0.0),
                                  f.number_or("f", 0.0)});
        }

        const int ramp_fields = int(u.has("ramp_up")) + int(u.has("ramp_down")) + int(u.has("p_prev"));
        if (ramp_fields == 3)
            unit.ramp = RampLimits{u.number("ramp_up"), u.number("ramp_down"), u.number("p_prev")};
        else if (ramp_fields != 0)
            u.fail("ramp_up, ramp_down and p_prev must be given together");

        if (u.has("poz")) {
            const auto poz = u.child("poz");
            for (std::size_t k = 0; k < poz.array_size(); ++k) {
                const auto pair = poz.element(k).numbers();
                if (pair.size() != 2)
                    poz.element(k).fail("expected [lower, upper]");
                unit.poz.push_back({pair[0], pair[1]});
            }
        }
        s.units.push_back(std::move(unit));
    }

    if (root.has("loss"))
        s.loss = detail::read_loss_block(root.child("loss"));

    validate(s);
    return s;
}

inline TestSystem load_system(const std::filesystem::path& path) {
    return parse_system(detail::parse_json_file(path), path.filename().string());
}

/// JSON document for the system; the loss block is written in MW form.
inline nlohmann::json to_json(const TestSystem& s) {
    using nlohmann::json;
    json units = json::array();
    for (const auto& u : s.units) {
        json fuels = json::array();
        for (const auto& f : u.fuels)
            fuels.push_back({{"a", f.a}, {"b", f.b}, {"c", f.c}, {"e", f.e}, {"f", f.f}});
        json ju = {{"p_min", u.p_min}, {"p_max", u.p_max}, {"fuels", fuels}};
        if (u.ramp) {
            ju["ramp_up"] = u.ramp->up;
            ju["ramp_down"] = u.ramp->down;
            ju["p_prev"] = u.ramp->prev;
        }
        if (!u.poz.empty()) {
            json poz = json::array();
            for (const auto& z : u.poz)
                poz.push_back({z.lo, z.hi});
            ju["poz"] = poz;
        }
        units.push_back(ju);
    }
    json doc = {{"name", s.name}, {"demand_mw", s.demand}, {"units", units}};
    if (s.loss) {
        json b2 = json::array();
        for (std::size_t i = 0; i < s.loss->n; ++i)
            b2.push_back(std::vector<double>(s.loss->b2.begin() + i * s.loss->n,
                                             s.loss->b2.begin() + (i + 1) * s.loss->n));
        doc["loss"] = {{"scale", "mw"}, {"b2", b2}, {"b1", s.loss->b1}, {"b0", s.loss->b0}};
    }
    return doc;
}

inline void save_system(const TestSystem& s, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write '" + path.string() + "'");
    out << to_json(s).dump(2) << '\n';
}

/// A built-in name or a path to a system file.
inline TestSystem resolve_system(const std::string& selector) {
    if (is_builtin(selector))
        return builtin_system(selector);
    if (std::filesystem::exists(selector))
        return load_system(selector);
    throw ConfigError("unknown system '" + selector + "'");
}

} // namespace ssaeld
