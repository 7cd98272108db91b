#include "ssaeld/datasets.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

using namespace ssaeld;
using nlohmann::json;

namespace {

json manifest() { return detail::parse_json_file(data_dir() / "manifest.json"); }

struct Totals {
    double p_min = 0, p_max = 0, a = 0, b = 0, c = 0, e = 0, f = 0;
    double up = 0, down = 0, prev = 0, poz_edges = 0;
    std::size_t fuel_rows = 0, poz = 0;
};

Totals totals(const TestSystem& s) {
    Totals t;
    for (const auto& u : s.units) {
        t.p_min += u.p_min;
        t.p_max += u.p_max;
        for (const auto& f : u.fuels) {
            t.a += f.a;
            t.b += f.b;
            t.c += f.c;
            t.e += f.e;
            t.f += f.f;
            ++t.fuel_rows;
        }
        if (u.ramp) {
            t.up += u.ramp->up;
            t.down += u.ramp->down;
            t.prev += u.ramp->prev;
        }
        for (const auto& z : u.poz) {
            t.poz_edges += z.lo + z.hi;
            ++t.poz;
        }
    }
    return t;
}

class TempDir {
public:
    TempDir() : path_(std::filesystem::temp_directory_path() / ("ssaeld-test-" + std::to_string(::getpid()))) {
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    std::filesystem::path file(const std::string& name, const std::string& text) const {
        const auto p = path_ / name;
        std::ofstream(p) << text;
        return p;
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

json small_system() {
    return json::parse(R"({
      "name": "small", "demand_mw": 150,
      "units": [
        {"p_min": 10, "p_max": 100, "fuels": [{"a": 100, "b": 2, "c": 0.01}], "poz": [[40, 50]]},
        {"p_min": 10, "p_max": 120, "fuels": [{"a": 90, "b": 2.2, "c": 0.012, "e": 5, "f": 0.1}],
         "ramp_up": 30, "ramp_down": 40, "p_prev": 80}
      ],
      "loss": {"scale": "per_unit", "base_mva": 100,
               "b2": [[0.01, 0.002], [0.002, 0.02]], "b1": [0.001, -0.002], "b0": 0.0004}
    })");
}

} // namespace

TEST(Builtins, MatchManifestTotals) {
    const json m = manifest();
    for (auto name : kBuiltinNames) {
        SCOPED_TRACE(std::string(name));
        const auto sys = builtin_system(name);
        const auto& want = m.at(std::string(name));
        const Totals t = totals(sys);
        EXPECT_EQ(sys.size(), want.at("units").get<std::size_t>());
        auto near = [&](const char* key, double got) {
            if (want.contains(key)) {
                EXPECT_NEAR(got, want.at(key).get<double>(), 1e-6 * std::max(1.0, std::abs(got))) << key;
            }
        };
        near("sum_p_min", t.p_min);
        near("sum_p_max", t.p_max);
        near("sum_a", t.a);
        near("sum_b", t.b);
        near("sum_c", t.c);
        near("sum_e", t.e);
        near("sum_f", t.f);
        near("sum_ramp_up", t.up);
        near("sum_ramp_down", t.down);
        near("sum_p_prev", t.prev);
        near("sum_poz_edges", t.poz_edges);
        if (want.contains("fuel_rows")) {
            EXPECT_EQ(t.fuel_rows, want.at("fuel_rows").get<std::size_t>());
        }
        if (want.contains("poz_count")) {
            EXPECT_EQ(t.poz, want.at("poz_count").get<std::size_t>());
        }
    }
}

TEST(Builtins, DemandsAndLoss) {
    EXPECT_EQ(builtin_system("case13").demand, 1800);
    EXPECT_EQ(builtin_system("case40").demand, 10500);
    EXPECT_EQ(builtin_system("case10mf").demand, 2700);
    EXPECT_EQ(builtin_system("case6").demand, 1263);
    EXPECT_EQ(builtin_system("case15").demand, 2630);
    EXPECT_FALSE(builtin_system("case13").loss);
    EXPECT_TRUE(builtin_system("case6").loss);
    EXPECT_TRUE(builtin_system("case15").loss);
}

TEST(Builtins, UnknownName) {
    EXPECT_FALSE(is_builtin("case7"));
    EXPECT_THROW(builtin_system("case7"), ConfigError);
    EXPECT_THROW(resolve_system("no-such-system"), ConfigError);
}

TEST(LossFixtures, ReproduceReportedLosses) {
    const auto six = loss_matrix_fixture("case6");
    EXPECT_EQ(six.n, 6u);
    EXPECT_NEAR(line_loss(six, Schedule{447.4970, 173.3221, 263.4745, 139.0594, 165.4761, 87.1280}), 12.9584, 1e-3);
    EXPECT_NEAR(line_loss(six, Schedule{446.9600, 173.3944, 262.3436, 139.5120, 164.7089, 89.0162}), 12.9351, 5e-3);

    const auto fifteen = loss_matrix_fixture("case15");
    EXPECT_EQ(fifteen.n, 15u);
    EXPECT_NEAR(line_loss(fifteen, Schedule{455, 380, 130, 130, 170, 460, 430, 71.7526, 58.9090, 160, 80, 80, 25, 15, 15}),
                30.6616, 1e-3);
    EXPECT_EQ(*builtin_system("case15").loss, fifteen);
    EXPECT_THROW(loss_matrix_fixture("case13"), ConfigError);
}

TEST(LossFixtures, PerUnitRescaling) {
    const auto sys = parse_system(small_system());
    const auto& l = *sys.loss;
    EXPECT_DOUBLE_EQ(l.at(0, 0), 0.01 / 100);
    EXPECT_DOUBLE_EQ(l.at(0, 1), 0.002 / 100);
    EXPECT_DOUBLE_EQ(l.b1[1], -0.002);
    EXPECT_DOUBLE_EQ(l.b0, 0.04);
    // Same loss as evaluating the per-unit form on per-unit outputs.
    const double p0 = 0.6, p1 = 0.8;
    const double pu = 0.01 * p0 * p0 + 2 * 0.002 * p0 * p1 + 0.02 * p1 * p1 + 0.001 * p0 - 0.002 * p1 + 0.0004;
    EXPECT_NEAR(line_loss(l, Schedule{60, 80}), 100 * pu, 1e-12);
}

TEST(SystemFiles, RoundTrip) {
    TempDir dir;
    for (auto name : kBuiltinNames) {
        const auto sys = builtin_system(name);
        const auto path = dir.path() / (std::string(name) + ".json");
        save_system(sys, path);
        EXPECT_EQ(load_system(path), sys) << name;
        EXPECT_EQ(resolve_system(path.string()), sys) << name;
    }
    const auto small = parse_system(small_system());
    EXPECT_EQ(parse_system(to_json(small)), small);
}

TEST(SystemFiles, OptionalFieldsDefault) {
    const auto sys = parse_system(small_system());
    EXPECT_EQ(sys.units[0].fuels[0].e, 0.0);
    EXPECT_FALSE(sys.units[0].ramp);
    EXPECT_EQ(sys.units[1].ramp, (RampLimits{30, 40, 80}));
    EXPECT_EQ(sys.units[0].poz, (std::vector<Interval>{{40, 50}}));
}

TEST(SystemFiles, RejectsOverlappingZones) {
    auto doc = small_system();
    doc["units"][0]["poz"] = json::parse("[[40, 60], [55, 70]]");
    try {
        parse_system(doc);
        FAIL();
    } catch (const ModelError& e) {
        EXPECT_EQ(e.rule(), "unit.poz");
    }
}

TEST(SystemFiles, RejectsAsymmetricMatrix) {
    auto doc = small_system();
    doc["loss"]["b2"] = json::parse("[[0.01, 0.002], [0.003, 0.02]]");
    try {
        parse_system(doc);
        FAIL();
    } catch (const ModelError& e) {
        EXPECT_EQ(e.rule(), "loss.symmetry");
    }
}

TEST(SystemFiles, RejectsMalformedDocuments) {
    auto expect_parse_error = [](json doc, const std::string& fragment) {
        try {
            parse_system(doc, "f.json");
            ADD_FAILURE() << "accepted document missing " << fragment;
        } catch (const ParseError& e) {
            EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
        }
    };
    auto doc = small_system();
    doc["colour"] = "red";
    expect_parse_error(doc, "colour");

    doc = small_system();
    doc["units"][1].erase("p_prev");
    expect_parse_error(doc, "units[1]");

    doc = small_system();
    doc["units"][0]["fuels"][0].erase("b");
    expect_parse_error(doc, "b");

    doc = small_system();
    doc["demand_mw"] = "lots";
    expect_parse_error(doc, "demand_mw");

    doc = small_system();
    doc["loss"].erase("base_mva");
    expect_parse_error(doc, "base_mva");

    doc = small_system();
    doc["units"][0]["poz"] = json::parse("[[40]]");
    expect_parse_error(doc, "poz[0]");
}

TEST(SystemFiles, UnreadableFiles) {
    TempDir dir;
    EXPECT_THROW(load_system(dir.path() / "missing.json"), Error);
    EXPECT_THROW(load_system(dir.file("bad.json", "{ not json")), ParseError);
}
