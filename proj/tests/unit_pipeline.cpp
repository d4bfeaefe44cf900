// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "dotspin/pipeline.hpp"

using namespace dotspin;
using namespace dotspin::pipeline;
namespace fs = std::filesystem;

namespace {
const std::string kData = std::string(DOTSPIN_SOURCE_DIR) + "/data/";

RunConfig smoke_config(const std::string& outdir) {
    RunConfig c;
    c.database_path = kData + "physdb.json";
    c.parameter_set_path = kData + "tb_desk_s.json";
    c.output_dir = outdir;
    c.geom.diameter_nm = 6.0;
    c.geom.height_nm = 2.5;
    c.geom.margin_lateral_nm = 1.6;
    c.geom.margin_below_nm = 1.4;
    c.geom.margin_above_nm = 1.4;
    c.size_variants = {{5.0, 2.1}, {6.0, 2.5}, {7.0, 2.9}};
    c.alloy_realizations = 2;
    c.tier = "s";
    c.sigma_mode = "conduction";
    c.n_states = 3;
    c.solver_tol_eV = 1e-6;
    c.mc_samples = 200;
    c.master_seed = 2024;
    return c;
}

std::map<std::string, std::string> snapshot(const std::string& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const auto rel = fs::relative(e.path(), dir).string();
        if (rel == "manifest_timing.json" || rel == ".lock") continue;
        std::ifstream in(e.path(), std::ios::binary);
        files[rel] = std::string((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
    }
    return files;
}
} // namespace

TEST_CASE("config validation catches broken input") {
    auto c = smoke_config("unused");
    CHECK(validate(c).empty());

    auto bad = c;
    bad.parameter_set_path = "no/such/params.json";
    auto errors = validate(bad);
    REQUIRE_FALSE(errors.empty());
    bool mentions = false;
    for (const auto& e : errors) {
        if (e.find("parameter_set") != std::string::npos) mentions = true;
    }
    CHECK(mentions);

    auto bad2 = c;
    bad2.mc_samples = 1;
    CHECK_FALSE(validate(bad2).empty());

    auto bad3 = c;
    bad3.tier = "sp3d5s*";  // mismatches the s-only parameter file
    CHECK_FALSE(validate(bad3).empty());

    auto bad4 = c;
    bad4.sources = {"unpolarized", "weather"};
    CHECK_FALSE(validate(bad4).empty());
}

TEST_CASE("defaults round trip through json") {
    const auto def = RunConfig::defaults();
    std::ofstream("defaults_rt.json") << def.to_json();
    const auto back = RunConfig::from_file("defaults_rt.json");
    CHECK(back.to_json() == def.to_json());
    fs::remove("defaults_rt.json");
}

TEST_CASE("smoke pipeline: end to end, caching, determinism") {
    const std::string dir = "smoke_run";
    fs::remove_all(dir);
    auto cfg = smoke_config(dir);
    REQUIRE(validate(cfg).empty());

    const auto manifest = run(cfg);
    CHECK(manifest.status == "ok");
    for (const auto& name : stage_names()) {
        REQUIRE(manifest.stages.count(name));
        const auto st = manifest.stages.at(name).status;
        CHECK((st == "done" || st == "disabled"));
    }
    CHECK(fs::exists(dir + "/spinbath/summary.json"));
    CHECK(fs::exists(dir + "/errorbudget/budget.json"));
    CHECK(fs::exists(dir + "/hyperfine/base.profile_x.tsv"));
    CHECK_FALSE(fs::exists(dir + "/.lock"));

    const auto first = snapshot(dir);

    SUBCASE("re-run with unchanged inputs leaves outputs untouched") {
        const auto t0 = fs::last_write_time(dir + "/structures/base.tsv");
        const auto m2 = run(cfg);
        CHECK(m2.status == "ok");
        CHECK(fs::last_write_time(dir + "/structures/base.tsv") == t0);
        CHECK(snapshot(dir) == first);
    }

    SUBCASE("deleting a downstream output regenerates it without upstream work") {
        const auto t0 = fs::last_write_time(dir + "/structures/base.tsv");
        fs::remove(dir + "/spinbath/summary.json");
        const auto m2 = run(cfg);
        CHECK(m2.status == "ok");
        CHECK(fs::exists(dir + "/spinbath/summary.json"));
        CHECK(fs::last_write_time(dir + "/structures/base.tsv") == t0);
        CHECK(snapshot(dir) == first);
    }

    SUBCASE("fresh identical run is byte-identical") {
        fs::remove_all(dir);
        const auto m2 = run(cfg);
        CHECK(m2.status == "ok");
        CHECK(snapshot(dir) == first);
    }

    fs::remove_all(dir);
}
