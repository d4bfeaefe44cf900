// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#include "dotspin/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "dotspin/errorbudget.hpp"
#include "dotspin/hyperfine.hpp"
#include "dotspin/physcore.hpp"
#include "dotspin/rng.hpp"
#include "dotspin/strain.hpp"
#include "dotspin/tbparams.hpp"

namespace dotspin::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- hashing

std::string hash_bytes(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot hash missing file: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    return hash_bytes(bytes);
}

// ----------------------------------------------------------------- config

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("config file not found: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InputError("config '" + path + "': " + e.what());
    }

    RunConfig c;
    c.database_path = j.value("database", c.database_path);
    c.parameter_set_path = j.value("parameter_set", c.parameter_set_path);
    c.output_dir = j.value("output_dir", c.output_dir);
    if (j.contains("geometry")) {
        const json& g = j["geometry"];
        c.geom.diameter_nm = g.value("diameter_nm", c.geom.diameter_nm);
        c.geom.height_nm = g.value("height_nm", c.geom.height_nm);
        c.geom.dot_material = g.value("dot_material", c.geom.dot_material);
        c.geom.buffer_material = g.value("buffer_material", c.geom.buffer_material);
        c.geom.margin_lateral_nm = g.value("margin_lateral_nm", c.geom.margin_lateral_nm);
        c.geom.margin_below_nm = g.value("margin_below_nm", c.geom.margin_below_nm);
        c.geom.margin_above_nm = g.value("margin_above_nm", c.geom.margin_above_nm);
    }
    if (j.contains("size_variants")) {
        for (const auto& v : j["size_variants"]) {
            c.size_variants.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        }
    }
    if (j.contains("disorder")) {
        const json& d = j["disorder"];
        c.alloy_fraction = d.value("alloy_fraction", c.alloy_fraction);
        c.interface_thickness_nm =
            d.value("interface_thickness_nm", c.interface_thickness_nm);
        c.alloy_realizations = d.value("alloy_realizations", c.alloy_realizations);
    }
    if (j.contains("strain")) {
        const json& st = j["strain"];
        c.strain_enabled = st.value("enabled", c.strain_enabled);
        c.strain_tol_eV_nm = st.value("tolerance_eV_nm", c.strain_tol_eV_nm);
        c.strain_max_iterations = st.value("max_iterations", c.strain_max_iterations);
    }
    if (j.contains("electronic")) {
        const json& e = j["electronic"];
        c.tier = e.value("tier", c.tier);
        c.sigma_mode = e.value("sigma_mode", c.sigma_mode);
        c.sigma_eV = e.value("sigma_eV", c.sigma_eV);
        c.n_states = e.value("n_states", c.n_states);
        c.solver_tol_eV = e.value("tol_eV", c.solver_tol_eV);
        c.solver_max_iterations = e.value("max_iterations", c.solver_max_iterations);
    }
    if (j.contains("spinbath")) {
        const json& sb = j["spinbath"];
        if (sb.contains("sources")) {
            c.sources = sb["sources"].get<std::vector<std::string>>();
        }
        c.mc_samples = sb.value("mc_samples", c.mc_samples);
        if (sb.contains("polarization_axis")) {
            const auto& a = sb["polarization_axis"];
            c.polarization_axis = {a.at(0).get<double>(), a.at(1).get<double>(),
                                   a.at(2).get<double>()};
        }
    }
    if (j.contains("errorbudget")) {
        const json& e = j["errorbudget"];
        c.budget_J_eV = e.value("exchange_J_eV", c.budget_J_eV);
        c.budget_B0_T = e.value("static_field_T", c.budget_B0_T);
        c.budget_Bac_T = e.value("esr_field_T", c.budget_Bac_T);
        c.budget_threshold = e.value("threshold", c.budget_threshold);
        c.budget_zeeman_source = e.value("zeeman_source", c.budget_zeeman_source);
        c.budget_orbital_spacing_eV =
            e.value("orbital_spacing_eV", c.budget_orbital_spacing_eV);
        c.budget_B_perp_T = e.value("field_perp_T", c.budget_B_perp_T);
    }
    c.master_seed = j.value("master_seed", c.master_seed);
    return c;
}

std::string RunConfig::to_json() const {
    json j;
    j["database"] = database_path;
    j["parameter_set"] = parameter_set_path;
    j["output_dir"] = output_dir;
    j["geometry"] = {{"diameter_nm", geom.diameter_nm},
                     {"height_nm", geom.height_nm},
                     {"dot_material", geom.dot_material},
                     {"buffer_material", geom.buffer_material},
                     {"margin_lateral_nm", geom.margin_lateral_nm},
                     {"margin_below_nm", geom.margin_below_nm},
                     {"margin_above_nm", geom.margin_above_nm}};
    json sv = json::array();
    for (const auto& v : size_variants) {
        sv.push_back(json::array({v.diameter_nm, v.height_nm}));
    }
    j["size_variants"] = sv;
    j["disorder"] = {{"alloy_fraction", alloy_fraction},
                     {"interface_thickness_nm", interface_thickness_nm},
                     {"alloy_realizations", alloy_realizations}};
    j["strain"] = {{"enabled", strain_enabled},
                   {"tolerance_eV_nm", strain_tol_eV_nm},
                   {"max_iterations", strain_max_iterations}};
    j["electronic"] = {{"tier", tier},
                       {"sigma_mode", sigma_mode},
                       {"sigma_eV", sigma_eV},
                       {"n_states", n_states},
                       {"tol_eV", solver_tol_eV},
                       {"max_iterations", solver_max_iterations}};
    j["spinbath"] = {{"sources", sources},
                     {"mc_samples", mc_samples},
                     {"polarization_axis",
                      json::array({polarization_axis.x, polarization_axis.y,
                                   polarization_axis.z})}};
    j["errorbudget"] = {{"exchange_J_eV", budget_J_eV},
                        {"static_field_T", budget_B0_T},
                        {"esr_field_T", budget_Bac_T},
                        {"threshold", budget_threshold},
                        {"zeeman_source", budget_zeeman_source},
                        {"orbital_spacing_eV", budget_orbital_spacing_eV},
                        {"field_perp_T", budget_B_perp_T}};
    j["master_seed"] = master_seed;
    return j.dump(2);
}

std::vector<std::string> validate(const RunConfig& cfg) {
    std::vector<std::string> errors;
    auto check_file = [&](const std::string& p, const std::string& what) {
        if (!fs::exists(p)) errors.push_back(what + " does not exist: " + p);
    };
    check_file(cfg.database_path, "database");
    check_file(cfg.parameter_set_path, "parameter_set");
    try {
        cfg.geom.validate();
    } catch (const std::exception& e) {
        errors.emplace_back(e.what());
    }
    if (cfg.alloy_fraction < 0 || cfg.alloy_fraction > 1) {
        errors.push_back("disorder.alloy_fraction outside [0,1]");
    }
    if (cfg.interface_thickness_nm < 0) {
        errors.push_back("disorder.interface_thickness_nm negative");
    }
    if (cfg.alloy_realizations < 1) {
        errors.push_back("disorder.alloy_realizations must be >= 1");
    }
    try {
        (void)electronic::tier_from_string(cfg.tier);
    } catch (const std::exception& e) {
        errors.emplace_back(e.what());
    }
    if (cfg.tier == "sp3d5s*" || cfg.tier == "sp3d5s") {
        if (!fs::exists(cfg.parameter_set_path)) {
            errors.push_back("electronic.tier sp3d5s* requires parameter_set");
        }
    }
    if (cfg.sigma_mode != "midgap" && cfg.sigma_mode != "conduction" &&
        cfg.sigma_mode != "explicit") {
        errors.push_back("electronic.sigma_mode must be midgap|conduction|explicit");
    }
    if (cfg.n_states < 1) errors.push_back("electronic.n_states must be >= 1");
    if (cfg.solver_tol_eV <= 0) errors.push_back("electronic.tol_eV must be positive");
    for (const auto& s : cfg.sources) {
        if (s != "unpolarized" && s != "size" && s != "alloy" && s != "interface") {
            errors.push_back("spinbath.sources: unknown source '" + s + "'");
        }
    }
    if (cfg.mc_samples < 2) errors.push_back("spinbath.mc_samples must be >= 2");
    if (cfg.budget_J_eV <= 0) errors.push_back("errorbudget.exchange_J_eV must be > 0");
    if (cfg.budget_B0_T <= 0) errors.push_back("errorbudget.static_field_T must be > 0");
    if (cfg.budget_Bac_T <= 0) errors.push_back("errorbudget.esr_field_T must be > 0");
    if (cfg.budget_threshold <= 0 || cfg.budget_threshold >= 1) {
        errors.push_back("errorbudget.threshold must be in (0,1)");
    }
    if (fs::exists(cfg.parameter_set_path)) {
        try {
            const auto set = electronic::TbParameterSet::load(cfg.parameter_set_path);
            if (electronic::to_string(set.tier) != cfg.tier &&
                !(cfg.tier == "sp3s" && set.tier == electronic::BasisTier::sp3s)) {
                errors.push_back("parameter set tier '" +
                                 std::string(electronic::to_string(set.tier)) +
                                 "' does not match electronic.tier '" + cfg.tier + "'");
            }
        } catch (const std::exception& e) {
            errors.emplace_back(e.what());
        }
    }
    return errors;
}

// --------------------------------------------------------------- manifest

void RunManifest::save(const std::string& path) const {
    json j;
    j["schema_version"] = 1;
    j["config_hash"] = config_hash;
    j["status"] = status;
    json st;
    for (const auto& [name, rec] : stages) {
        st[name] = {{"hash", rec.hash}, {"status", rec.status}, {"outputs", rec.outputs}};
    }
    j["stages"] = st;
    std::ofstream out(path);
    if (!out) throw InputError("cannot write manifest: " + path);
    out << j.dump(2) << "\n";
}

RunManifest RunManifest::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open manifest: " + path);
    json j;
    in >> j;
    RunManifest m;
    m.config_hash = j.value("config_hash", "");
    m.status = j.value("status", "");
    if (j.contains("stages")) {
        for (const auto& [name, rec] : j["stages"].items()) {
            StageRecord r;
            r.hash = rec.value("hash", "");
            r.status = rec.value("status", "");
            if (rec.contains("outputs")) {
                r.outputs = rec["outputs"].get<std::vector<std::string>>();
            }
            m.stages[name] = r;
        }
    }
    return m;
}

// ------------------------------------------------------------------- jobs

namespace {

struct Job {
    std::string name;              // base, size_small, size_large, alloy_0, ...
    geometry::DotGeometry geom;
    geometry::DisorderSpec disorder;
    std::uint64_t seed = 0;
    int n_states = 2;
};

bool wants(const RunConfig& cfg, const std::string& source) {
    return std::find(cfg.sources.begin(), cfg.sources.end(), source) !=
           cfg.sources.end();
}

std::vector<SizeVariant> size_variants_of(const RunConfig& cfg) {
    if (!cfg.size_variants.empty()) return cfg.size_variants;
    return {{cfg.geom.diameter_nm - 1.0, cfg.geom.height_nm - 0.5},
            {cfg.geom.diameter_nm, cfg.geom.height_nm},
            {cfg.geom.diameter_nm + 1.0, cfg.geom.height_nm + 0.5}};
}

std::vector<Job> build_jobs(const RunConfig& cfg) {
    std::vector<Job> jobs;
    Job base;
    base.name = "base";
    base.geom = cfg.geom;
    base.disorder.mode = geometry::DisorderSpec::Mode::none;
    base.seed = rng::derive(cfg.master_seed, 1);
    base.n_states = cfg.n_states;
    jobs.push_back(base);

    if (wants(cfg, "size")) {
        const auto variants = size_variants_of(cfg);
        for (std::size_t k = 0; k < variants.size(); ++k) {
            if (std::abs(variants[k].diameter_nm - cfg.geom.diameter_nm) < 1e-12 &&
                std::abs(variants[k].height_nm - cfg.geom.height_nm) < 1e-12) {
                continue;  // the base run covers the middle variant
            }
            Job j = base;
            j.name = "size_" + std::to_string(k);
            j.geom.diameter_nm = variants[k].diameter_nm;
            j.geom.height_nm = variants[k].height_nm;
            j.seed = rng::derive(cfg.master_seed, 10 + k);
            j.n_states = 2;
            jobs.push_back(j);
        }
    }
    if (wants(cfg, "alloy")) {
        for (int r = 0; r < cfg.alloy_realizations; ++r) {
            Job j = base;
            j.name = "alloy_" + std::to_string(r);
            j.disorder.mode = geometry::DisorderSpec::Mode::alloy;
            j.disorder.alloy_fraction = cfg.alloy_fraction;
            j.seed = rng::derive(cfg.master_seed, 20 + r);
            j.n_states = 2;
            jobs.push_back(j);
        }
    }
    if (wants(cfg, "interface")) {
        Job j = base;
        j.name = "interface_0";
        j.disorder.mode = geometry::DisorderSpec::Mode::interface;
        j.disorder.interface_thickness_nm = cfg.interface_thickness_nm;
        j.seed = rng::derive(cfg.master_seed, 30);
        j.n_states = 2;
        jobs.push_back(j);
    }
    return jobs;
}

struct PathSet {
    fs::path root;
    fs::path structure(const std::string& job) const {
        return root / "structures" / (job + ".tsv");
    }
    fs::path structure_meta(const std::string& job) const {
        return root / "structures" / (job + ".meta.json");
    }
    fs::path relaxed(const std::string& job) const {
        return root / "strain" / (job + ".relaxed.tsv");
    }
    fs::path strain_summary(const std::string& job) const {
        return root / "strain" / (job + ".summary.txt");
    }
    fs::path wf(const std::string& job, int state) const {
        return root / "electronic" / (job + ".state" + std::to_string(state) + ".bin");
    }
    fs::path wf_meta(const std::string& job, int state) const {
        return root / "electronic" /
               (job + ".state" + std::to_string(state) + ".meta.json");
    }
    fs::path solve_info(const std::string& job) const {
        return root / "electronic" / (job + ".solve.json");
    }
    fs::path map(const std::string& job) const {
        return root / "hyperfine" / (job + ".map.tsv");
    }
    fs::path profile(const std::string& job, char axis) const {
        return root / "hyperfine" / (job + std::string(".profile_") + axis + ".tsv");
    }
    fs::path map_summary(const std::string& job) const {
        return root / "hyperfine" / (job + ".summary.json");
    }
    fs::path bath_txt() const { return root / "spinbath" / "summary.txt"; }
    fs::path bath_json() const { return root / "spinbath" / "summary.json"; }
    fs::path budget_txt() const { return root / "errorbudget" / "budget.txt"; }
    fs::path budget_json() const { return root / "errorbudget" / "budget.json"; }
    fs::path manifest() const { return root / "manifest.json"; }
    fs::path timing() const { return root / "manifest_timing.json"; }
};

class StageClock {
public:
    explicit StageClock(const fs::path& timing_path) : path_(timing_path) {
        if (fs::exists(path_)) {
            std::ifstream in(path_);
            try {
                in >> j_;
            } catch (...) {
                j_ = json::object();
            }
        }
    }
    void record(const std::string& stage, double seconds) {
        j_[stage] = seconds;
        std::ofstream out(path_);
        out << j_.dump(2) << "\n";
    }

private:
    fs::path path_;
    json j_ = json::object();
};

/// RAII directory lock.
class DirLock {
public:
    explicit DirLock(const fs::path& dir) : path_(dir / ".lock") {
        if (fs::exists(path_)) {
            throw InputError("output directory is locked by another run: " +
                             path_.string() + " (remove the lockfile if stale)");
        }
        std::ofstream out(path_);
        out << "locked\n";
    }
    ~DirLock() {
        std::error_code ec;
        fs::remove(path_, ec);
    }

private:
    fs::path path_;
};

void log_stage(const std::string& stage, const std::string& msg) {
    std::fprintf(stderr, "[%s] %s\n", stage.c_str(), msg.c_str());
}

} // namespace

// -------------------------------------------------------------------- run

RunManifest run(const RunConfig& cfg, const std::string& last_stage) {
    const auto t_start = std::chrono::steady_clock::now();
    const auto errors = validate(cfg);
    if (!errors.empty()) {
        std::string what = "invalid configuration:";
        for (const auto& e : errors) what += "\n  - " + e;
        throw InputError(what);
    }
    int last = static_cast<int>(stage_names().size()) - 1;
    if (!last_stage.empty()) {
        auto it = std::find(stage_names().begin(), stage_names().end(), last_stage);
        if (it == stage_names().end()) throw InputError("unknown stage: " + last_stage);
        last = static_cast<int>(it - stage_names().begin());
    }

    PathSet paths{fs::path(cfg.output_dir)};
    fs::create_directories(paths.root);
    DirLock lock(paths.root);
    for (const char* d : {"structures", "strain", "electronic", "hyperfine",
                          "spinbath", "errorbudget"}) {
        fs::create_directories(paths.root / d);
    }

    const std::string config_hash = hash_bytes(cfg.to_json());
    const std::string db_hash = hash_file(cfg.database_path);
    const std::string params_hash = hash_file(cfg.parameter_set_path);

    RunManifest manifest;
    if (fs::exists(paths.manifest())) {
        try {
            manifest = RunManifest::load(paths.manifest().string());
        } catch (...) {
            manifest = RunManifest{};
        }
    }
    manifest.config_hash = config_hash;
    manifest.status = "partial";

    StageClock clock(paths.timing());
    const auto db = physcore::load_database(cfg.database_path);
    const auto params = electronic::TbParameterSet::load(cfg.parameter_set_path);
    const auto jobs = build_jobs(cfg);
    const double grid = db.material(cfg.geom.buffer_material).lattice_constant_nm;
    const double g_e = db.material(cfg.geom.dot_material).g_electron;

    auto stage_fresh = [&](const std::string& name, const std::string& hash) {
        auto it = manifest.stages.find(name);
        if (it == manifest.stages.end()) return false;
        if (it->second.hash != hash) return false;
        if (it->second.status != "done" && it->second.status != "disabled") return false;
        for (const auto& out : it->second.outputs) {
            if (!fs::exists(out)) return false;
        }
        return true;
    };

    auto run_stage = [&](int index, const std::string& upstream_hash,
                         const std::string& extra,
                         const std::function<std::vector<std::string>()>& body)
        -> std::string {
        const std::string& name = stage_names()[index];
        const std::string hash = hash_bytes(upstream_hash + "|" + extra);
        if (index > last) return hash;
        if (stage_fresh(name, hash)) {
            log_stage(name, "up to date, skipped");
            return hash;
        }
        log_stage(name, "running");
        const auto t0 = std::chrono::steady_clock::now();
        StageRecord rec;
        rec.hash = hash;
        try {
            rec.outputs = body();
            rec.status = "done";
        } catch (...) {
            rec.status = "failed";
            manifest.stages[name] = rec;
            manifest.save(paths.manifest().string());
            throw;
        }
        manifest.stages[name] = rec;
        manifest.save(paths.manifest().string());
        clock.record(name, std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - t0)
                               .count());
        log_stage(name, "done");
        return hash;
    };

    // ---- geometry
    const std::string h_geom = run_stage(0, config_hash + db_hash, "geometry", [&] {
        std::vector<std::string> outs;
        for (const auto& j : jobs) {
            auto s = geometry::build_structure(j.geom, j.disorder, j.seed, grid);
            geometry::export_structure(s, paths.structure(j.name).string(),
                                       paths.structure_meta(j.name).string());
            outs.push_back(paths.structure(j.name).string());
            outs.push_back(paths.structure_meta(j.name).string());
            log_stage("geometry",
                      j.name + ": " + std::to_string(s.size()) + " sites, dot " +
                          std::to_string(s.count_region(geometry::Region::dot)));
        }
        return outs;
    });

    // ---- strain
    const std::string strain_extra =
        cfg.strain_enabled ? "on|" + std::to_string(cfg.strain_tol_eV_nm) + "|" +
                                 std::to_string(cfg.strain_max_iterations)
                           : "off";
    const std::string h_strain = run_stage(1, h_geom, strain_extra, [&] {
        std::vector<std::string> outs;
        if (!cfg.strain_enabled) {
            log_stage("strain", "disabled (unrelaxed grid)");
            return outs;
        }
        for (const auto& j : jobs) {
            auto s = geometry::import_structure(paths.structure(j.name).string(),
                                                paths.structure_meta(j.name).string());
            auto model = strain::VffModel::from_database(db, s);
            strain::RelaxOptions opt;
            opt.tolerance_eV_per_nm = cfg.strain_tol_eV_nm;
            opt.max_iterations = cfg.strain_max_iterations;
            strain::VffSystem sys(s, model, opt);
            auto r = sys.relax();
            // positions export reuses the structure row format
            auto relaxed = s;
            std::FILE* f = std::fopen(paths.relaxed(j.name).string().c_str(), "w");
            if (!f) throw InputError("cannot write relaxed positions");
            std::fprintf(f, "# index element x_nm y_nm z_nm sublattice region\n");
            for (std::size_t i = 0; i < s.size(); ++i) {
                std::fprintf(f, "%zu %s %.17g %.17g %.17g %s %s\n", i,
                             s.species(i).c_str(), r.positions[i].x, r.positions[i].y,
                             r.positions[i].z,
                             geometry::to_string(s.sublattice(i)),
                             geometry::to_string(s.region[i]));
            }
            std::fclose(f);
            strain::export_strain_summary(s, sys, r,
                                          paths.strain_summary(j.name).string());
            outs.push_back(paths.relaxed(j.name).string());
            outs.push_back(paths.strain_summary(j.name).string());
        }
        return outs;
    });

    // ---- electronic
    const std::string elec_extra = params_hash + "|" + cfg.tier + "|" + cfg.sigma_mode +
                                   "|" + std::to_string(cfg.sigma_eV) + "|" +
                                   std::to_string(cfg.n_states) + "|" +
                                   std::to_string(cfg.solver_tol_eV) + "|" +
                                   std::to_string(cfg.master_seed);
    const std::string h_elec = run_stage(2, h_strain, elec_extra, [&] {
        std::vector<std::string> outs;
        for (const auto& j : jobs) {
            auto s = geometry::import_structure(paths.structure(j.name).string(),
                                                paths.structure_meta(j.name).string());
            auto nbr = geometry::build_neighbors(s);

            electronic::AssembleOptions aopt;
            std::vector<Vec3> relaxed_positions;
            if (cfg.strain_enabled) {
                relaxed_positions.resize(s.size());
                std::ifstream in(paths.relaxed(j.name).string());
                std::string line;
                std::size_t row = 0;
                while (std::getline(in, line)) {
                    if (line.empty() || line[0] == '#') continue;
                    std::size_t idx;
                    char elem[16], subl[16], reg[16];
                    double x, y, z;
                    if (std::sscanf(line.c_str(), "%zu %15s %lg %lg %lg %15s %15s",
                                    &idx, elem, &x, &y, &z, subl, reg) == 7 &&
                        row < s.size()) {
                        relaxed_positions[row] = {x, y, z};
                    }
                    ++row;
                }
                aopt.positions = &relaxed_positions;
            }

            const auto H = electronic::assemble(s, nbr, params, aopt);
            const double sigma = electronic::place_sigma(
                params, s.geometry.dot_material, s.geometry.buffer_material,
                cfg.sigma_mode == "midgap"
                    ? electronic::SigmaMode::midgap
                    : (cfg.sigma_mode == "conduction"
                           ? electronic::SigmaMode::conduction
                           : electronic::SigmaMode::explicit_value),
                cfg.sigma_eV);
            log_stage("electronic", j.name + ": dim " + std::to_string(H.dim()) +
                                        ", sigma " + std::to_string(sigma));
            auto states = electronic::solve_ground_conduction(
                H, sigma, j.n_states, cfg.solver_tol_eV,
                rng::derive(j.seed, 0xe1), cfg.solver_max_iterations);

            json info;
            info["sigma_eV"] = states.sigma_eV;
            info["iterations"] = states.iterations;
            info["valence_like"] = states.valence_like;
            info["ground_state"] = electronic::pick_ground_state(states);
            json evs = json::array();
            for (std::size_t k = 0; k < states.states.size(); ++k) {
                evs.push_back({{"eigenvalue_eV", states.states[k].eigenvalue_eV},
                               {"residual", states.states[k].residual},
                               {"s_character", states.states[k].s_character()}});
                electronic::export_wavefunction(
                    states.states[k], paths.wf(j.name, static_cast<int>(k)).string(),
                    paths.wf_meta(j.name, static_cast<int>(k)).string());
                outs.push_back(paths.wf(j.name, static_cast<int>(k)).string());
                outs.push_back(paths.wf_meta(j.name, static_cast<int>(k)).string());
            }
            info["states"] = evs;
            std::ofstream si(paths.solve_info(j.name));
            si << info.dump(2) << "\n";
            outs.push_back(paths.solve_info(j.name).string());

            log_stage("electronic",
                      j.name + ": E0 " +
                          std::to_string(
                              states.states[electronic::pick_ground_state(states)]
                                  .eigenvalue_eV) +
                          " eV after " + std::to_string(states.iterations) + " its");
        }
        return outs;
    });

    // ---- hyperfine
    const std::string h_hyper = run_stage(3, h_elec, db_hash, [&] {
        std::vector<std::string> outs;
        for (const auto& j : jobs) {
            auto s = geometry::import_structure(paths.structure(j.name).string(),
                                                paths.structure_meta(j.name).string());
            json info;
            {
                std::ifstream si(paths.solve_info(j.name));
                si >> info;
            }
            const int ground = info.at("ground_state").get<int>();
            auto wf = electronic::import_wavefunction(
                paths.wf(j.name, ground).string(),
                paths.wf_meta(j.name, ground).string());
            auto nbr = geometry::build_neighbors(s);
            auto map = hyperfine::coupling_map(wf, s, db, &nbr);
            map.structure_id = j.name;
            map.wavefunction_id = j.name + ".state" + std::to_string(ground);
            hyperfine::export_map(map, s, paths.map(j.name).string());
            outs.push_back(paths.map(j.name).string());

            json summary;
            summary["max_coupling_eV"] = map.max_coupling_eV();
            summary["argmax_site"] = map.argmax_site();
            {
                const auto i = map.argmax_site();
                const Vec3 p = s.position(i);
                summary["argmax_position_nm"] = json::array({p.x, p.y, p.z});
                summary["argmax_element"] = s.species(i);
                summary["argmax_sublattice"] =
                    geometry::to_string(s.sublattice(i));
            }
            summary["anion_cation_ratio"] = hyperfine::anion_cation_ratio(map, s);
            summary["reach_count_1pc"] = hyperfine::reach_count(map, 0.01);
            summary["dot_site_count"] = s.count_region(geometry::Region::dot);

            if (j.name == "base") {
                auto px = hyperfine::profile(map, s, 'x', 0.0);
                auto pz = hyperfine::profile(map, s, 'z', 0.0);
                hyperfine::export_profile(px, paths.profile(j.name, 'x').string());
                hyperfine::export_profile(pz, paths.profile(j.name, 'z').string());
                outs.push_back(paths.profile(j.name, 'x').string());
                outs.push_back(paths.profile(j.name, 'z').string());
                summary["decay_length_x_nm"] = hyperfine::decay_length(px);
                summary["decay_length_z_nm"] = hyperfine::decay_length(pz);
            }
            std::ofstream so(paths.map_summary(j.name));
            so << summary.dump(2) << "\n";
            outs.push_back(paths.map_summary(j.name).string());
        }
        return outs;
    });

    // ---- spinbath
    const std::string bath_extra = std::to_string(cfg.mc_samples) + "|" +
                                   std::to_string(cfg.master_seed);
    const std::string h_bath = run_stage(4, h_hyper, bath_extra, [&] {
        std::vector<std::string> outs;
        auto load_job = [&](const std::string& name)
            -> std::pair<hyperfine::HyperfineMap, geometry::AtomisticStructure> {
            auto s = geometry::import_structure(paths.structure(name).string(),
                                                paths.structure_meta(name).string());
            hyperfine::HyperfineMap map;
            std::ifstream in(paths.map(name).string());
            if (!in) throw InputError("missing hyperfine map for " + name);
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == '#') continue;
                std::size_t idx;
                char elem[16], reg[16];
                double x, y, z, a;
                if (std::sscanf(line.c_str(), "%zu %15s %15s %lg %lg %lg %lg", &idx,
                                elem, reg, &x, &y, &z, &a) == 7) {
                    map.coupling_eV.push_back(a);
                }
            }
            map.contact_density_cm3.assign(map.coupling_eV.size(), 0.0);
            return {std::move(map), std::move(s)};
        };

        std::vector<spinbath::FieldStatistics> rows;
        if (wants(cfg, "unpolarized")) {
            auto [map, s] = load_job("base");
            auto closed = spinbath::delta_unpolarized_closed_form(map, s, db, g_e);
            auto mc = spinbath::delta_unpolarized_monte_carlo(
                map, s, db, g_e, cfg.mc_samples, rng::derive(cfg.master_seed, 0xba));
            rows.push_back(mc);
            log_stage("spinbath",
                      "unpolarized: closed " + std::to_string(closed.delta_B_G) +
                          " G, mc " + std::to_string(mc.delta_B_G) + " G");
        }
        if (wants(cfg, "size")) {
            const auto variants = size_variants_of(cfg);
            std::vector<geometry::DotGeometry> geoms;
            std::vector<std::string> names;
            for (std::size_t k = 0; k < variants.size(); ++k) {
                const bool is_base =
                    std::abs(variants[k].diameter_nm - cfg.geom.diameter_nm) < 1e-12 &&
                    std::abs(variants[k].height_nm - cfg.geom.height_nm) < 1e-12;
                geometry::DotGeometry g = cfg.geom;
                g.diameter_nm = variants[k].diameter_nm;
                g.height_nm = variants[k].height_nm;
                geoms.push_back(g);
                names.push_back(is_base ? "base" : "size_" + std::to_string(k));
            }
            auto handle = [&](const geometry::DotGeometry&, std::size_t k) {
                return load_job(names[k]);
            };
            rows.push_back(spinbath::delta_size(geoms, cfg.polarization_axis, db, g_e,
                                                handle));
        }
        if (wants(cfg, "alloy")) {
            auto [map, s] = load_job("alloy_0");
            spinbath::DisorderMode m;
            m.source = spinbath::Source::alloy;
            m.alloy_fraction = cfg.alloy_fraction;
            rows.push_back(spinbath::delta_disorder(map, s, db, g_e, m,
                                                    cfg.polarization_axis));
        }
        if (wants(cfg, "interface")) {
            auto [map, s] = load_job("interface_0");
            spinbath::DisorderMode m;
            m.source = spinbath::Source::interface;
            rows.push_back(spinbath::delta_disorder(map, s, db, g_e, m,
                                                    cfg.polarization_axis));
        }

        // wavefunction overlap report across alloy realizations
        if (wants(cfg, "alloy") && cfg.alloy_realizations >= 2) {
            std::vector<electronic::WaveFunction> wfs;
            for (int r = 0; r < cfg.alloy_realizations; ++r) {
                const std::string name = "alloy_" + std::to_string(r);
                json info;
                std::ifstream si(paths.solve_info(name));
                si >> info;
                const int ground = info.at("ground_state").get<int>();
                wfs.push_back(electronic::import_wavefunction(
                    paths.wf(name, ground).string(),
                    paths.wf_meta(name, ground).string()));
            }
            std::vector<const electronic::WaveFunction*> ptrs;
            for (const auto& w : wfs) ptrs.push_back(&w);
            const auto rep = spinbath::overlap_and_density_fluctuation(ptrs);
            json jj;
            jj["overlaps"] = rep.overlaps;
            jj["density_shift_rel"] = rep.density_shift_rel;
            std::ofstream out(paths.root / "spinbath" / "overlaps.json");
            out << jj.dump(2) << "\n";
            outs.push_back((paths.root / "spinbath" / "overlaps.json").string());
        }

        spinbath::export_summary(rows, paths.bath_txt().string(),
                                 paths.bath_json().string());
        outs.push_back(paths.bath_txt().string());
        outs.push_back(paths.bath_json().string());
        return outs;
    });

    // ---- errorbudget
    const std::string budget_extra = std::to_string(cfg.budget_J_eV) + "|" +
                                     std::to_string(cfg.budget_B0_T) + "|" +
                                     cfg.budget_zeeman_source;
    run_stage(5, h_bath, budget_extra, [&] {
        std::vector<std::string> outs;
        errorbudget::OperationParams p;
        p.exchange_J_eV = cfg.budget_J_eV;
        p.static_field_T = cfg.budget_B0_T;
        p.esr_field_T = cfg.budget_Bac_T;
        p.threshold = cfg.budget_threshold;
        p.g_electron = g_e;

        // orbital spacing from the base solve
        if (cfg.budget_orbital_spacing_eV > 0) {
            p.orbital_spacing_eV = cfg.budget_orbital_spacing_eV;
        } else {
            json info;
            std::ifstream si(paths.solve_info("base"));
            si >> info;
            const auto& st = info.at("states");
            const int g0 = info.at("ground_state").get<int>();
            double e0 = st.at(g0).at("eigenvalue_eV").get<double>();
            double spacing = 0.0;
            for (const auto& row : st) {
                const double e = row.at("eigenvalue_eV").get<double>();
                if (e > e0 + 1e-9 && (spacing == 0.0 || e - e0 < spacing)) {
                    spacing = e - e0;
                }
            }
            p.orbital_spacing_eV = spacing > 0 ? spacing : 0.05;
        }

        // Zeeman spread and perpendicular field from the bath summary
        {
            json rows;
            std::ifstream in(paths.bath_json());
            in >> rows;
            const std::string want =
                cfg.budget_zeeman_source == "unpolarized" ? "unpolarized-nuclei"
                : cfg.budget_zeeman_source == "size"      ? "dot-size-fluctuation"
                : cfg.budget_zeeman_source == "alloy"     ? "alloy-disorder"
                                                          : "interface-disorder";
            bool found = false;
            for (const auto& row : rows) {
                if (row.at("source").get<std::string>() == want) {
                    p.zeeman_spread_eV = row.at("delta_E_eV").get<double>();
                    if (cfg.budget_B_perp_T > 0) {
                        p.field_perp_T = cfg.budget_B_perp_T;
                    } else {
                        // random-orientation field: 2/3 of the variance is
                        // transverse
                        p.field_perp_T = std::sqrt(2.0 / 3.0) *
                                         row.at("delta_B_T").get<double>();
                    }
                    found = true;
                }
            }
            if (!found) {
                throw InputError("errorbudget: source '" + cfg.budget_zeeman_source +
                                 "' not present in the spinbath summary");
            }
        }

        const auto budget = errorbudget::evaluate(p, db.constants);
        errorbudget::export_budget(budget, paths.budget_txt().string(),
                                   paths.budget_json().string());
        outs.push_back(paths.budget_txt().string());
        outs.push_back(paths.budget_json().string());
        return outs;
    });

    manifest.status = "ok";
    manifest.save(paths.manifest().string());
    clock.record("total", std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t_start)
                              .count());
    return manifest;
}

void report(const std::string& output_dir) {
    PathSet paths{fs::path(output_dir)};
    if (!fs::exists(paths.bath_json())) {
        throw InputError("no completed spinbath summary under " + output_dir);
    }
    json rows;
    {
        std::ifstream in(paths.bath_json());
        in >> rows;
    }
    if (rows.empty()) throw InputError("spinbath summary is empty");
    std::printf("%-24s %12s %12s %12s  %s\n", "source", "dB_N (G)", "dE (eV)",
                "T2* (s)", "method");
    for (const auto& row : rows) {
        const double db_g =
            row.at("delta_B_T").get<double>() * physcore::kGaussPerTesla;
        char t2[32];
        if (row.at("t2_star_infinite").get<bool>()) {
            std::snprintf(t2, sizeof t2, "inf");
        } else {
            std::snprintf(t2, sizeof t2, "%.3e", row.at("t2_star_s").get<double>());
        }
        std::printf("%-24s %12.4g %12.4g %12s  %s\n",
                    row.at("source").get<std::string>().c_str(), db_g,
                    row.at("delta_E_eV").get<double>(), t2,
                    row.at("method").get<std::string>().c_str());
    }
    if (fs::exists(paths.budget_json())) {
        json b;
        std::ifstream in(paths.budget_json());
        in >> b;
        std::printf("\nerror budget (threshold %.1g):\n",
                    b.at("inputs").at("threshold").get<double>());
        std::printf("  swap error %.3g (%s), leakage %.3g (%s)\n",
                    b.at("swap_error").get<double>(),
                    b.at("swap_ok").get<bool>() ? "pass" : "FAIL",
                    b.at("leakage").get<double>(),
                    b.at("leakage_ok").get<bool>() ? "pass" : "FAIL");
        if (b.at("j_window_empty").get<bool>()) {
            std::printf("  exchange window: no admissible J\n");
        } else {
            std::printf("  exchange window [%.3g, %.3g] eV\n",
                        b.at("j_window_eV").at(0).get<double>(),
                        b.at("j_window_eV").at(1).get<double>());
        }
        std::printf("  drift limits: parallel %.3g T, perpendicular %s\n",
                    b.at("drift_parallel_max_T").get<double>(),
                    b.at("drift_perp_unbounded").get<bool>()
                        ? "unbounded"
                        : std::to_string(b.at("drift_perp_max_T").get<double>())
                              .c_str());
    }
}

} // namespace dotspin::pipeline
