// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#include "dotspin/tbparams.hpp"

#include <fstream>

#include "json.hpp"

namespace dotspin::electronic {

using nlohmann::json;

std::vector<double> onsite_vector(const OrbitalEnergies& e, BasisTier tier) {
    switch (tier) {
        case BasisTier::s_only: return {e.s};
        case BasisTier::sp3s: return {e.s, e.p, e.p, e.p, e.sstar};
        case BasisTier::sp3d5s:
            return {e.s, e.p, e.p, e.p, e.d, e.d, e.d, e.d, e.d, e.sstar};
    }
    return {};
}

const TbMaterial& TbParameterSet::material(const std::string& mat) const {
    auto it = materials.find(mat);
    if (it == materials.end()) {
        throw InputError("parameter set '" + name + "' has no material '" + mat + "'");
    }
    return it->second;
}

double TbParameterSet::eta(const std::string& field) const {
    auto it = eta_overrides.find(field);
    return it == eta_overrides.end() ? harrison_eta : it->second;
}

namespace {

OrbitalEnergies parse_onsite(const json& j, const std::string& ctx) {
    OrbitalEnergies e;
    if (!j.contains("s")) throw InputError("parameter file: missing onsite 's' in " + ctx);
    e.s = j["s"].get<double>();
    e.p = j.value("p", 0.0);
    e.d = j.value("d", 0.0);
    e.sstar = j.value("sstar", 0.0);
    return e;
}

TwoCenterIntegrals parse_integrals(const json& j) {
    TwoCenterIntegrals v;
    v.ss_sigma = j.value("ss_sigma", 0.0);
    v.sp_sigma = j.value("sp_sigma", 0.0);
    v.ps_sigma = j.value("ps_sigma", 0.0);
    v.pp_sigma = j.value("pp_sigma", 0.0);
    v.pp_pi = j.value("pp_pi", 0.0);
    v.sstar_s_sigma = j.value("sstar_s_sigma", 0.0);
    v.s_sstar_sigma = j.value("s_sstar_sigma", 0.0);
    v.sstar_p_sigma = j.value("sstar_p_sigma", 0.0);
    v.p_sstar_sigma = j.value("p_sstar_sigma", 0.0);
    v.sstar_sstar_sigma = j.value("sstar_sstar_sigma", 0.0);
    v.sd_sigma = j.value("sd_sigma", 0.0);
    v.ds_sigma = j.value("ds_sigma", 0.0);
    v.pd_sigma = j.value("pd_sigma", 0.0);
    v.pd_pi = j.value("pd_pi", 0.0);
    v.dp_sigma = j.value("dp_sigma", 0.0);
    v.dp_pi = j.value("dp_pi", 0.0);
    v.dd_sigma = j.value("dd_sigma", 0.0);
    v.dd_pi = j.value("dd_pi", 0.0);
    v.dd_delta = j.value("dd_delta", 0.0);
    v.sstar_d_sigma = j.value("sstar_d_sigma", 0.0);
    v.d_sstar_sigma = j.value("d_sstar_sigma", 0.0);
    return v;
}

} // namespace

TbParameterSet TbParameterSet::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("parameter file not found: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InputError("parameter file '" + path + "': " + e.what());
    }

    TbParameterSet set;
    set.name = j.value("name", std::string{"unnamed"});
    if (!j.contains("tier")) throw InputError("parameter file '" + path + "': missing tier");
    set.tier = tier_from_string(j["tier"].get<std::string>());
    set.harrison_eta = j.value("harrison_eta", 2.0);
    if (set.harrison_eta < 0) {
        throw InputError("parameter file '" + path + "': harrison_eta must be >= 0");
    }
    if (j.contains("eta_overrides")) {
        for (const auto& [k, v] : j["eta_overrides"].items()) {
            set.eta_overrides[k] = v.get<double>();
        }
    }
    if (j.contains("targets")) {
        for (const auto& [k, v] : j["targets"].items()) {
            if (v.is_number()) set.targets[k] = v.get<double>();
        }
    }

    if (!j.contains("materials") || !j["materials"].is_object()) {
        throw InputError("parameter file '" + path + "': missing materials object");
    }
    for (const auto& [mat_name, m] : j["materials"].items()) {
        TbMaterial mat;
        mat.name = mat_name;
        mat.energy_shift_eV = m.value("energy_shift_eV", 0.0);
        mat.d0_nm = m.value("d0_nm", 0.0);
        if (!m.contains("onsite_anion") || !m.contains("onsite_cation")) {
            throw InputError("parameter file '" + path + "': material '" + mat_name +
                             "' missing onsite tables");
        }
        mat.onsite_anion = parse_onsite(m["onsite_anion"], mat_name + ".onsite_anion");
        mat.onsite_cation = parse_onsite(m["onsite_cation"], mat_name + ".onsite_cation");
        if (!m.contains("integrals")) {
            throw InputError("parameter file '" + path + "': material '" + mat_name +
                             "' missing integrals");
        }
        mat.integrals = parse_integrals(m["integrals"]);
        if (m.contains("lowdin_anion")) {
            mat.lowdin_anion = parse_onsite(m["lowdin_anion"], mat_name + ".lowdin_anion");
        }
        if (m.contains("lowdin_cation")) {
            mat.lowdin_cation = parse_onsite(m["lowdin_cation"], mat_name + ".lowdin_cation");
        }
        set.materials[mat_name] = std::move(mat);
    }
    return set;
}

TwoCenterIntegrals scale_integrals(const TwoCenterIntegrals& v, const TbParameterSet& set,
                                   double d0, double d) {
    TwoCenterIntegrals s = v;
    s.ss_sigma = strain_scale(v.ss_sigma, d0, d, set.eta("ss_sigma"));
    s.sp_sigma = strain_scale(v.sp_sigma, d0, d, set.eta("sp_sigma"));
    s.ps_sigma = strain_scale(v.ps_sigma, d0, d, set.eta("ps_sigma"));
    s.pp_sigma = strain_scale(v.pp_sigma, d0, d, set.eta("pp_sigma"));
    s.pp_pi = strain_scale(v.pp_pi, d0, d, set.eta("pp_pi"));
    s.sstar_s_sigma = strain_scale(v.sstar_s_sigma, d0, d, set.eta("sstar_s_sigma"));
    s.s_sstar_sigma = strain_scale(v.s_sstar_sigma, d0, d, set.eta("s_sstar_sigma"));
    s.sstar_p_sigma = strain_scale(v.sstar_p_sigma, d0, d, set.eta("sstar_p_sigma"));
    s.p_sstar_sigma = strain_scale(v.p_sstar_sigma, d0, d, set.eta("p_sstar_sigma"));
    s.sstar_sstar_sigma =
        strain_scale(v.sstar_sstar_sigma, d0, d, set.eta("sstar_sstar_sigma"));
    s.sd_sigma = strain_scale(v.sd_sigma, d0, d, set.eta("sd_sigma"));
    s.ds_sigma = strain_scale(v.ds_sigma, d0, d, set.eta("ds_sigma"));
    s.pd_sigma = strain_scale(v.pd_sigma, d0, d, set.eta("pd_sigma"));
    s.pd_pi = strain_scale(v.pd_pi, d0, d, set.eta("pd_pi"));
    s.dp_sigma = strain_scale(v.dp_sigma, d0, d, set.eta("dp_sigma"));
    s.dp_pi = strain_scale(v.dp_pi, d0, d, set.eta("dp_pi"));
    s.dd_sigma = strain_scale(v.dd_sigma, d0, d, set.eta("dd_sigma"));
    s.dd_pi = strain_scale(v.dd_pi, d0, d, set.eta("dd_pi"));
    s.dd_delta = strain_scale(v.dd_delta, d0, d, set.eta("dd_delta"));
    s.sstar_d_sigma = strain_scale(v.sstar_d_sigma, d0, d, set.eta("sstar_d_sigma"));
    s.d_sstar_sigma = strain_scale(v.d_sstar_sigma, d0, d, set.eta("d_sstar_sigma"));
    return s;
}

} // namespace dotspin::electronic
