// Copyright 2026 The dotspin Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "dotspin/pipeline.hpp"

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kStageFailure = 2, kIo = 3 };

int run_to(const std::string& config_path, const std::string& last_stage) {
    dotspin::pipeline::RunConfig cfg;
    try {
        cfg = dotspin::pipeline::RunConfig::from_file(config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kIo;
    }
    const auto errors = dotspin::pipeline::validate(cfg);
    if (!errors.empty()) {
        for (const auto& e : errors) std::fprintf(stderr, "invalid: %s\n", e.c_str());
        return kValidation;
    }
    try {
        dotspin::pipeline::run(cfg, last_stage);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "stage failure: %s\n", e.what());
        return kStageFailure;
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dotspin: nuclear-spin environment of a dot-confined electron"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;

    auto* validate_cmd = app.add_subcommand("validate", "check a run configuration");
    validate_cmd->add_option("-c,--config", config_path, "configuration file")
        ->required();

    auto* run_cmd = app.add_subcommand("run", "execute the full pipeline");
    run_cmd->add_option("-c,--config", config_path, "configuration file")->required();

    auto* report_cmd = app.add_subcommand("report", "summarize a finished run");
    report_cmd->add_option("-o,--output", out_dir, "run output directory")->required();

    auto* defaults_cmd =
        app.add_subcommand("defaults", "print the default configuration");

    // single-stage entry points (each runs the pipeline up to that stage)
    std::map<std::string, CLI::App*> stage_cmds;
    for (const auto& stage : dotspin::pipeline::stage_names()) {
        auto* cmd = app.add_subcommand(stage, "run the pipeline up to " + stage);
        cmd->add_option("-c,--config", config_path, "configuration file")->required();
        stage_cmds[stage] = cmd;
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate_cmd->parsed()) {
            dotspin::pipeline::RunConfig cfg;
            try {
                cfg = dotspin::pipeline::RunConfig::from_file(config_path);
            } catch (const std::exception& e) {
                std::fprintf(stderr, "error: %s\n", e.what());
                return kIo;
            }
            const auto errors = dotspin::pipeline::validate(cfg);
            if (errors.empty()) {
                std::printf("configuration is valid\n");
                return kOk;
            }
            for (const auto& e : errors) {
                std::fprintf(stderr, "invalid: %s\n", e.c_str());
            }
            return kValidation;
        }
        if (run_cmd->parsed()) return run_to(config_path, "");
        if (report_cmd->parsed()) {
            dotspin::pipeline::report(out_dir);
            return kOk;
        }
        if (defaults_cmd->parsed()) {
            std::printf("%s\n", dotspin::pipeline::RunConfig::defaults().to_json().c_str());
            return kOk;
        }
        for (const auto& [stage, cmd] : stage_cmds) {
            if (cmd->parsed()) return run_to(config_path, stage);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kStageFailure;
    }
    return kOk;
}
