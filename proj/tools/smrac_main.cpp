#include <string>

#include <CLI11.hpp>

#include "smrac/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Switched MRAC simulator with per-subsystem memory stacks"};
    app.require_subcommand(1);

    std::string scenario;
    std::string out_dir = "out";
    int decimate = 0;

    auto* run = app.add_subcommand("run", "simulate a scenario and write trace/report/plot");
    run->add_option("scenario", scenario, "scenario file")->required();
    run->add_option("--out", out_dir, "output directory (default: out)");
    run->add_option("--decimate", decimate, "keep every Nth trace row")
        ->check(CLI::PositiveNumber);

    auto* compare =
        app.add_subcommand("compare", "run memory and baseline estimators and compare");
    compare->add_option("scenario", scenario, "scenario file")->required();
    compare->add_option("--out", out_dir, "output directory (default: out)");

    auto* validate = app.add_subcommand("validate", "check scenario assumptions");
    validate->add_option("scenario", scenario, "scenario file")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return smrac::cmd_run(scenario, out_dir, decimate);
    if (compare->parsed()) return smrac::cmd_compare(scenario, out_dir);
    return smrac::cmd_validate(scenario);
}
