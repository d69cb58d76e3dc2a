#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "vortex/cli.hpp"

using vortex::cli::Command;

int main(int argc, char** argv)
{
    CLI::App app{"Triple-twisted scattering: amplitudes, oracle checks, intensity maps, fields"};
    app.require_subcommand(1);

    struct Args
    {
        std::string config;
        std::string out;
        std::string plot;
    } args;

    auto add = [&](const char* name, const char* help) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", args.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", args.out, "output path")->required();
        return sub;
    };
    CLI::App* eval = add("eval", "closed-form amplitude at one configuration (JSON)");
    CLI::App* oracle = add("oracle-check", "brute-force oracle against the closed form (JSON report)");
    CLI::App* map = add("map", "q-integrated (m1, m2) intensity map (CSV)");
    map->add_option("--plot", args.plot, "also write a gnuplot script for the map");
    CLI::App* field = add("field", "transverse field of the initial Bessel mode on a polar grid (CSV)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : vortex::cli::exit_invalid_config;
    }

    Command command = Command::eval;
    if (oracle->parsed())
        command = Command::oracle_check;
    else if (map->parsed())
        command = Command::map;
    else if (field->parsed())
        command = Command::field;
    (void)eval;

    const std::optional<std::string> plot = args.plot.empty() ? std::nullopt : std::optional(args.plot);
    return vortex::cli::run(command, args.config, args.out, plot, std::cerr);
}
