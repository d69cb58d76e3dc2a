#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vortex/numerics.hpp"
#include "vortex/wavepackets.hpp"

namespace vortex::cli
{
enum ExitCode : int
{
    exit_ok = 0,
    exit_threshold = 1,
    exit_invalid_config = 2,
    exit_degenerate = 3,
    exit_degenerate_oracle = 4,
    exit_quadrature = 5,
};

enum class Command
{
    eval,
    oracle_check,
    map,
    field,
};

//! Every physical and numerical parameter of a run; one JSON document.
struct RunConfig
{
    int m = 5;
    double theta = 0.2;
    double kappa0 = 1;
    double kappa01 = 1;
    double kappa02 = 0.5;
    double sigma_rel = 0.2;
    double kz = 100;  //!< longitudinal momentum of the initial twisted state

    // Single-point evaluation
    double q = 0;
    int m1 = 5;
    int m2 = 0;

    // Map ranges
    int m1_min = -5;
    int m1_max = 15;
    int m2_min = -10;
    int m2_max = 10;

    double m0_re = 1;
    double m0_im = 0;

    QuadratureSpec quadrature = default_map_quadrature();
    int q_node_count = 64;  //!< read from quadrature.q_node_count
    RootFindSpec root_find;

    // Oracle comparison
    std::uint64_t seed = 20240607;
    int sample_count = 1000;
    double dispersion_threshold = 1e-8;
    double paraxial_factor = 100;

    // Field sampling
    double r_max = 10;
    int grid_n = 64;

    unsigned threads = 0;
};

//! Thrown when a configuration is rejected; lists every violated constraint.
class ConfigError : public std::runtime_error
{
  public:
    explicit ConfigError(std::vector<std::string> problems);

    const std::vector<std::string>& problems() const { return problems_; }

  private:
    std::vector<std::string> problems_;
};

//! Parse a JSON document; unknown keys and wrongly typed values are rejected.
RunConfig parse_config(const std::string& json_text);

RunConfig load_config(const std::string& path);

//! Preconditions of a command; empty when the config is acceptable.
std::vector<std::string> validate(const RunConfig& config, Command command);

//---------------------------------------------------------------------------//
// Formatting
//---------------------------------------------------------------------------//

//! Shortest representation that parses back to the same double.
std::string format_shortest(double value);

//! %.{digits}g-style representation.
std::string format_significant(double value, int digits);

//---------------------------------------------------------------------------//
// Commands
//---------------------------------------------------------------------------//

//! Outcome of a command: exit code plus the document to write.
struct CommandResult
{
    int exit_code = exit_ok;
    std::string output;
    std::string message;  //!< diagnostic for stderr, empty on success
};

CommandResult cmd_eval(const RunConfig& config);
CommandResult cmd_oracle_check(const RunConfig& config);
CommandResult cmd_field(const RunConfig& config);

struct MapOutput
{
    CommandResult result;
    std::string plot_script;  //!< empty unless requested
    bool partial = false;     //!< output belongs in <out>.partial
};

//! plot_csv_path names the CSV inside the plot script.
MapOutput cmd_map(const RunConfig& config, const std::optional<std::string>& plot_csv_path = std::nullopt);

//! Map CSV body for an intensity map; m1 outer, 9 significant digits.
std::string map_csv(const IntensityMap& map);

//! gnuplot script drawing one square per cell with area proportional to the intensity.
std::string map_plot_script(const IntensityMap& map, const std::string& csv_path);

/*!
 * Load, validate, run and write. Returns the process exit code; diagnostics
 * go to err. Map failures write <out_path>.partial instead of out_path.
 */
int run(Command command,
        const std::string& config_path,
        const std::string& out_path,
        const std::optional<std::string>& plot_path,
        std::ostream& err);
} // namespace vortex::cli
