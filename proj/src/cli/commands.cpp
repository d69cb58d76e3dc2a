#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "vortex/amplitudes.hpp"
#include "vortex/cli.hpp"
#include "vortex/kinematics.hpp"
#include "vortex/oracle.hpp"

namespace vortex::cli
{
namespace
{
using ordered_json = nlohmann::ordered_json;

ordered_json number_or_null(double v)
{
    if (!std::isfinite(v))
        return nullptr;
    return v;
}

std::string dump(const ordered_json& doc)
{
    return doc.dump(2) + "\n";
}

CollisionGeometry point_geometry(const RunConfig& c)
{
    CollisionGeometry g;
    g.theta = c.theta;
    g.q = c.q;
    g.initial = TwistedState::on_shell(c.kappa0, c.m, c.kz);
    g.kappa1 = c.kappa01;
    g.kappa2 = c.kappa02;
    return g;
}

bool write_file(const std::string& path, const std::string& text, std::ostream& err)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
    {
        err << "error: cannot open '" << path << "' for writing\n";
        return false;
    }
    out << text;
    return static_cast<bool>(out);
}
} // namespace

//---------------------------------------------------------------------------//

CommandResult cmd_eval(const RunConfig& c)
{
    const CollisionGeometry geom = point_geometry(c);
    const AmplitudeModel model{{c.m0_re, c.m0_im}};
    const AngleSet angles = angle_set(geom);
    const TriangleGeometry tri = triangle_geometry(geom.initial.kappa, angles.xi, geom.kappa1, geom.kappa2);

    CommandResult result;
    ReducedAmplitude amp;
    try
    {
        amp = reduced_triple_amplitude(geom, c.m, c.m1, c.m2, model);
    }
    catch (const DegenerateError& e)
    {
        result.exit_code = exit_degenerate;
        result.message = e.what();
        return result;
    }

    const bool triangle = tri.status != TriangleStatus::outside;
    ordered_json doc;
    doc["value_re"] = amp.value.real();
    doc["value_im"] = amp.value.imag();
    doc["phase_power"] = amp.phase_power;
    doc["in_support"] = amp.in_support;
    doc["xi"] = angles.xi;
    doc["phi_star"] = angles.phi_star;
    doc["phi_tilde_star"] = angles.phi_tilde_star;
    doc["area"] = triangle ? number_or_null(tri.area) : nullptr;
    doc["delta1"] = triangle ? number_or_null(tri.delta1) : nullptr;
    doc["delta2"] = triangle ? number_or_null(tri.delta2) : nullptr;
    result.output = dump(doc);
    return result;
}

CommandResult cmd_oracle_check(const RunConfig& c)
{
    std::mt19937_64 rng(c.seed);
    std::vector<ComparisonSample> samples;
    samples.reserve(static_cast<std::size_t>(c.sample_count));
    for (int i = 0; i < c.sample_count; ++i)
        samples.push_back(draw_comparison_sample(rng));

    OracleOptions options;
    options.paraxial_factor = c.paraxial_factor;
    const ComparisonReport report = compare_with_closed_form(samples, c.root_find, options);

    const bool passed = !report.samples.empty() && report.dispersion < c.dispersion_threshold;
    ordered_json doc;
    doc["seed"] = c.seed;
    doc["sample_count"] = c.sample_count;
    doc["compared"] = report.samples.size();
    doc["reference_ratio_re"] = report.reference_ratio.real();
    doc["reference_ratio_im"] = report.reference_ratio.imag();
    doc["mean_ratio_re"] = report.mean_ratio.real();
    doc["mean_ratio_im"] = report.mean_ratio.imag();
    doc["dispersion"] = report.dispersion;
    doc["dispersion_threshold"] = c.dispersion_threshold;
    doc["max_relative_deviation"] = report.max_relative_deviation;
    doc["low_theta_deviation"] = report.low_theta_deviation;
    doc["high_theta_deviation"] = report.high_theta_deviation;
    doc["k_doubling_change"] = report.k_doubling_change;
    doc["passed"] = passed;
    doc["degenerate_samples"] = report.degenerate_samples;
    ordered_json rows = ordered_json::array();
    for (const auto& s : report.samples)
    {
        ordered_json row;
        row["index"] = s.index;
        row["ratio_re"] = s.ratio.real();
        row["ratio_im"] = s.ratio.imag();
        row["relative_deviation"] = s.relative_deviation;
        row["solution_count"] = s.solution_count;
        rows.push_back(std::move(row));
    }
    doc["samples"] = std::move(rows);

    CommandResult result;
    result.output = dump(doc);
    if (!report.degenerate_samples.empty())
    {
        result.exit_code = exit_degenerate_oracle;
        result.message = std::to_string(report.degenerate_samples.size())
                         + " sample(s) with a singular oracle Jacobian were excluded";
    }
    else if (!passed)
    {
        result.exit_code = exit_threshold;
        result.message = "ratio dispersion " + format_shortest(report.dispersion) + " not below threshold "
                         + format_shortest(c.dispersion_threshold);
    }
    return result;
}

CommandResult cmd_field(const RunConfig& c)
{
    const TwistedState state = TwistedState::on_shell(c.kappa0, c.m, c.kz);
    std::ostringstream os;
    os << "r,phi,re,im\n";
    for (int i = 0; i < c.grid_n; ++i)
    {
        const double r = c.r_max * i / (c.grid_n - 1);
        for (int j = 0; j < c.grid_n; ++j)
        {
            const double phi = 2 * std::numbers::pi * j / c.grid_n;
            const std::complex<double> v = field_amplitude(state, r, phi);
            os << format_shortest(r) << ',' << format_shortest(phi) << ',' << format_shortest(v.real()) << ','
               << format_shortest(v.imag()) << '\n';
        }
    }
    return {exit_ok, os.str(), {}};
}

//---------------------------------------------------------------------------//

std::string map_csv(const IntensityMap& map)
{
    std::ostringstream os;
    os << "m1,m2,intensity\n";
    for (int m1 = map.m1_range.lo; m1 <= map.m1_range.hi; ++m1)
        for (int m2 = map.m2_range.lo; m2 <= map.m2_range.hi; ++m2)
            os << m1 << ',' << m2 << ',' << format_significant(map.at(m1, m2), 9) << '\n';
    return os.str();
}

std::string map_plot_script(const IntensityMap& map, const std::string& csv_path)
{
    const MapMetadata& md = map.metadata;
    std::ostringstream os;
    os << "# relative intensity, m = " << md.m << ", theta = " << format_shortest(md.theta)
       << "; square area proportional to intensity\n"
       << "set datafile separator ','\n"
       << "set size ratio -1\n"
       << "set xrange [" << map.m2_range.lo - 1 << ':' << map.m2_range.hi + 1 << "]\n"
       << "set yrange [" << map.m1_range.lo - 1 << ':' << map.m1_range.hi + 1 << "]\n"
       << "set xtics 1\nset ytics 1\nset grid front\n"
       << "set xlabel 'm_2'\nset ylabel 'm_1'\n"
       << "set style fill solid 1.0 noborder\n"
       << "plot '" << csv_path << "' every ::1 using 2:1:(0.5*sqrt($3)):(0.5*sqrt($3)) "
       << "with boxxyerror lc rgb '#303030' notitle\n";
    return os.str();
}

MapOutput cmd_map(const RunConfig& c, const std::optional<std::string>& plot_csv_path)
{
    const PacketProfiles profiles = PacketProfiles::from_peaks(c.kappa0, c.kappa01, c.kappa02, c.sigma_rel);
    CollisionGeometry geom;
    geom.theta = c.theta;
    MapOptions options;
    options.q_node_count = c.q_node_count;
    options.threads = c.threads;
    const IntensityMap map = intensity_map(profiles, geom, c.m, {c.m1_min, c.m1_max}, {c.m2_min, c.m2_max},
                                           c.quadrature, options, AmplitudeModel{{c.m0_re, c.m0_im}});

    MapOutput out;
    out.result.output = map_csv(map);
    if (plot_csv_path)
        out.plot_script = map_plot_script(map, *plot_csv_path);
    if (!map.converged())
    {
        std::ostringstream msg;
        msg << map.failures.size() << " cell(s) missed the quadrature tolerance after "
            << map.metadata.refinements << " refinement(s)";
        for (const auto& f : map.failures)
            msg << "\n  (m1, m2) = (" << f.m1 << ", " << f.m2 << "): " << format_significant(f.coarse, 9)
                << " -> " << format_significant(f.fine, 9);
        out.result.exit_code = exit_quadrature;
        out.result.message = msg.str();
        out.partial = true;
    }
    return out;
}

//---------------------------------------------------------------------------//

int run(Command command,
        const std::string& config_path,
        const std::string& out_path,
        const std::optional<std::string>& plot_path,
        std::ostream& err)
{
    RunConfig config;
    try
    {
        config = load_config(config_path);
    }
    catch (const ConfigError& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_invalid_config;
    }
    if (const auto problems = validate(config, command); !problems.empty())
    {
        err << "error: " << ConfigError(problems).what() << '\n';
        return exit_invalid_config;
    }

    try
    {
        CommandResult result;
        std::string target = out_path;
        switch (command)
        {
            case Command::eval: result = cmd_eval(config); break;
            case Command::oracle_check: result = cmd_oracle_check(config); break;
            case Command::field: result = cmd_field(config); break;
            case Command::map: {
                MapOutput map = cmd_map(config, plot_path ? std::optional<std::string>(out_path) : std::nullopt);
                result = std::move(map.result);
                if (map.partial)
                    target = out_path + ".partial";
                else if (plot_path && !write_file(*plot_path, map.plot_script, err))
                    return exit_invalid_config;
                break;
            }
        }
        if (!result.output.empty() && !write_file(target, result.output, err))
            return exit_invalid_config;
        if (!result.message.empty())
            err << (result.exit_code == exit_ok ? "" : "error: ") << result.message << '\n';
        return result.exit_code;
    }
    catch (const DegenerateError& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_degenerate;
    }
    catch (const ConvergenceError& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_quadrature;
    }
    catch (const Error& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_invalid_config;
    }
}
} // namespace vortex::cli
