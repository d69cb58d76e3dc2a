#include "vortex/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace vortex::cli
{
namespace
{
using nlohmann::json;

std::string join_problems(const std::vector<std::string>& problems)
{
    std::ostringstream os;
    os << "invalid configuration (" << problems.size() << " problem" << (problems.size() == 1 ? "" : "s") << ")";
    for (const auto& p : problems)
        os << "\n  - " << p;
    return os.str();
}

using Setter = std::function<void(const json&, const std::string&, std::vector<std::string>&)>;

Setter real(double& target)
{
    return [&target](const json& v, const std::string& key, std::vector<std::string>& problems) {
        if (!v.is_number())
        {
            problems.push_back(key + " must be a number");
            return;
        }
        target = v.get<double>();
        if (!std::isfinite(target))
            problems.push_back(key + " must be finite");
    };
}

template<class Int>
Setter integer(Int& target)
{
    return [&target](const json& v, const std::string& key, std::vector<std::string>& problems) {
        if (!v.is_number_integer())
        {
            problems.push_back(key + " must be an integer");
            return;
        }
        if constexpr (std::is_unsigned_v<Int>)
        {
            if (v.is_number_unsigned())
                target = v.get<Int>();
            else
                problems.push_back(key + " must be >= 0");
        }
        else
        {
            const auto wide = v.is_number_unsigned() ? static_cast<long long>(std::min<std::uint64_t>(
                                  v.get<std::uint64_t>(), std::numeric_limits<long long>::max()))
                                                     : v.get<long long>();
            if (std::in_range<Int>(wide))
                target = static_cast<Int>(wide);
            else
                problems.push_back(key + " is out of range");
        }
    };
}

void apply_object(const json& object,
                  const std::string& prefix,
                  const std::map<std::string, Setter>& fields,
                  std::vector<std::string>& problems)
{
    for (const auto& [key, value] : object.items())
    {
        const auto it = fields.find(key);
        if (it == fields.end())
        {
            problems.push_back("unknown key '" + prefix + key + "'");
            continue;
        }
        it->second(value, prefix + key, problems);
    }
}
} // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems))
{
}

RunConfig parse_config(const std::string& json_text)
{
    json doc;
    try
    {
        doc = json::parse(json_text);
    }
    catch (const json::parse_error& e)
    {
        throw ConfigError({std::string("malformed JSON: ") + e.what()});
    }
    if (!doc.is_object())
        throw ConfigError({"top level must be a JSON object"});

    RunConfig c;
    std::vector<std::string> problems;

    const std::map<std::string, Setter> quadrature_fields{
        {"node_count", integer(c.quadrature.node_count)},
        {"abs_tol", real(c.quadrature.abs_tol)},
        {"rel_tol", real(c.quadrature.rel_tol)},
        {"max_refinements", integer(c.quadrature.max_refinements)},
        {"q_node_count", integer(c.q_node_count)},
    };
    const std::map<std::string, Setter> root_fields{
        {"residual_tol", real(c.root_find.residual_tol)},
        {"max_iterations", integer(c.root_find.max_iterations)},
        {"start_grid_density", integer(c.root_find.start_grid_density)},
        {"dedupe_tol", real(c.root_find.dedupe_tol)},
    };
    auto nested = [&problems](const std::map<std::string, Setter>& fields, const std::string& name) -> Setter {
        return [&fields, name, &problems](const json& v, const std::string& key, std::vector<std::string>&) {
            if (!v.is_object())
            {
                problems.push_back(key + " must be an object");
                return;
            }
            apply_object(v, name + ".", fields, problems);
        };
    };

    const std::map<std::string, Setter> fields{
        {"m", integer(c.m)},
        {"theta", real(c.theta)},
        {"kappa0", real(c.kappa0)},
        {"kappa01", real(c.kappa01)},
        {"kappa02", real(c.kappa02)},
        {"sigma_rel", real(c.sigma_rel)},
        {"kz", real(c.kz)},
        {"q", real(c.q)},
        {"m1", integer(c.m1)},
        {"m2", integer(c.m2)},
        {"m1_min", integer(c.m1_min)},
        {"m1_max", integer(c.m1_max)},
        {"m2_min", integer(c.m2_min)},
        {"m2_max", integer(c.m2_max)},
        {"m0_re", real(c.m0_re)},
        {"m0_im", real(c.m0_im)},
        {"quadrature", nested(quadrature_fields, "quadrature")},
        {"root_find", nested(root_fields, "root_find")},
        {"seed", integer(c.seed)},
        {"sample_count", integer(c.sample_count)},
        {"dispersion_threshold", real(c.dispersion_threshold)},
        {"paraxial_factor", real(c.paraxial_factor)},
        {"r_max", real(c.r_max)},
        {"grid_n", integer(c.grid_n)},
        {"threads", integer(c.threads)},
    };
    apply_object(doc, "", fields, problems);
    if (!problems.empty())
        throw ConfigError(std::move(problems));
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError({"cannot read config file '" + path + "'"});
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

//---------------------------------------------------------------------------//

std::vector<std::string> validate(const RunConfig& c, Command command)
{
    std::vector<std::string> problems;
    auto require = [&problems](bool ok, const std::string& message) {
        if (!ok)
            problems.push_back(message);
    };
    constexpr double half_pi = std::numbers::pi / 2;

    require(c.kappa0 > 0, "kappa0 > 0 violated");
    require(c.theta > 0 && c.theta < half_pi, "0 < theta < pi/2 violated");

    switch (command)
    {
        case Command::eval: {
            require(c.kappa01 > 0, "kappa01 > 0 violated");
            require(c.kappa02 > 0, "kappa02 > 0 violated");
            require(c.kz != 0, "kz != 0 violated");
            if (c.kappa0 > 0 && c.theta > 0 && c.theta < half_pi)
            {
                const double bound = c.kappa0 * std::sin(c.theta);
                std::ostringstream msg;
                msg << "|q| < kappa0 * sin(theta) violated: |q| = " << format_shortest(std::abs(c.q))
                    << ", kappa0 * sin(theta) = " << format_shortest(bound);
                require(std::abs(c.q) < bound, msg.str());
            }
            break;
        }
        case Command::oracle_check:
            require(c.sample_count >= 1, "sample_count >= 1 violated");
            require(c.dispersion_threshold >= 0, "dispersion_threshold >= 0 violated");
            require(c.paraxial_factor >= 10, "paraxial_factor >= 10 violated");
            require(c.root_find.residual_tol > 0, "root_find.residual_tol > 0 violated");
            require(c.root_find.max_iterations >= 1, "root_find.max_iterations >= 1 violated");
            require(c.root_find.start_grid_density >= 1, "root_find.start_grid_density >= 1 violated");
            require(c.root_find.dedupe_tol > c.root_find.residual_tol,
                    "root_find.dedupe_tol > root_find.residual_tol violated");
            break;
        case Command::map:
            require(c.kappa01 > 0, "kappa01 > 0 violated");
            require(c.kappa02 > 0, "kappa02 > 0 violated");
            require(c.sigma_rel > 0, "sigma_rel > 0 violated");
            require(c.m1_min <= c.m1_max, "m1_min <= m1_max violated");
            require(c.m2_min <= c.m2_max, "m2_min <= m2_max violated");
            require(c.quadrature.node_count >= 2, "quadrature.node_count >= 2 violated");
            require(c.quadrature.abs_tol >= 0 && c.quadrature.rel_tol >= 0, "quadrature tolerances >= 0 violated");
            require(c.quadrature.abs_tol > 0 || c.quadrature.rel_tol > 0,
                    "quadrature.abs_tol > 0 or quadrature.rel_tol > 0 violated");
            require(c.quadrature.max_refinements >= 1, "quadrature.max_refinements >= 1 violated");
            require(c.q_node_count >= 2 && c.q_node_count % 2 == 0,
                    "quadrature.q_node_count even and >= 2 violated");
            break;
        case Command::field:
            require(c.grid_n >= 2, "grid_n >= 2 violated");
            require(c.r_max > 0, "r_max > 0 violated");
            require(std::abs(c.m) <= kMaxBesselOrder, "|m| <= 200 violated");
            require(c.kappa0 * c.r_max <= kMaxBesselArgument, "kappa0 * r_max <= 1e4 violated");
            break;
    }
    return problems;
}

//---------------------------------------------------------------------------//

std::string format_shortest(double value)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string format_significant(double value, int digits)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, digits);
    return std::string(buf, res.ptr);
}
} // namespace vortex::cli
