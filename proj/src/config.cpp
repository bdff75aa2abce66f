#include <dnsqd/config.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace dnsqd {

namespace {

    std::string trim(std::string_view s)
    {
        const auto first = s.find_first_not_of(" \t\r\n");
        if (first == std::string_view::npos)
            return {};
        const auto last = s.find_last_not_of(" \t\r\n");
        return std::string(s.substr(first, last - first + 1));
    }

    std::size_t to_size(const std::string& key, const std::string& value)
    {
        std::size_t out = 0;
        const auto* end = value.data() + value.size();
        auto [ptr, ec] = std::from_chars(value.data(), end, out);
        if (ec != std::errc() || ptr != end)
            throw ConfigError("'" + key + "' expects a non-negative integer, got '" + value + "'");
        return out;
    }

    double to_double(const std::string& key, const std::string& value)
    {
        double out = 0.;
        const auto* end = value.data() + value.size();
        auto [ptr, ec] = std::from_chars(value.data(), end, out);
        if (ec != std::errc() || ptr != end)
            throw ConfigError("'" + key + "' expects a number, got '" + value + "'");
        return out;
    }

    struct Field {
        std::string key;
        std::function<void(ExperimentConfig&, const std::string&)> set;
        std::function<std::string(const ExperimentConfig&)> get;
    };

    template <typename Get>
    Field size_ref(std::string key, Get get)
    {
        return {key, [key, get](ExperimentConfig& c, const std::string& v) { get(c) = to_size(key, v); },
            [get](const ExperimentConfig& c) { return std::to_string(get(c)); }};
    }

    template <typename Get>
    Field double_ref(std::string key, Get get)
    {
        return {key, [key, get](ExperimentConfig& c, const std::string& v) { get(c) = to_double(key, v); },
            [get](const ExperimentConfig& c) { return format_double(get(c)); }};
    }

    const std::vector<Field>& fields()
    {
        static const std::vector<Field> table = {
            {"task.name", [](ExperimentConfig& c, const std::string& v) { c.task.name = v; }, [](const ExperimentConfig& c) { return c.task.name; }},
            size_ref("task.n_joints", [](auto& c) -> auto& { return c.task.n_joints; }),
            size_ref("task.genome_dim", [](auto& c) -> auto& { return c.task.genome_dim; }),
            {"task.maze", [](ExperimentConfig& c, const std::string& v) { c.task.maze = v; }, [](const ExperimentConfig& c) { return c.task.maze; }},
            size_ref("task.steps", [](auto& c) -> auto& { return c.task.steps; }),
            double_ref("task.step_size", [](auto& c) -> auto& { return c.task.step_size; }),
            size_ref("task.n_samples", [](auto& c) -> auto& { return c.task.n_samples; }),
            {"task.descriptor",
                [](ExperimentConfig& c, const std::string& v) {
                    if (v == "final_position")
                        c.task.descriptor = MazeDescriptor::final_position;
                    else if (v == "trajectory")
                        c.task.descriptor = MazeDescriptor::trajectory;
                    else
                        throw ConfigError("task.descriptor must be final_position or trajectory, got '" + v + "'");
                },
                [](const ExperimentConfig& c) { return std::string(c.task.descriptor == MazeDescriptor::final_position ? "final_position" : "trajectory"); }},
            size_ref("task.latent_dim", [](auto& c) -> auto& { return c.task.latent_dim; }),
            size_ref("task.refit_period", [](auto& c) -> auto& { return c.task.refit_period; }),
            {"algo.name",
                [](ExperimentConfig& c, const std::string& v) {
                    auto a = parse_algorithm(v);
                    if (!a) {
                        std::string valid;
                        for (const auto& n : algorithm_names())
                            valid += (valid.empty() ? "" : ", ") + n;
                        throw ConfigError("unknown algorithm '" + v + "' (valid: " + valid + ")");
                    }
                    c.algorithm = *a;
                },
                [](const ExperimentConfig& c) { return std::string(to_string(c.algorithm)); }},
            size_ref("algo.k", [](auto& c) -> auto& { return c.k; }),
            double_ref("algo.l", [](auto& c) -> auto& { return c.l; }),
            size_ref("algo.k_nov", [](auto& c) -> auto& { return c.k_nov; }),
            size_ref("algo.cells", [](auto& c) -> auto& { return c.cells; }),
            size_ref("algo.cvt_seed", [](auto& c) -> auto& { return c.cvt_seed; }),
            size_ref("run.pop_size", [](auto& c) -> auto& { return c.pop_size; }),
            size_ref("run.batch_size", [](auto& c) -> auto& { return c.variation.batch_size; }),
            size_ref("run.generations", [](auto& c) -> auto& { return c.generations; }),
            size_ref("run.log_interval", [](auto& c) -> auto& { return c.log_interval; }),
            size_ref("run.seed", [](auto& c) -> auto& { return c.seed; }),
            size_ref("run.threads", [](auto& c) -> auto& { return c.threads; }),
            {"variation.operator",
                [](ExperimentConfig& c, const std::string& v) {
                    if (v == "iso_line")
                        c.variation.op = VariationOperator::iso_line;
                    else if (v == "gaussian")
                        c.variation.op = VariationOperator::gaussian;
                    else
                        throw ConfigError("variation.operator must be iso_line or gaussian, got '" + v + "'");
                },
                [](const ExperimentConfig& c) { return std::string(c.variation.op == VariationOperator::iso_line ? "iso_line" : "gaussian"); }},
            double_ref("variation.mutation_sigma", [](auto& c) -> auto& { return c.variation.mutation_sigma; }),
            double_ref("variation.iso_sigma", [](auto& c) -> auto& { return c.variation.iso_sigma; }),
            double_ref("variation.parent_pool_fraction", [](auto& c) -> auto& { return c.variation.parent_pool_fraction; }),
            {"variation.parent_gate",
                [](ExperimentConfig& c, const std::string& v) {
                    if (v == "competition")
                        c.variation.gate = ParentGate::competition_fitness;
                    else if (v == "fitness")
                        c.variation.gate = ParentGate::raw_fitness;
                    else
                        throw ConfigError("variation.parent_gate must be competition or fitness, got '" + v + "'");
                },
                [](const ExperimentConfig& c) { return std::string(c.variation.gate == ParentGate::competition_fitness ? "competition" : "fitness"); }},
            size_ref("metrics.cells", [](auto& c) -> auto& { return c.metric_cells; }),
            size_ref("metrics.seed", [](auto& c) -> auto& { return c.metric_seed; }),
            {"output.dir", [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; }, [](const ExperimentConfig& c) { return c.output_dir; }},
        };
        return table;
    }

    const Field& field(const std::string& key)
    {
        for (const auto& f : fields())
            if (f.key == key)
                return f;
        throw ConfigError("unknown configuration key '" + key + "'");
    }

} // namespace

std::string format_double(double value)
{
    return fmt::format("{}", value);
}

ConfigMap parse_config_text(std::string_view text)
{
    ConfigMap out;
    std::string section;
    std::istringstream in{std::string(text)};
    std::size_t line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::string body = trim(line);
        if (body.empty())
            continue;
        if (body.front() == '[') {
            if (body.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            section = trim(std::string_view(body).substr(1, body.size() - 2));
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        std::string key = trim(std::string_view(body).substr(0, eq));
        if (key.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        if (!section.empty())
            key = section + "." + key;
        out[key] = trim(std::string_view(body).substr(eq + 1));
    }
    return out;
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out;
        for (const auto& f : fields())
            out.push_back(f.key);
        return out;
    }();
    return keys;
}

void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& value)
{
    field(key).set(config, value);
}

void apply_config(ExperimentConfig& config, const ConfigMap& values)
{
    for (const auto& [key, value] : values)
        apply_config_value(config, key, value);
}

std::string config_value(const ExperimentConfig& config, const std::string& key)
{
    return field(key).get(config);
}

std::string render_config(const ExperimentConfig& config)
{
    std::string out;
    for (const auto& f : fields())
        out += f.key + " = " + f.get(config) + "\n";
    return out;
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace dnsqd
