#include "rlms_app/report.hpp"

#include <array>
#include <charconv>
#include <fstream>

namespace rlms::app {

RunArtifacts execute(const ScenarioConfig& config, RunOptions options)
{
    RunArtifacts out;
    out.traces = run_monte_carlo(config.scenario, options);
    if (config.sweep) {
        const auto& s = *config.sweep;
        out.sweep = eta_sensitivity_sweep(config.scenario, s.filters,
                                          log_spaced(s.factor_min, s.factor_max, s.points),
                                          s.probe_iteration, options);
        out.probe_iteration = s.probe_iteration;
    }
    return out;
}

std::string format_number(double value)
{
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) {
        throw OutputError("cannot format number");
    }
    return std::string(buf.data(), end);
}

std::string msd_csv(const MsdTrace& trace)
{
    std::string out = "iteration,msd_linear,msd_db,stderr\n";
    out.reserve(out.size() + trace.mean.size() * 64);
    for (std::size_t i = 0; i < trace.mean.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_number(trace.mean[i]);
        out += ',';
        out += format_number(to_db(trace.mean[i]));
        out += ',';
        out += format_number(trace.standard_error[i]);
        out += '\n';
    }
    return out;
}

std::string summary_csv(const std::vector<MsdTrace>& traces)
{
    std::string out = "filter,steady_state_msd_linear,steady_state_msd_db\n";
    for (const auto& t : traces) {
        const double ss = t.steady_state();
        out += t.filter + ',' + format_number(ss) + ',' + format_number(to_db(ss)) + '\n';
    }
    return out;
}

std::string sweep_csv(const SweepResult& sweep, std::size_t probe_iteration)
{
    std::string out = "eta_factor,filter,probe_iteration,msd_linear,msd_db\n";
    for (const auto& p : sweep.points) {
        for (std::size_t f = 0; f < sweep.filters.size(); ++f) {
            out += format_number(p.factor) + ',' + sweep.filters[f] + ',' + std::to_string(probe_iteration) + ','
                 + format_number(p.probe_msd[f]) + ',' + format_number(to_db(p.probe_msd[f])) + '\n';
        }
    }
    return out;
}

std::string msd_file_name(const std::string& filter)
{
    std::string safe = filter;
    for (char& c : safe) {
        const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.'
                     || c == '_' || c == '-';
        if (!ok) {
            c = '_';
        }
    }
    return "msd_" + safe + ".csv";
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.close();
    if (!out) {
        throw OutputError("cannot write " + path.string());
    }
}

} // namespace

std::vector<std::filesystem::path> write_outputs(const std::filesystem::path& dir, const ScenarioConfig& config,
                                                 const RunArtifacts& artifacts)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw OutputError("cannot create output directory " + dir.string()
                          + (ec ? ": " + ec.message() : std::string()));
    }

    std::vector<std::pair<std::filesystem::path, std::string>> files;
    for (const auto& t : artifacts.traces) {
        files.emplace_back(dir / msd_file_name(t.filter), msd_csv(t));
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (files[i].first == files[j].first) {
                throw OutputError("filters map to the same file " + files[i].first.filename().string());
            }
        }
    }
    files.emplace_back(dir / "summary.csv", summary_csv(artifacts.traces));
    if (artifacts.sweep) {
        files.emplace_back(dir / "sweep.csv", sweep_csv(*artifacts.sweep, artifacts.probe_iteration));
    }
    files.emplace_back(dir / "resolved_config.json", serialize_config(config));

    std::vector<std::filesystem::path> written;
    for (const auto& [path, content] : files) {
        write_file(path, content);
        written.push_back(path);
    }
    return written;
}

} // namespace rlms::app
