#include <mbps/harness/curves.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include <mbps/harness/experiment.hpp>

namespace mbps::harness {

namespace fs = std::filesystem;
using nlohmann::json;

double percentile(std::vector<double> values, double p)
{
    if (values.empty())
        throw std::invalid_argument("percentile: empty sample");
    std::sort(values.begin(), values.end());
    const double pos = (p / 100.0) * (values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - lo;
    return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<std::string> emit_curves(const std::string& results_dir)
{
    if (!fs::is_directory(results_dir))
        throw std::runtime_error("emit_curves: no such directory: " + results_dir);

    struct Group {
        std::vector<std::vector<double>> best_curves; // per replicate
        double episode_seconds = 2.5;
    };
    std::map<std::string, Group> groups;

    for (const auto& group_entry : fs::directory_iterator(results_dir)) {
        if (!group_entry.is_directory())
            continue;
        const std::string group = group_entry.path().filename().string();
        for (const auto& rep_entry : fs::directory_iterator(group_entry.path())) {
            const fs::path results = rep_entry.path() / "results.json";
            if (!fs::is_regular_file(results))
                continue;
            std::ifstream is(results);
            json j = json::parse(is);
            if (j.value("failed", true))
                continue;
            std::vector<double> curve;
            for (const auto& e : j.at("episodes"))
                curve.push_back(e.at("best_so_far").get<double>());
            if (curve.empty())
                continue;
            auto& g = groups[group];
            if (j.contains("interaction_seconds") && !j.at("episodes").empty())
                g.episode_seconds = j.at("interaction_seconds").get<double>()
                    / j.at("episodes").size();
            g.best_curves.push_back(std::move(curve));
        }
    }

    if (groups.empty())
        throw std::runtime_error(
            "emit_curves: no completed runs under " + results_dir);

    fs::create_directories(fs::path(results_dir) / "curves");
    std::vector<std::string> written;
    for (auto& [name, g] : groups) {
        std::size_t episodes = g.best_curves.front().size();
        for (const auto& c : g.best_curves)
            episodes = std::min(episodes, c.size());

        const std::string path
            = (fs::path(results_dir) / "curves" / (name + ".csv")).string();
        std::ofstream os(path);
        os << "episode,interaction_s,median,p25,p75\n";
        char buf[160];
        for (std::size_t ep = 0; ep < episodes; ++ep) {
            std::vector<double> at;
            at.reserve(g.best_curves.size());
            for (const auto& c : g.best_curves)
                at.push_back(c[ep]);
            std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g\n",
                ep + 1, (ep + 1) * g.episode_seconds, percentile(at, 50.0),
                percentile(at, 25.0), percentile(at, 75.0));
            os << buf;
        }
        written.push_back(path);
    }
    return written;
}

} // namespace mbps::harness
