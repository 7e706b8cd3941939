#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ringsfwm/commands.hpp"
#include "ringsfwm/config.hpp"

namespace {

std::vector<double> parse_ratio_list(const std::string& csv) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const auto comma = csv.find(',', pos);
        const std::string item =
            csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!item.empty())
            out.push_back(ringsfwm::detail::parse_double("ratios", item));
        if (comma == std::string::npos)
            break;
        pos = comma + 1;
    }
    if (out.empty())
        throw ringsfwm::ConfigError("ratio list is empty");
    return out;
}

void print_files(const std::vector<std::string>& files) {
    for (const auto& f : files)
        std::printf("wrote %s\n", f.c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled-ring photon-pair source: delay curves, joint spectra and "
                 "pump-width optimization"};
    app.require_subcommand(1);
    app.fallthrough(); // --config/--out may follow the subcommand

    std::string config_path, out_dir = ".", ratio_csv;
    bool heatmap = false;
    app.add_option("--config", config_path, "key = value config file");
    app.add_option("--out", out_dir, "output directory (default .)");

    auto* sub_delay = app.add_subcommand("delay", "relative delay curves around g_opt");
    auto* sub_jsa = app.add_subcommand("jsa", "joint spectral intensity and metadata");
    sub_jsa->add_flag("--heatmap", heatmap, "also write an SVG heatmap");
    auto* sub_optimize = app.add_subcommand("optimize", "pump-width optimization per ratio");
    sub_optimize->add_option("--ratios", ratio_csv, "comma-separated kappa_p/kappa_is list");
    auto* sub_reproduce =
        app.add_subcommand("reproduce", "delay + optimization + reference JSIs with a "
                                        "pass/fail report");
    sub_reproduce->add_flag("--heatmap", heatmap, "also write SVG heatmaps");

    CLI11_PARSE(app, argc, argv);

    try {
        ringsfwm::RunConfig config = config_path.empty()
                                         ? ringsfwm::RunConfig{}
                                         : ringsfwm::load_config_file(config_path);
        config.out_dir = out_dir;
        config.heatmap = heatmap;
        if (!ratio_csv.empty())
            config.ratios = parse_ratio_list(ratio_csv);

        if (sub_delay->parsed()) {
            print_files(ringsfwm::cmd_delay(config));
        } else if (sub_jsa->parsed()) {
            print_files(ringsfwm::cmd_jsa(config));
        } else if (sub_optimize->parsed()) {
            print_files(ringsfwm::cmd_optimize(config));
        } else if (sub_reproduce->parsed()) {
            const auto outcome = ringsfwm::cmd_reproduce(config);
            print_files(outcome.files);
            if (!outcome.all_pass) {
                std::fprintf(stderr, "reproduce: one or more comparisons failed\n");
                return 2;
            }
        }
    } catch (const ringsfwm::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
