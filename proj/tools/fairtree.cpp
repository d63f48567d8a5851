// fairtree: tune decision-tree hyperparameters for accuracy and fairness.
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairtree/error.hpp"
#include "fairtree/experiment.hpp"
#include "fairtree/export.hpp"

namespace {

using namespace fairtree;

std::vector<std::uint64_t> parse_seed_list(const std::string& text)
{
    std::vector<std::uint64_t> seeds;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto const comma = std::min(text.find(',', pos), text.size());
        auto const item = text.substr(pos, comma - pos);
        pos = comma + 1;
        if (item.empty()) {
            continue;
        }
        auto const dash = item.find('-');
        try {
            if (dash == std::string::npos) {
                seeds.push_back(std::stoull(item));
            } else {
                auto const a = std::stoull(item.substr(0, dash));
                auto const b = std::stoull(item.substr(dash + 1));
                if (b < a) {
                    throw ConfigError("empty seed range '" + item + "'");
                }
                for (auto s = a; s <= b; ++s) {
                    seeds.push_back(s);
                }
            }
        } catch (const std::logic_error&) {
            throw ConfigError("bad seed list entry '" + item + "'");
        }
    }
    return seeds;
}

void print_summary(const std::vector<SummaryRow>& rows)
{
    std::cout << "row      err_val  unf_val  err_test unf_test depth    leaves\n";
    for (auto const& r : rows) {
        std::cout << r.label;
        for (std::size_t i = r.label.size(); i < 9; ++i) {
            std::cout << ' ';
        }
        for (double v : {r.error_validation, r.unfairness_validation, r.error_test, r.unfairness_test, r.depth,
                         r.leaves}) {
            std::cout << format_number(v) << "  ";
        }
        std::cout << '\n';
    }
}

void print_results(const std::filesystem::path& dir, const std::vector<SeedResult>& seeds)
{
    std::vector<Front> fronts;
    for (auto const& s : seeds) {
        fronts.push_back(s.front);
    }
    auto rows = summarize_fronts(fronts);
    if (auto c = summarize_compas(seeds)) {
        rows.push_back(*c);
    }
    print_summary(rows);
    std::cout << "outputs in " << dir.string() << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-objective decision-tree tuning for accuracy and fairness"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI or TOML file with option defaults");

    std::string data_dir = FAIRTREE_DATA_DIR;
    app.add_option("--data-dir", data_dir, "Directory holding <dataset>.schema files")
        ->envname("FAIRTREE_DATA_DIR");

    ExperimentConfig cfg;
    std::string schema;
    int seed_count = 10;
    std::string seed_list;
    std::string compas_rule = "text:Medium,High";
    std::string out_dir = "results";
    std::string checkpoint_dir;
    std::string crossover_mode = "blend_when_below_pc";
    std::string mutation_mode = "per_individual";
    bool smoke = false;
    bool no_trees = false;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "Run the evolutionary search over seeds and write all outputs");
    run->add_option("--dataset", cfg.dataset, "Dataset name; loads <data-dir>/<name>.schema")->required();
    run->add_option("--schema", schema, "Explicit schema file (overrides --data-dir lookup)");
    run->add_option("--seeds", seed_count, "Run seeds 1..N")->check(CLI::PositiveNumber);
    run->add_option("--seed-list", seed_list, "Explicit seeds, e.g. 1,4,7-9 (overrides --seeds)");
    run->add_option("--generations,-g", cfg.params.generations, "Generations")->check(CLI::PositiveNumber);
    run->add_option("--population,-n", cfg.params.population, "Population size (even, >= 4)");
    run->add_option("--pc", cfg.params.pc, "Crossover probability")->check(CLI::Range(0.0, 1.0));
    run->add_option("--pm", cfg.params.pm, "Mutation probability")->check(CLI::Range(0.0, 1.0));
    run->add_option("--mu", cfg.params.mu, "Polynomial mutation index");
    run->add_option("--crossover-mode", crossover_mode, "blend_when_below_pc or copy_when_below_pc")
        ->check(CLI::IsMember({"blend_when_below_pc", "copy_when_below_pc"}));
    run->add_option("--mutation-mode", mutation_mode, "per_individual or per_gene")
        ->check(CLI::IsMember({"per_individual", "per_gene"}));
    run->add_option("--out,-o", out_dir, "Output directory");
    run->add_option("--jobs,-j", cfg.jobs, "OpenMP threads for population evaluation")->check(CLI::PositiveNumber);
    run->add_flag("--compas", cfg.compas, "Also score the COMPAS baseline on every partition");
    run->add_option("--compas-rule", compas_rule, "text:<labels> or decile:<min score>");
    run->add_option("--checkpoint", checkpoint_dir, "Save and resume per-seed state in this directory");
    run->add_flag("--smoke", smoke, "Tiny run: 2 generations, population 4, one seed");
    run->add_flag("--no-trees", no_trees, "Skip writing front trees as JSON");
    run->add_flag("--quiet,-q", quiet, "No progress output");

    std::string in_dir;
    std::string dataset_label;
    auto* summarize = app.add_subcommand("summarize", "Recompute reports from a finished output directory");
    summarize->add_option("dir", in_dir, "Output directory of a run")->required();
    summarize->add_option("--dataset", dataset_label, "Label written into summary.csv");
    auto* plot = app.add_subcommand("plot", "Write SVG figures for a finished output directory");
    plot->add_option("dir", in_dir, "Output directory of a run")->required();
    plot->add_option("--dataset", dataset_label, "Title prefix");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            cfg.schema_path = schema.empty() ? std::filesystem::path(data_dir) / (cfg.dataset + ".schema")
                                             : std::filesystem::path(schema);
            cfg.output_dir = out_dir;
            cfg.checkpoint_dir = checkpoint_dir;
            cfg.compas_rule = CompasRule::parse(compas_rule);
            cfg.export_trees = !no_trees;
            cfg.params.crossover_mode = crossover_mode == "copy_when_below_pc" ? CrossoverMode::copy_when_below_pc
                                                                               : CrossoverMode::blend_when_below_pc;
            cfg.params.mutation_mode =
                mutation_mode == "per_gene" ? MutationMode::per_gene : MutationMode::per_individual;
            if (!seed_list.empty()) {
                cfg.seeds = parse_seed_list(seed_list);
            } else {
                for (int s = 1; s <= seed_count; ++s) {
                    cfg.seeds.push_back(static_cast<std::uint64_t>(s));
                }
            }
            if (smoke) {
                cfg.params.generations = 2;
                cfg.params.population = 4;
                cfg.seeds.resize(1);
            }
            auto const result = run_experiment(cfg, quiet ? nullptr : &std::cerr);
            print_results(cfg.output_dir, result.seeds);
        } else {
            auto const seeds = load_results(in_dir);
            auto const label = dataset_label.empty() ? std::filesystem::path(in_dir).filename().string() : dataset_label;
            if (summarize->parsed()) {
                write_reports(in_dir, label, seeds);
                print_results(in_dir, seeds);
            } else {
                write_plots(in_dir, label, seeds);
                std::cout << "figures in " << in_dir << '\n';
            }
        }
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
