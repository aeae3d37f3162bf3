#include "hwy/harness/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hwy/data/synth.hpp"
#include "hwy/data/track_io.hpp"
#include "hwy/harness/experiment.hpp"
#include "hwy/harness/report.hpp"
#include "hwy/nn/checkpoint.hpp"

namespace hwy::harness {
namespace {

template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const rl::TrainingDiverged& e) {
        err << "error: " << e.what() << '\n';
        return kExitDiverged;
    } catch (const LayoutMismatch& e) {
        err << "error: layout mismatch: " << e.what() << '\n';
        return kExitLayout;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const data::InfeasibleConfig& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const MissingBase& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const nn::CheckpointError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const data::MalformedRow& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const data::FrameGap& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const data::OutOfBounds& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

ExperimentConfig load_experiment(const CommandOptions& opts) {
    ExperimentConfig cfg = ExperimentConfig::from_config(Config::load(opts.config));
    if (opts.seed) cfg.seeds = {*opts.seed};
    return cfg;
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace

int cmd_generate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        ExperimentConfig cfg = ExperimentConfig::from_config(Config::load(opts.config));
        if (opts.seed) cfg.data_seed = *opts.seed;
        const auto dir = opts.out ? *opts.out : cfg.data_dir;
        const auto tracks = generate_corpus(cfg);
        write_corpus(cfg, tracks, dir);
        out << "wrote " << tracks.size() << " tracks to " << dir.string() << '\n';
        return kExitOk;
    });
}

int cmd_train(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        ExperimentConfig cfg = load_experiment(opts);
        if (opts.out) cfg.out_dir = *opts.out;
        const auto corpus = load_corpus(cfg, cfg.data_dir);
        const auto train = select_tracks(corpus, cfg.train_tracks);
        ensure_dir(cfg.out_dir);

        nlohmann::json manifest;
        manifest["runs"] = nlohmann::json::array();
        for (auto variant : cfg.variants) {
            for (const auto& arm : cfg.arms) {
                for (auto seed : cfg.seeds) {
                    const auto stem = run_stem(variant, arm, seed);
                    const auto metrics_path = cfg.out_dir / (stem + ".metrics.csv");
                    std::ofstream metrics(metrics_path, std::ios::binary | std::ios::trunc);
                    if (!metrics) throw IoError("cannot write " + metrics_path.string());
                    rl::CsvMetricsSink sink(metrics, config_echo(cfg, variant, arm, seed));
                    const auto trained = train_arm(cfg, variant, arm, seed, train, sink);
                    metrics.flush();
                    if (!metrics) throw IoError("failed writing " + metrics_path.string());
                    nn::save_checkpoint(trained.policy, cfg.out_dir / (stem + ".ckpt"));
                    manifest["runs"].push_back({{"variant", rl::to_string(variant)},
                                                {"arm", arm.name},
                                                {"seed", seed},
                                                {"obs_mode", env::to_string(arm.obs_mode)},
                                                {"obs_dim", trained.policy.input_dim()},
                                                {"episodes", trained.summary.episodes},
                                                {"env_steps", trained.summary.env_steps},
                                                {"checkpoint", stem + ".ckpt"},
                                                {"metrics", stem + ".metrics.csv"}});
                    out << stem << ": " << trained.summary.episodes << " episodes, "
                        << trained.summary.env_steps << " steps\n";
                }
            }
        }
        std::ofstream f(cfg.out_dir / "train_manifest.json", std::ios::trunc);
        if (!f) throw IoError("cannot write train manifest");
        f << manifest.dump(2) << '\n';
        return kExitOk;
    });
}

int cmd_evaluate(const EvaluateOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        ExperimentConfig cfg = load_experiment(opts);
        if (opts.out) cfg.out_dir = *opts.out;
        const auto corpus = load_corpus(cfg, cfg.data_dir);
        const auto test = select_tracks(corpus, cfg.test_tracks);

        auto evaluate_one = [&](const std::filesystem::path& ckpt, rl::Variant variant, const ArmSpec& arm,
                                std::uint64_t seed, const std::filesystem::path& dir) {
            const nn::Network net = nn::load_checkpoint(ckpt);
            const auto rep = evaluate_policy(cfg, net, variant, arm, seed, test);
            const auto stem = run_stem(variant, arm, seed);
            write_report(rep, dir, stem);
            out << stem << ": " << rep.collisions() << " collisions in " << rep.runs.size() << " runs\n";
        };

        if (opts.checkpoint) {
            ArmSpec arm;
            if (!opts.arm.empty()) {
                arm = arm_from_name(opts.arm);
            } else if (cfg.arms.size() == 1) {
                arm = cfg.arms.front();
            } else {
                throw ConfigError("--arm is required when the config lists several arms");
            }
            const auto variant = opts.variant.empty() ? cfg.variants.front() : rl::parse_variant(opts.variant);
            const auto dir = opts.out ? *opts.out : opts.checkpoint->parent_path();
            evaluate_one(*opts.checkpoint, variant, arm, cfg.seeds.front(), dir.empty() ? "." : dir);
            return kExitOk;
        }
        for (auto variant : cfg.variants) {
            for (const auto& arm : cfg.arms) {
                for (auto seed : cfg.seeds) {
                    evaluate_one(cfg.out_dir / (run_stem(variant, arm, seed) + ".ckpt"), variant, arm, seed,
                                 cfg.out_dir);
                }
            }
        }
        return kExitOk;
    });
}

int cmd_compare(const CompareOptions& opts, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        std::vector<std::filesystem::path> files;
        for (const auto& p : opts.reports) {
            if (std::filesystem::is_directory(p)) {
                std::vector<std::filesystem::path> found;
                for (const auto& e : std::filesystem::directory_iterator(p)) {
                    const auto name = e.path().filename().string();
                    if (name.size() > 12 && name.ends_with(".report.json")) found.push_back(e.path());
                }
                std::sort(found.begin(), found.end());
                files.insert(files.end(), found.begin(), found.end());
            } else {
                files.push_back(p);
            }
        }
        if (files.size() < 2) throw ConfigError("compare needs at least two reports");
        std::vector<EvalReport> reports;
        for (const auto& f : files) reports.push_back(read_report(f));
        const auto cmp = compare_reports(reports);
        const auto table = comparison_table(cmp);
        for (const auto& w : cmp.warnings) err << "warning: " << w << '\n';
        out << table;
        if (opts.out) {
            ensure_dir(*opts.out);
            std::ofstream csv(*opts.out / "comparison.csv", std::ios::binary | std::ios::trunc);
            std::ofstream txt(*opts.out / "comparison.txt", std::ios::binary | std::ios::trunc);
            if (!csv || !txt) throw IoError("cannot write comparison into " + opts.out->string());
            csv << comparison_csv(cmp);
            txt << table;
        }
        return kExitOk;
    });
}

int cmd_print_obs_layout(const std::string& mode, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        out << env::observation_layout_csv(env::parse_obs_mode(mode));
        return kExitOk;
    });
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Lane-change decision experiments on replayed highway traffic"};
    app.require_subcommand(0, 1);

    std::string layout_mode;
    app.add_option("--print-obs-layout", layout_mode, "Print the observation layout (base or ttlc) and exit");

    CommandOptions common;
    std::uint64_t seed = 0;
    std::string out_dir;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "Experiment config file")->required();
        sub->add_option("--seed", seed, "Override the seed list (data seed for generate)");
        sub->add_option("--out", out_dir, "Output directory");
    };

    auto* gen = app.add_subcommand("generate", "Write a synthetic track corpus and manifest");
    add_common(gen);
    auto* train = app.add_subcommand("train", "Train every configured variant, arm and seed");
    add_common(train);

    EvaluateOptions eval_opts;
    std::string checkpoint;
    auto* eval = app.add_subcommand("evaluate", "Greedy evaluation on the test split");
    add_common(eval);
    eval->add_option("--checkpoint", checkpoint, "Evaluate a single checkpoint");
    eval->add_option("--arm", eval_opts.arm, "Arm of the single checkpoint");
    eval->add_option("--variant", eval_opts.variant, "Variant label of the single checkpoint");

    CompareOptions cmp_opts;
    std::vector<std::string> report_paths;
    std::string cmp_out;
    auto* cmp = app.add_subcommand("compare", "Collision comparison against the base arm");
    cmp->add_option("reports", report_paths, "Report JSON files or directories")->required();
    cmp->add_option("--out", cmp_out, "Directory for comparison.csv");

    std::string mode = "base";
    auto* layout = app.add_subcommand("print-obs-layout", "Print the observation feature layout");
    layout->add_option("--mode", mode, "base or ttlc");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (!layout_mode.empty()) return cmd_print_obs_layout(layout_mode, std::cout, std::cerr);
    if (gen->count() || train->count() || eval->count()) {
        if (gen->get_option("--seed")->count() || train->get_option("--seed")->count() ||
            eval->get_option("--seed")->count()) {
            common.seed = seed;
        }
        if (!out_dir.empty()) common.out = out_dir;
    }
    if (gen->parsed()) return cmd_generate(common, std::cout, std::cerr);
    if (train->parsed()) return cmd_train(common, std::cout, std::cerr);
    if (eval->parsed()) {
        static_cast<CommandOptions&>(eval_opts) = common;
        if (!checkpoint.empty()) eval_opts.checkpoint = checkpoint;
        return cmd_evaluate(eval_opts, std::cout, std::cerr);
    }
    if (cmp->parsed()) {
        for (const auto& p : report_paths) cmp_opts.reports.emplace_back(p);
        if (!cmp_out.empty()) cmp_opts.out = cmp_out;
        return cmd_compare(cmp_opts, std::cout, std::cerr);
    }
    if (layout->parsed()) return cmd_print_obs_layout(mode, std::cout, std::cerr);
    std::cerr << app.help();
    return kExitConfig;
}

}  // namespace hwy::harness
