// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hwy/common/config.hpp"
#include "hwy/common/random.hpp"
#include "hwy/common/seed.hpp"
#include "hwy/data/synth.hpp"
#include "hwy/env/highway_env.hpp"
#include "hwy/harness/commands.hpp"
#include "hwy/harness/experiment.hpp"
#include "hwy/harness/report.hpp"
#include "hwy/idm/idm.hpp"
#include "hwy/intent/intention.hpp"
#include "hwy/nn/network.hpp"
#include "hwy/rl/agent.hpp"
#include "hwy/rl/training.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace hwy;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::vector<double> uniform_vector(Rng& rng, int n, double lo = -1.0, double hi = 1.0) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = rng.uniform(lo, hi);
    return x;
}

// ------------------------------------------------------------------ 1

Outcome gradient_correctness() {
    Rng rng(101);
    const nn::HeadKind heads[] = {nn::HeadKind::plain, nn::HeadKind::duelling};
    const nn::NoisyPlacement placements[] = {nn::NoisyPlacement::none, nn::NoisyPlacement::final_two,
                                             nn::NoisyPlacement::all};
    const nn::Activation acts[] = {nn::Activation::relu, nn::Activation::tanh};
    double worst = 0.0;
    std::size_t checked = 0, skipped = 0;
    for (int n = 0; n < 50; ++n) {
        nn::NetworkSpec spec;
        spec.head = heads[n % 2];
        spec.noisy = placements[(n / 2) % 3];
        spec.activation = acts[(n / 6) % 2];
        spec.input_dim = 3 + static_cast<int>(rng.uniform_int(4));
        spec.hidden.assign(1 + rng.uniform_int(2), 0);
        for (auto& h : spec.hidden) h = 3 + static_cast<int>(rng.uniform_int(5));
        nn::Network net(spec, derive_seed(7, "grad-net", static_cast<std::uint64_t>(n)));
        if (net.has_noisy_layers()) net.sample_noise(rng);
        const auto x = uniform_vector(rng, spec.input_dim);
        const auto up = uniform_vector(rng, 3);
        const auto r = hwy::testing::finite_difference_check(net, x, up, 1e-5);
        worst = std::max(worst, r.max_rel_error);
        checked += r.checked;
        skipped += r.skipped;
    }
    return {worst < 1e-4, "50 nets, " + std::to_string(checked) + " coordinates (" + std::to_string(skipped) +
                              " at kinks skipped), max relative error " + fmt("%.3g", worst)};
}

// ------------------------------------------------------------------ 2

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool bit_equal(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), static_cast<std::size_t>(a.size()) * sizeof(double)) == 0;
}

Outcome variant_degeneracy() {
    Rng rng(202);
    std::vector<std::string> failures;

    nn::NetworkSpec spec;
    spec.input_dim = 6;
    spec.hidden = {16, 16};
    std::vector<rl::Transition> ts;
    for (int i = 0; i < 256; ++i) {
        rl::Transition t;
        t.s.features = uniform_vector(rng, 6);
        t.s_next.features = uniform_vector(rng, 6);
        t.s.layout_version = t.s_next.layout_version = 1;
        t.a = static_cast<int>(rng.uniform_int(3));
        t.r = rng.uniform(-10, 10);
        t.terminal = rng.bernoulli(0.2);
        ts.push_back(t);
    }
    std::vector<const rl::Transition*> batch;
    for (const auto& t : ts) batch.push_back(&t);

    for (int trial = 0; trial < 20; ++trial) {
        const nn::Network net(spec, derive_seed(3, "degeneracy", static_cast<std::uint64_t>(trial)));
        rl::TargetBank bank(1);
        bank.push(net);
        const auto dqn = rl::compute_targets(batch, rl::Variant::dqn, net, bank, 0.95);
        if (!bit_equal(rl::compute_targets(batch, rl::Variant::double_dqn, net, bank, 0.95), dqn)) {
            failures.push_back("double != dqn");
        }
        if (!bit_equal(rl::compute_targets(batch, rl::Variant::averaged, net, bank, 0.95), dqn)) {
            failures.push_back("averaged(K=1) != dqn");
        }
    }

    for (auto placement : {nn::NoisyPlacement::final_two, nn::NoisyPlacement::all}) {
        nn::NetworkSpec ns = spec;
        ns.noisy = placement;
        nn::Network noisy(ns, 5);
        std::vector<nn::Layer> dense_layers;
        for (auto& l : noisy.layers()) {
            if (l.noisy()) {
                l.sigma_w.setZero();
                l.sigma_b.setZero();
            }
            nn::Layer d(nn::LayerKind::dense, l.in(), l.out());
            d.weight = l.weight;
            d.bias = l.bias;
            dense_layers.push_back(d);
        }
        const nn::Network dense(noisy.head(), noisy.activation(), dense_layers);
        for (int i = 0; i < 100; ++i) {
            noisy.sample_noise(rng);
            const auto x = uniform_vector(rng, 6);
            if (!bit_equal(noisy.forward(x), dense.forward(x))) {
                failures.push_back("noisy(sigma=0) != dense");
                break;
            }
        }
    }

    double worst = 0.0;
    bool argmax_ok = true;
    for (int i = 0; i < 10000; ++i) {
        const double v = rng.uniform(-100, 100);
        const auto adv = uniform_vector(rng, 3, -100, 100);
        const auto q = nn::duelling_aggregate(v, adv);
        const double mean_adv = (adv[0] + adv[1] + adv[2]) / 3.0;
        for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(q[k] - (v + adv[k] - mean_adv)));
        worst = std::max(worst, std::abs((q[0] + q[1] + q[2]) / 3.0 - v));
        if (rl::greedy_index(q) != rl::greedy_index(adv)) argmax_ok = false;
    }
    if (worst > 1e-12) failures.push_back("aggregation error " + fmt("%.3g", worst));
    if (!argmax_ok) failures.push_back("argmax(Q) != argmax(advantage)");

    std::string detail = "double/averaged/noisy bitwise, aggregation max error " + fmt("%.3g", worst);
    for (const auto& f : failures) detail += "; " + f;
    return {failures.empty(), detail};
}

// ------------------------------------------------------------------ 3

Outcome tabular_oracle() {
    const auto mdp = hwy::testing::reference_mdp();
    const double gamma = 0.95;
    const auto q_star = hwy::testing::value_iteration(mdp, gamma);
    hwy::testing::TabularEnv env(mdp, 20);

    rl::AgentConfig cfg;
    cfg.variant = rl::Variant::dqn;
    cfg.gamma = gamma;
    cfg.hidden = {32};
    cfg.alpha = 1e-3;
    cfg.batch_size = 32;
    cfg.target_sync_interval = 250;
    cfg.eps_start = 1.0;
    cfg.eps_min = 1.0;  // behaviour is uniformly random; Q-learning is off-policy
    cfg.replay_capacity = 10000;
    rl::Agent agent(cfg, env.observation_size(), 11);

    const std::uint64_t budget = 10000;
    rl::MemoryMetricsSink sink;
    rl::TrainingOptions opts;
    opts.seed = 11;
    opts.episodes = 3000;
    rl::run_training([&](int) -> env::Environment& { return env; }, agent, opts, sink);
    const std::uint64_t steps_used = agent.env_steps();
    double worst = 0.0;
    std::string learned;
    for (int s = 0; s < 2; ++s) {
        const Eigen::VectorXd q = agent.online().forward(hwy::testing::TabularEnv::encode(s).features);
        for (int a = 0; a < 3; ++a) {
            worst = std::max(worst, std::abs(q(a) - q_star[s][a]));
            learned += (a == 0 ? (s == 0 ? "Q = [[" : "], [") : ", ") + fmt("%.4f", q(a));
        }
    }
    learned += "]]";
    return {worst < 1e-2 && steps_used < budget,
            std::to_string(steps_used) + " env steps, " + learned + ", max |Q - Q*| " + fmt("%.3g", worst)};
}

// ------------------------------------------------------------------ 4

Outcome idm_safety() {
    const idm::IdmParams p;
    const int n = 10;
    const double dt = 0.1, length = 5.0;
    std::vector<double> x(n), v(n, 30.0);
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = -i * (30.0 + length);
    double min_gap = 1e9;
    bool contact = false;
    for (int step = 0; step < 600; ++step) {
        std::vector<double> a(n);
        a[0] = v[0] > 0.0 ? -5.0 : 0.0;
        for (std::size_t i = 1; i < static_cast<std::size_t>(n); ++i) {
            const double gap = x[i - 1] - x[i] - length;
            try {
                a[i] = idm::acceleration(v[i], gap, v[i - 1], p);
            } catch (const idm::DegenerateGap&) {
                contact = true;
                a[i] = -p.b_max;
            }
        }
        for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
            const double v_next = std::max(0.0, v[i] + a[i] * dt);
            x[i] += 0.5 * (v[i] + v_next) * dt;
            v[i] = v_next;
        }
        for (std::size_t i = 1; i < static_cast<std::size_t>(n); ++i) min_gap = std::min(min_gap, x[i - 1] - x[i] - length);
    }
    const double eq = idm::free_road_acceleration(p.v_desired, p);
    const bool pass = !contact && min_gap > 0.0 && std::abs(eq) < 1e-3;
    return {pass, "platoon min gap " + fmt("%.3f m", min_gap) + ", free-road |a| at v_desired " + fmt("%.2e", std::abs(eq))};
}

// ------------------------------------------------------------------ 5

Outcome ttlc_equivalence() {
    data::SynthConfig sc;
    sc.vehicle_count = 10;
    sc.spawn_rate = 0.3;
    sc.random_lane_changes = 8;
    sc.cut_in.count = 1;
    std::size_t queries = 0, class_mismatch = 0, changes = 0;
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 100; ++k) {
        const auto ts = data::generate_synthetic(sc, derive_seed(55, "ttlc-track", k));
        for (const auto& v : ts.vehicles) {
            const int first = v.first_frame(), last = v.last_frame();
            for (int f = (first + 9) / 10 * 10; f <= last; f += 10) {
                const auto got = intent::ground_truth_ttlc(ts, v.vehicle_id, f * ts.dt, 5.0);
                const auto want = hwy::testing::brute_force_scan(v, f, 5.0, ts.dt);
                ++queries;
                if (static_cast<int>(got.argmax()) != want.cls) ++class_mismatch;
                if (want.cls != 0) ++changes;
                worst = std::max(worst, std::abs(got.ttlc - want.ttlc));
            }
        }
    }
    return {class_mismatch == 0 && worst <= 1e-9 && changes > 0,
            std::to_string(queries) + " queries (" + std::to_string(changes) + " with a change ahead), " +
                std::to_string(class_mismatch) + " class mismatches, max ttlc error " + fmt("%.3g s", worst)};
}

// ------------------------------------------------------------------ 6

Outcome empty_road_convergence() {
    env::EnvConfig ec;
    env::HighwayEnv env(ec, nullptr);
    env.set_track(std::make_shared<const data::TrackSet>());
    env::SpawnConfig spawn;
    spawn.random = true;
    spawn.lane = -1;
    spawn.x_min = spawn.x_max = 0.0;
    spawn.v_min = spawn.v_max = 25.0;
    env.set_spawn(spawn);

    rl::AgentConfig cfg;
    cfg.variant = rl::Variant::dqn;
    cfg.alpha = 1e-3;
    cfg.eps_decay = 0.99;
    cfg.target_sync_interval = 500;
    rl::Agent agent(cfg, env.observation_size(), 1);
    rl::MemoryMetricsSink sink;
    rl::TrainingOptions opts;
    opts.episodes = 500;
    opts.seed = 1;
    rl::run_training([&](int) -> env::Environment& { return env; }, agent, opts, sink);

    double score = 0.0, lane_changes = 0.0;
    for (std::size_t i = sink.rows.size() - 100; i < sink.rows.size(); ++i) {
        score += sink.rows[i].score;
        lane_changes += sink.rows[i].lane_changes;
    }
    score /= 100.0;
    lane_changes /= 100.0;
    const double target = 0.95 * ec.reward.r_end_of_track;
    return {score >= target && lane_changes < 0.2,
            "final-100 mean score " + fmt("%.3f", score) + " (need >= " + fmt("%.2f", target) +
                "), mean lane changes " + fmt("%.3f", lane_changes)};
}

// ------------------------------------------------------------------ 7

Outcome cut_in_directional() {
    const auto cfg = harness::ExperimentConfig::from_config(Config::load(fs::path(HWY_SOURCE_DIR) / "config/cutin.conf"));
    const auto corpus = harness::generate_corpus(cfg);
    const auto train = harness::select_tracks(corpus, cfg.train_tracks);
    const auto test = harness::select_tracks(corpus, cfg.test_tracks);
    std::map<std::string, std::vector<int>> collisions;
    std::vector<harness::EvalReport> reports;
    for (const auto& arm : cfg.arms) {
        for (auto seed : cfg.seeds) {
            rl::MemoryMetricsSink sink;
            const auto trained = harness::train_arm(cfg, rl::Variant::dqn, arm, seed, train, sink);
            reports.push_back(harness::evaluate_policy(cfg, trained.policy, rl::Variant::dqn, arm, seed, test));
            collisions[arm.name].push_back(reports.back().collisions());
            std::printf("  %s seed %llu: %d collisions in %d runs\n", arm.name.c_str(),
                        static_cast<unsigned long long>(seed), reports.back().collisions(), cfg.eval_runs);
            std::fflush(stdout);
        }
    }
    const auto cmp = harness::compare_reports(reports);
    const auto& base = collisions.at("base");
    const auto& gt = collisions.at("ttlc");
    const auto& degraded = collisions.at("ttlc_degraded");
    int seeds_ok = 0;
    for (std::size_t i = 0; i < base.size(); ++i) seeds_ok += gt[i] <= base[i];
    auto mean = [](const std::vector<int>& v) {
        double s = 0;
        for (int c : v) s += c;
        return s / static_cast<double>(v.size());
    };
    const double mb = mean(base), mg = mean(gt), md = mean(degraded);
    const auto improvement = harness::improvement_percent(mb, mg);
    const bool pass = base.size() == 5 && seeds_ok >= 4 && improvement && *improvement > 0.0 && md <= mb && md >= mg;
    std::string detail = "ttlc <= base on " + std::to_string(seeds_ok) + "/5 seeds; pooled means base " +
                         fmt("%.2f", mb) + ", ttlc " + fmt("%.2f", mg) + ", ttlc_degraded " + fmt("%.2f", md);
    if (improvement) detail += "; ttlc improvement " + fmt("%.2f%%", *improvement);
    std::printf("%s", harness::comparison_table(cmp).c_str());
    return {pass, detail};
}

// ------------------------------------------------------------------ 8

std::map<std::string, std::string> snapshot(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (!e.is_regular_file()) continue;
        std::ifstream f(e.path(), std::ios::binary);
        std::ostringstream s;
        s << f.rdbuf();
        files[fs::relative(e.path(), root).string()] = s.str();
    }
    return files;
}

Outcome pipeline_determinism() {
    const fs::path root = fs::temp_directory_path() / "hwy_acceptance_determinism";
    const fs::path work = root / "work";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path conf = root / "pipeline.conf";
    {
        std::ofstream f(conf);
        f << "data.dir = " << (work / "data").string() << "\n"
          << "data.track_count = 6\ndata.seed = 77\ndata.vehicle_count = 6\ndata.spawn_rate = 0.2\n"
          << "data.cut_in.count = 1\ndata.random_lane_changes = 2\n"
          << "experiment.out_dir = " << (work / "runs").string() << "\n"
          << "experiment.variants = dqn,double,averaged,duelling,noisy\n"
          << "experiment.arms = base,ttlc,ttlc_degraded\n"
          << "experiment.train_tracks = 0-2\nexperiment.test_tracks = 3-5\n"
          << "experiment.episodes = 12\nexperiment.eval_runs = 9\nexperiment.seeds = 1,2\n"
          << "agent.hidden = 16,16\nagent.batch_size = 8\nagent.target_sync_interval = 25\n";
    }
    std::ostringstream out, err;
    harness::CommandOptions o;
    o.config = conf;
    harness::EvaluateOptions ev;
    ev.config = conf;
    harness::CompareOptions cmp;
    cmp.reports = {work / "runs"};
    cmp.out = work / "compare";

    std::vector<std::map<std::string, std::string>> runs;
    for (int rep = 0; rep < 2; ++rep) {
        fs::remove_all(work);
        int rc = harness::cmd_generate(o, out, err);
        if (rc == 0) rc = harness::cmd_train(o, out, err);
        if (rc == 0) rc = harness::cmd_evaluate(ev, out, err);
        if (rc == 0) rc = harness::cmd_compare(cmp, out, err);
        if (rc != 0) return {false, "pipeline exited with " + std::to_string(rc) + ": " + err.str()};
        runs.push_back(snapshot(work));
    }
    fs::remove_all(root);
    std::set<std::string> kinds;
    std::vector<std::string> differing;
    for (const auto& [name, bytes] : runs[0]) {
        kinds.insert(fs::path(name).extension().string());
        auto it = runs[1].find(name);
        if (it == runs[1].end() || it->second != bytes) differing.push_back(name);
    }
    if (runs[0].size() != runs[1].size()) differing.push_back("(file sets differ)");
    const bool covered = kinds.count(".ckpt") && kinds.count(".csv") && kinds.count(".json");
    std::string detail = std::to_string(runs[0].size()) + " files compared, " + std::to_string(differing.size()) +
                         " differ";
    for (const auto& d : differing) detail += " " + d;
    return {differing.empty() && covered, detail};
}

// ------------------------------------------------------------------ 9

Outcome replay_properties() {
    const std::size_t capacity = 100;
    rl::ReplayBuffer buf(capacity);
    for (std::size_t i = 0; i < 3 * capacity; ++i) {
        rl::Transition t;
        t.s.features = {static_cast<double>(i)};
        t.s_next = t.s;
        t.r = static_cast<double>(i);
        buf.push(t);
    }
    bool fifo = buf.size() == capacity;
    for (std::size_t i = 0; i < buf.size(); ++i) fifo = fifo && buf.at(i).r == static_cast<double>(2 * capacity + i);

    Rng rng(909);
    std::vector<double> counts(capacity, 0.0);
    const std::size_t draws = 100000;
    for (auto i : buf.sample_indices(draws, rng)) counts[i] += 1.0;
    const std::vector<double> expected(capacity, static_cast<double>(draws) / capacity);
    const double p = hwy::testing::chi_square_p_value(counts, expected);
    return {fifo && p > 0.01, std::string("FIFO after 3x capacity ") + (fifo ? "exact" : "WRONG") +
                                  ", chi-square p = " + fmt("%.4f", p) + " over 1e5 draws"};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "gradient correctness", gradient_correctness},
        {2, "variant degeneracy", variant_degeneracy},
        {3, "tabular oracle", tabular_oracle},
        {4, "IDM safety", idm_safety},
        {5, "TTLC oracle equivalence", ttlc_equivalence},
        {6, "empty-road convergence", empty_road_convergence},
        {7, "cut-in directional reproduction", cut_in_directional},
        {8, "pipeline determinism", pipeline_determinism},
        {9, "replay buffer properties", replay_properties},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : all) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %d %s: %s (%s; %.1f s)\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                    secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
