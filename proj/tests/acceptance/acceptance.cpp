// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cpnet/cpnet.hpp"
#include "oracles.hpp"

using namespace cpnet;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

CorrelationMatrix corr_of(const Eigen::MatrixXd& m) {
    CorrelationMatrix c;
    for (Eigen::Index i = 0; i < m.rows(); ++i) c.symbols.push_back("S" + std::to_string(i));
    c.coefficients = m;
    return c;
}

std::set<std::pair<std::size_t, std::size_t>> edge_set(const oracle::EdgeList& e) {
    std::set<std::pair<std::size_t, std::size_t>> s;
    for (auto [u, v] : e) s.emplace(std::min(u, v), std::max(u, v));
    return s;
}

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// 1 ------------------------------------------------------------------------

Outcome pmfg_validity() {
    std::mt19937_64 rng(101);
    Outcome o;
    double t100 = 0.0;
    int bad = 0;
    for (std::size_t n : {10u, 20u, 50u, 100u})
        for (int k = 0; k < 50; ++k) {
            auto m = oracle::random_correlation(n, rng);
            auto t0 = Clock::now();
            auto g = build_pmfg(corr_of(m)).graph;
            if (n == 100) t100 += seconds_since(t0);
            auto edges = oracle::edge_list(g);
            auto have = edge_set(edges);
            auto mst = edge_set(oracle::maximum_spanning_tree(m));
            bool ok = g.size() == 3 * (n - 2) && oracle::boyer_myrvold_planar(n, edges) &&
                      std::includes(have.begin(), have.end(), mst.begin(), mst.end());
            bad += !ok;
        }
    o.pass = bad == 0 && t100 <= 10.0;
    o.detail = std::to_string(200 - bad) + "/200 valid, N=100 total " + fmt("%.2f s", t100);
    return o;
}

// 2 ------------------------------------------------------------------------

Outcome pmfg_k5_oracle() {
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int ok = 0;
    for (int k = 0; k < 100; ++k) {
        Eigen::MatrixXd w = Eigen::MatrixXd::Identity(5, 5);
        std::set<double> seen;
        for (int i = 0; i < 5; ++i)
            for (int j = i + 1; j < 5; ++j) {
                double x;
                do x = u(rng);
                while (!seen.insert(x).second);
                w(i, j) = w(j, i) = x;
            }
        auto brute = edge_set(oracle::greedy_planar_filter(w, oracle::small_graph_planar));
        std::pair<std::size_t, std::size_t> weakest{0, 1};
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = i + 1; j < 5; ++j)
                if (w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) <
                    w(static_cast<Eigen::Index>(weakest.first), static_cast<Eigen::Index>(weakest.second)))
                    weakest = {i, j};
        auto got = edge_set(oracle::edge_list(build_pmfg(corr_of(w)).graph));
        ok += got == brute && got.size() == 9 && !got.count(weakest);
    }
    return {ok == 100, std::to_string(ok) + "/100 draws equal K5 minus its weakest edge"};
}

// 3 ------------------------------------------------------------------------

Outcome rossa_closed_forms() {
    double worst = 0.0;
    for (std::size_t n = 4; n <= 10; ++n) {
        oracle::EdgeList star, full;
        for (std::size_t i = 1; i < n; ++i) star.emplace_back(0, i);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) full.emplace_back(i, j);
        auto ps = rossa_profile(oracle::make_graph(n, star));
        auto pk = rossa_profile(oracle::make_graph(n, full));
        for (std::size_t k = 0; k < n; ++k) {
            worst = std::max(worst, std::abs(ps.phi[k] - (k + 1 == n ? 1.0 : 0.0)));
            worst = std::max(worst, std::abs(pk.phi[k] - static_cast<double>(k) / static_cast<double>(n - 1)));
        }
        worst = std::max(worst, std::abs(cp_centralization(ps) - 1.0));
        worst = std::max(worst, std::abs(cp_centralization(pk)));
    }

    // greedy minimality on 50 sampled connected graphs with at most 6 vertices
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<std::pair<std::size_t, oracle::EdgeList>> pool;
    for (std::size_t n = 3; n <= 6; ++n)
        for (auto& e : oracle::connected_graphs(n)) pool.emplace_back(n, std::move(e));
    int minimal = 0;
    for (int s = 0; s < 50; ++s) {
        const auto& [n, edges] = pool[rng() % pool.size()];
        std::vector<double> w;
        for (std::size_t k = 0; k < edges.size(); ++k) w.push_back(u(rng));
        auto g = oracle::make_graph(n, edges, w);
        auto a = oracle::adjacency(g);
        auto p = rossa_profile(g);
        Eigen::VectorXd strength = a.rowwise().sum();
        bool ok = std::abs(strength(static_cast<Eigen::Index>(p.order[0])) - strength.minCoeff()) <= 1e-12;
        std::vector<std::size_t> set{p.order[0]};
        for (std::size_t k = 1; k < n && ok; ++k) {
            double best = 2.0;
            for (std::size_t v = 0; v < n; ++v) {
                if (std::find(set.begin(), set.end(), v) != set.end()) continue;
                auto t = set;
                t.push_back(v);
                best = std::min(best, oracle::persistence(a, t));
            }
            set.push_back(p.order[k]);
            ok = std::abs(oracle::persistence(a, set) - best) <= 1e-12;
        }
        minimal += ok;
    }
    return {worst <= 1e-12 && minimal == 50,
            "max closed-form error " + fmt("%.1e", worst) + ", greedy-minimal " + std::to_string(minimal) + "/50"};
}

// 4 ------------------------------------------------------------------------

// True when every strict order in `oracle_cs` (gap above tol) holds in `cs`.
bool same_ranking(const std::vector<double>& oracle_cs, const std::vector<double>& cs, double tol) {
    for (std::size_t i = 0; i < cs.size(); ++i)
        for (std::size_t j = 0; j < cs.size(); ++j)
            if (oracle_cs[i] > oracle_cs[j] + tol && !(cs[i] > cs[j])) return false;
    return true;
}

std::vector<double> exhaustive_scores(const WeightedGraph& g, std::size_t samples, std::uint64_t seed) {
    // Independent of the library's sampler: fresh (alpha, beta) grid, brute-force best permutations.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto a = oracle::adjacency(g);
    const std::size_t n = g.order();
    std::vector<double> acc(n, 0.0);
    for (std::size_t k = 0; k < samples; ++k) {
        auto ladder = rombach_ladder(n, unit(rng), unit(rng));
        std::sort(ladder.begin(), ladder.end());
        double best = oracle::best_quality(a, ladder);
        std::vector<double> mean(n, 0.0);
        int ties = 0;
        do {
            Eigen::Map<const Eigen::VectorXd> c(ladder.data(), static_cast<Eigen::Index>(n));
            if (std::abs(c.dot(a * c) - best) <= 1e-12 * std::max(1.0, best)) {
                ++ties;
                for (std::size_t i = 0; i < n; ++i) mean[i] += ladder[i];
            }
        } while (std::next_permutation(ladder.begin(), ladder.end()));
        for (std::size_t i = 0; i < n; ++i) acc[i] += mean[i] / ties * best;
    }
    double top = *std::max_element(acc.begin(), acc.end());
    for (auto& x : acc) x /= top;
    return acc;
}

Outcome rombach_oracle() {
    std::mt19937_64 rng(104);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::pair<std::size_t, oracle::EdgeList>> pool;
    for (std::size_t n = 3; n <= 5; ++n)
        for (auto& e : oracle::connected_graphs(n)) pool.emplace_back(n, std::move(e));
    int match = 0, total = 0;
    for (int s = 0; s < 30; ++s) {
        const auto& [n, edges] = pool[rng() % pool.size()];
        auto g = oracle::make_graph(n, edges);
        RombachQuality q(g);
        auto a = oracle::adjacency(g);
        for (int k = 0; k < 20; ++k, ++total) {
            auto ladder = rombach_ladder(n, unit(rng), unit(rng));
            auto sol = rombach_anneal(q, ladder, rng);
            double best = oracle::best_quality(a, ladder);
            match += std::abs(sol.quality - best) <= 1e-9 * std::max(1.0, best);
        }
    }
    const double rate = static_cast<double>(match) / total;

    // path, star and barbell fixtures: annealed scores vs brute-force scores
    std::vector<std::pair<std::string, WeightedGraph>> fixtures;
    fixtures.emplace_back("path", oracle::make_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}}));
    fixtures.emplace_back("star", oracle::make_graph(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}}));
    fixtures.emplace_back("barbell", oracle::make_graph(7, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {4, 6}, {5, 6}}));
    std::string failed;
    for (const auto& [name, g] : fixtures) {
        RombachOptions opt;
        opt.samples = 300;
        opt.seed = 7;
        opt.search = RombachSearch::Anneal;
        auto cs = rombach_core_scores(g, opt).values;
        auto ref = exhaustive_scores(g, 300, 8);
        if (!same_ranking(ref, cs, 1e-6)) failed += " " + name;
    }
    return {rate >= 0.95 && failed.empty(),
            fmt("anneal optimal in %.1f%% of pairs", 100.0 * rate) +
                (failed.empty() ? std::string(", path/star/barbell rankings agree") : ", ranking mismatch:" + failed)};
}

// 5 ------------------------------------------------------------------------

Outcome hybrid_properties() {
    bool cycles = true;
    for (std::size_t n = 4; n <= 12; ++n) {
        WeightedGraph g(n);
        for (std::size_t i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n, 0.5);
        auto p = hybrid_measure(centrality_bundle(g)).values;
        for (double v : p) cycles = cycles && std::abs(v - p[0]) <= 1e-12;
    }
    bool star = true;
    for (std::size_t n = 4; n <= 12; ++n) {
        WeightedGraph g(n);
        for (std::size_t i = 1; i < n; ++i) g.add_edge(0, i, 0.3 + 0.01 * static_cast<double>(i));
        auto p = hybrid_measure(centrality_bundle(g)).values;
        for (std::size_t i = 1; i < n; ++i) star = star && p[0] < p[i];
    }
    std::mt19937_64 rng(105);
    int in_range = 0;
    double lo = 2.0, hi = 0.0;
    for (int k = 0; k < 100; ++k) {
        auto p = hybrid_measure(centrality_bundle(build_pmfg(corr_of(oracle::random_correlation(30, rng))).graph)).values;
        auto [mn, mx] = std::minmax_element(p.begin(), p.end());
        lo = std::min(lo, *mn);
        hi = std::max(hi, *mx);
        in_range += *mn >= 0.0 && *mx <= 2.0;
    }
    return {cycles && star && in_range == 100,
            std::string("cycles equal: ") + (cycles ? "yes" : "no") + ", star hub minimal: " + (star ? "yes" : "no") +
                ", P range " + fmt("[%.3f, %.3f]", lo, hi) + " over 100 PMFGs"};
}

// 6 ------------------------------------------------------------------------

Outcome markowitz_grid() {
    std::mt19937_64 rng(106);
    std::uniform_real_distribution<double> mu(-0.01, 0.03), vol(0.05, 0.4);
    int ok = 0;
    double worst_gap = -1.0, worst_constraint = 0.0;
    for (int k = 0; k < 100; ++k) {
        const Eigen::Index n = 1 + k % 3;
        Eigen::VectorXd r(n), s(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            r(i) = mu(rng);
            s(i) = vol(rng);
        }
        if (r.maxCoeff() <= 0.0) r(0) = 0.005;
        Eigen::MatrixXd c = n == 1 ? Eigen::MatrixXd::Identity(1, 1)
                                   : oracle::random_correlation(static_cast<std::size_t>(n), rng, 1, 30);
        Eigen::MatrixXd cov = s.asDiagonal() * c * s.asDiagonal();
        auto res = markowitz_weights(r, s, c);
        Eigen::Map<const Eigen::VectorXd> w(res.weights.data(), n);
        auto sharpe = [&](const Eigen::VectorXd& x) { return x.dot(r) / std::sqrt(x.dot(cov * x)); };
        double gap = oracle::grid_markowitz(r, cov).sharpe - sharpe(w);
        double constraint = std::max(std::abs(w.sum() - 1.0), std::max(0.0, -w.minCoeff()));
        Eigen::VectorXd uni = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
        worst_gap = std::max(worst_gap, gap);
        worst_constraint = std::max(worst_constraint, constraint);
        ok += gap <= 1e-6 && constraint <= 1e-9 && sharpe(w) >= sharpe(uni) - 1e-12;
    }
    return {ok == 100, std::to_string(ok) + "/100 instances, worst grid gap " + fmt("%.1e", worst_gap) +
                           ", worst constraint violation " + fmt("%.1e", worst_constraint)};
}

// 7 ------------------------------------------------------------------------

Outcome proportion_test() {
    auto a = proportion_z_test(0.97, 0.7, 1000);
    auto b = proportion_z_test(0.68, 0.7, 1000);
    const double za = 0.27 / std::sqrt(0.21 / 1000.0), zb = -0.02 / std::sqrt(0.21 / 1000.0);
    bool ok = std::abs(a.z - za) <= 1e-2 && a.p_value < 1e-6 && std::abs(b.z - zb) <= 1e-2 && b.p_value > 0.05;
    return {ok, fmt("p=0.97: z=%.2f p=%.1e", a.z, a.p_value) + fmt(", p=0.68: z=%.2f p=%.3f", b.z, b.p_value)};
}

// 8 ------------------------------------------------------------------------

Outcome significance_sanity() {
    std::mt19937_64 rng(108);
    int planted = 0;
    for (int k = 0; k < 50; ++k) {
        auto edges = oracle::planted_core_periphery(10, 40, 0.9, 0.3, 0.05, rng);
        auto g = oracle::make_graph(50, edges, oracle::block_weights(edges, 10, 1.0, 0.6, 0.2));
        planted += significance_test(g, 100, static_cast<std::uint64_t>(k)).p_value < 0.05;
    }
    std::uniform_real_distribution<double> u(0.5, 1.0);
    int homogeneous = 0;
    for (int k = 0; k < 50; ++k) {
        auto edges = oracle::random_regular(50, 6, rng);
        std::vector<double> w;
        for (std::size_t e = 0; e < edges.size(); ++e) w.push_back(u(rng));
        homogeneous += significance_test(oracle::make_graph(50, edges, w), 100, 1000 + static_cast<std::uint64_t>(k)).p_value > 0.05;
    }
    return {planted >= 45 && homogeneous >= 40, "planted significant " + std::to_string(planted) +
                                                   "/50, homogeneous insignificant " + std::to_string(homogeneous) + "/50"};
}

// 9 ------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(const std::string& cmd) { return std::system((cmd + " >/dev/null 2>&1").c_str()); }

Outcome end_to_end() {
    const fs::path work = fs::path(CPNET_WORK_DIR) / "acceptance_e2e";
    fs::remove_all(work);
    fs::create_directories(work);
    const std::string cli = CPNET_CLI;
    const std::string data = std::string(CPNET_DATA_DIR) + "/synthetic_daily.csv";
    const std::string bt = " backtest --prices " + (work / "ingest" / "prices.csv").string() + " --step 25 --seed 42";

    auto t0 = Clock::now();
    int rc = run(cli + " ingest --daily " + data + " --out " + (work / "ingest").string());
    if (rc == 0) rc = run(cli + bt + " --jobs 4 --out " + (work / "a").string());
    const double elapsed = seconds_since(t0);
    if (rc != 0) return {false, "pipeline exited with status " + std::to_string(rc)};
    if (run(cli + bt + " --jobs 1 --out " + (work / "b").string()) != 0) return {false, "serial rerun failed"};

    bool identical = true;
    for (const char* f : {"report.csv", "report_failures.csv", "window_returns.csv", "portfolios.csv"})
        identical = identical && slurp(work / "a" / f) == slurp(work / "b" / f) && !slurp(work / "a" / f).empty();

    // report.csv: strategy,m,weighting,holding_period,sharpe,mean_return,std
    std::ifstream in(work / "a" / "report.csv");
    std::string line;
    std::getline(in, line);
    std::map<std::tuple<std::string, std::string, std::string>, double> sharpe;
    while (std::getline(in, line)) {
        auto f = csv::split(line);
        auto h = csv::to_int(f[3]);
        auto s = csv::to_double(f[4]);
        if (h && *h >= 63) sharpe[{f[0], f[1] + "/" + f[2], f[3]}] = s ? *s : std::nan("");
    }
    int checked = 0, held = 0;
    for (const auto& [key, s1] : sharpe) {
        const auto& [strategy, cell, h] = key;
        if (strategy != "Type-1") continue;
        for (const char* other : {"Type-4", "Type-5"}) {
            auto it = sharpe.find({other, cell, h});
            ++checked;
            held += it != sharpe.end() && s1 > it->second;
        }
    }
    const bool dominance = checked == 2 * 4 * 2 * 63 && held == checked;
    return {elapsed < 60.0 && identical && dominance,
            fmt("ingest+backtest %.1f s", elapsed) + (identical ? ", jobs 4 == jobs 1" : ", outputs differ") +
                ", Type-1 beats Type-4/5 in " + std::to_string(held) + "/" + std::to_string(checked) + " cells (T >= 63)"};
}

// 10 -----------------------------------------------------------------------

Outcome numerical_hygiene() {
    double weight_err = 0.0;
    for (std::size_t t : {1u, 2u, 10u, 125u, 240u, 1000u, 5000u, 10000u})
        for (double theta : {1.0, 60.0, 240.0, 1e4}) {
            auto w = exp_weights(t, theta);
            double sum = 0.0;
            for (Eigen::Index i = 0; i < w.weights.size(); ++i) sum += w.weights(i);
            weight_err = std::max(weight_err, std::abs(sum - 1.0));
        }
    std::mt19937_64 rng(110);
    std::normal_distribution<double> z(0.0, 1.0);
    double corr_err = 0.0;
    for (int k = 0; k < 20; ++k) {
        Eigen::MatrixXd x(125, 15);
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = z(rng) + (j % 3 == 0 ? x(i, 0) : 0.0);
        std::vector<std::string> names;
        for (int j = 0; j < 15; ++j) names.push_back(std::to_string(j));
        ExpWeights uniform;
        uniform.length = 125;
        uniform.weights = Eigen::VectorXd::Constant(125, 1.0 / 125.0);
        auto a = pearson_matrix(x, names).coefficients;
        auto b = weighted_pearson_matrix(x, uniform, names).coefficients;
        corr_err = std::max(corr_err, (a - b).cwiseAbs().maxCoeff());
    }
    return {weight_err <= 1e-12 && corr_err <= 1e-12,
            "exp-weight sum error " + fmt("%.1e", weight_err) + ", uniform-weighted vs plain " + fmt("%.1e", corr_err)};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 PMFG validity", pmfg_validity},
        {"2 PMFG K5 oracle", pmfg_k5_oracle},
        {"3 Rossa closed forms and greedy minimality", rossa_closed_forms},
        {"4 Rombach annealing vs exhaustive oracle", rombach_oracle},
        {"5 Hybrid measure properties", hybrid_properties},
        {"6 Markowitz vs grid oracle", markowitz_grid},
        {"7 Proportion z-test", proportion_test},
        {"8 Significance sanity", significance_sanity},
        {"9 End-to-end determinism and dominance", end_to_end},
        {"10 Numerical hygiene", numerical_hygiene},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        auto t0 = Clock::now();
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << o.detail << ", " << fmt("%.1f s", seconds_since(t0))
                  << ")" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
