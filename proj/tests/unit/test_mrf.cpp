#include <doctest.h>

#include <cmath>
#include <set>

#include "hsic/mrf/energy.hpp"
#include "hsic/mrf/expansion.hpp"
#include "hsic/mrf/maxflow.hpp"
#include "hsic/rng.hpp"
#include "oracles.hpp"

using namespace hsic;
using namespace hsic::mrf;

namespace {

ProbMap pair_probs() { return ProbMap(2, 2, {0.9, 0.1, 0.6, 0.4}); }

std::vector<double> random_unaries(std::size_t n, int k, Rng& rng) {
    std::vector<double> u(n * static_cast<std::size_t>(k));
    for (double& v : u) v = 5.0 * unit_double(rng());
    return u;
}

ProbMap random_probs(std::size_t n, int k, Rng& rng) {
    std::vector<double> p(n * static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int c = 0; c < k; ++c) sum += p[i * k + c] = unit_double(rng()) + 1e-3;
        for (int c = 0; c < k; ++c) p[i * k + c] /= sum;
    }
    return ProbMap(n, k, std::move(p));
}

std::vector<int> random_labels(std::size_t n, int k, Rng& rng) {
    std::vector<int> y(n);
    for (int& v : y) v = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(k)));
    return y;
}

}  // namespace

TEST_SUITE("mrf") {

TEST_CASE("grid edges") {
    const auto e = grid_edges(1, 2, Neighborhood::Four);
    REQUIRE(e.size() == 1);
    CHECK(e[0] == std::pair<std::uint32_t, std::uint32_t>{0, 1});
    CHECK(grid_edges(3, 3, Neighborhood::Four).size() == 12);
    CHECK(grid_edges(3, 3, Neighborhood::Eight).size() == 20);
    CHECK(ordered_pair_count(3, 4, Neighborhood::Four) == 2 * 17);
    std::set<std::pair<std::uint32_t, std::uint32_t>> uniq;
    for (const auto& p : grid_edges(4, 5, Neighborhood::Eight)) {
        CHECK(p.first < p.second);
        CHECK(p.second < 20);
        uniq.insert(p);
    }
    CHECK(uniq.size() == grid_edges(4, 5, Neighborhood::Eight).size());
}

TEST_CASE("build_energy examples") {
    const auto m = build_energy(pair_probs(), 1, 2, 20.0);
    CHECK(m.potts_weight == 80.0);
    CHECK(m.edges.size() == 1);
    CHECK(cost(m, std::vector<int>{1, 2}) - cost(m, std::vector<int>{1, 1}) ==
          doctest::Approx(80.0 + std::log(0.6) - std::log(0.4)).epsilon(1e-12));

    const auto zero = build_energy(pair_probs(), 1, 2, 0.0);
    CHECK(zero.potts_weight == 0.0);

    const auto clamp = build_energy(ProbMap(1, 2, {1.0, 0.0}), 1, 1, 1.0);
    CHECK(std::isfinite(clamp.unary_at(0, 2)));
    CHECK(clamp.unary_at(0, 2) == doctest::Approx(23.02585093).epsilon(1e-9));
    CHECK(clamp.unary_at(0, 1) == 0.0);

    CHECK_THROWS(build_energy(pair_probs(), 1, 2, -1.0));
    CHECK_THROWS(build_energy(pair_probs(), 2, 2, 1.0));
    CHECK_THROWS(make_energy(1, 1, 2, {0.0, std::nan("")}, 1.0));
}

TEST_CASE("objective examples") {
    const ProbMap p = pair_probs();
    CHECK(objective(LabelMap(1, 2, 2, {1, 1}), p, 20.0) == doctest::Approx(std::log(0.9) + std::log(0.6) + 40.0).epsilon(1e-14));
    CHECK(objective(LabelMap(1, 2, 2, {1, 1}), p, 20.0) == doctest::Approx(39.384).epsilon(1e-4));
    CHECK(objective(LabelMap(1, 2, 2, {1, 2}), p, 20.0) == doctest::Approx(-41.022).epsilon(1e-4));
    CHECK(objective(LabelMap(1, 2, 2, {2, 1}), p, 0.0) == doctest::Approx(std::log(0.1) + std::log(0.6)).epsilon(1e-14));
    CHECK_THROWS(objective(LabelMap(1, 2, 2, {1, 0}), p, 20.0));
}

TEST_CASE("property: cost form minus mu times ordered pairs is minus the objective") {
    Rng rng = make_rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t h = 1 + uniform_index(rng, 4), w = 1 + uniform_index(rng, 4);
        const int k = 2 + static_cast<int>(uniform_index(rng, 3));
        const double mu = 30.0 * unit_double(rng());
        const ProbMap p = random_probs(h * w, k, rng);
        const auto y = random_labels(h * w, k, rng);
        for (auto nb : {Neighborhood::Four, Neighborhood::Eight}) {
            const auto m = build_energy(p, h, w, mu, nb);
            const double lhs = cost(m, y) - mu * static_cast<double>(ordered_pair_count(h, w, nb));
            CHECK(std::abs(lhs + objective(LabelMap(h, w, k, y), p, mu, nb)) <= 1e-9);
        }
        CHECK(std::abs(objective(LabelMap(h, w, k, y), p, mu) - oracle::literal_objective(y, h, w, p.values(), k, mu)) <= 1e-9);
    }
}

TEST_CASE("max flow examples") {
    FlowNetwork net(4, 0, 3);  // s=0, a=1, b=2, t=3
    net.add_arc(0, 1, 3);
    net.add_arc(0, 2, 2);
    net.add_arc(1, 3, 2);
    net.add_arc(2, 3, 3);
    net.add_arc(1, 2, 1);
    const auto r = max_flow_min_cut(net);
    CHECK(r.flow_value == 5.0);
    CHECK(r.cut_capacity == 5.0);
    CHECK(r.source_side == std::vector<bool>{true, false, false, false});

    FlowNetwork one(2, 0, 1);
    one.add_arc(0, 1, 7);
    CHECK(max_flow_min_cut(one).flow_value == 7.0);

    FlowNetwork cut_off(3, 0, 2);
    cut_off.add_arc(0, 1, 4);
    const auto d = max_flow_min_cut(cut_off);
    CHECK(d.flow_value == 0.0);
    CHECK(d.source_side == std::vector<bool>{true, true, false});

    FlowNetwork bad(2, 0, 1);
    CHECK_THROWS(bad.add_arc(0, 1, -1));
    CHECK_THROWS(bad.add_arc(0, 2, 1));
    CHECK_THROWS(FlowNetwork(2, 1, 1));
}

TEST_CASE("property: max flow equals the brute-force min cut") {
    Rng rng = make_rng(77);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + uniform_index(rng, 7);
        FlowNetwork net(n, 0, n - 1);
        const std::size_t arcs = uniform_index(rng, 3 * n);
        for (std::size_t e = 0; e < arcs; ++e) {
            const std::size_t a = uniform_index(rng, n), b = uniform_index(rng, n);
            if (a == b) continue;
            net.add_arc(a, b, static_cast<double>(uniform_index(rng, 11)), static_cast<double>(uniform_index(rng, 3)));
        }
        const auto r = max_flow_min_cut(net);
        CHECK(r.flow_value == oracle::brute_force_min_cut(net));
        CHECK(r.cut_capacity == cut_capacity(net, r.source_side));
    }
}

TEST_CASE("expansion move examples") {
    const auto m = build_energy(pair_probs(), 1, 2, 20.0);
    const auto all1 = expansion_move(m, {1, 1}, 1);
    CHECK_FALSE(all1.changed);
    CHECK(all1.labels == std::vector<int>{1, 1});

    const auto mv = expansion_move(m, {2, 2}, 1);
    CHECK(mv.changed);
    CHECK(mv.labels == std::vector<int>{1, 1});
    CHECK(mv.cost == doctest::Approx(cost(m, std::vector<int>{1, 1})).epsilon(1e-14));

    // decoupled: each pixel keeps the cheaper of current and alpha
    Rng rng = make_rng(5);
    const auto u = random_unaries(12, 3, rng);
    const auto m0 = make_energy(3, 4, 3, u, 0.0);
    const std::vector<int> y = random_labels(12, 3, rng);
    const auto r = expansion_move(m0, y, 2);
    for (std::size_t i = 0; i < 12; ++i) {
        const int want = m0.unary_at(i, 2) < m0.unary_at(i, y[i]) ? 2 : y[i];
        CHECK(r.labels[i] == want);
    }

    CHECK_THROWS(expansion_move(m, {1, 1}, 3));
    CHECK_THROWS(expansion_move(m, {1, 0}, 1));
}

TEST_CASE("property: the expansion move is optimal among all keep-or-switch labelings") {
    Rng rng = make_rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t h = 2 + uniform_index(rng, 2), w = 2 + uniform_index(rng, 2);
        const int k = 3;
        const double lambda = static_cast<double>(uniform_index(rng, 4)) * 1.5;
        const auto u = random_unaries(h * w, k, rng);
        const auto m = make_energy(h, w, k, u, lambda);
        const auto y = random_labels(h * w, k, rng);
        const int alpha = 1 + static_cast<int>(uniform_index(rng, 3));
        double best = std::numeric_limits<double>::infinity();
        for (std::uint32_t mask = 0; mask < (1u << (h * w)); ++mask) {
            auto z = y;
            for (std::size_t i = 0; i < h * w; ++i)
                if ((mask >> i) & 1u) z[i] = alpha;
            best = std::min(best, oracle::literal_cost(z, h, w, u, k, lambda));
        }
        const auto mv = expansion_move(m, y, alpha);
        CHECK(mv.cost == doctest::Approx(best).epsilon(1e-12));
        CHECK(mv.cost <= cost(m, y) + 1e-12);
    }
}

TEST_CASE("alpha expansion examples") {
    // 2x2, three pixels prefer class 1 by margin 1, one prefers class 2
    const auto m = make_energy(2, 2, 2, {0, 1, 0, 1, 0, 1, 1, 0}, 10.0);
    const auto r = alpha_expansion(m, {1, 1, 1, 2});
    CHECK(r.labels == std::vector<int>{1, 1, 1, 1});
    CHECK(exhaustive_map(m) == std::vector<int>{1, 1, 1, 1});

    Rng rng = make_rng(3);
    const ProbMap p = random_probs(20, 4, rng);
    const auto m0 = build_energy(p, 4, 5, 0.0);
    const auto argmax = p.argmax(4, 5).labels();
    CHECK(alpha_expansion(m0, argmax).labels == argmax);
    CHECK(alpha_expansion(m0, random_labels(20, 4, rng)).labels == argmax);
}

TEST_CASE("exhaustive map examples") {
    const auto one = make_energy(1, 1, 3, {2.0, 0.5, 0.7}, 5.0);
    CHECK(exhaustive_map(one) == std::vector<int>{2});
    const auto tie = make_energy(1, 1, 3, {1.0, 0.5, 0.5}, 5.0);
    CHECK(exhaustive_map(tie) == std::vector<int>{2});
    CHECK(exhaustive_map(build_energy(pair_probs(), 1, 2, 20.0)) == std::vector<int>{1, 1});
    const auto dec = make_energy(1, 3, 2, {1, 0, 0, 1, 1, 0}, 0.0);
    CHECK(exhaustive_map(dec) == std::vector<int>{2, 1, 2});
    CHECK_THROWS(exhaustive_map(make_energy(5, 5, 2, std::vector<double>(50, 0.0), 1.0)));
}

TEST_CASE("property: alpha expansion against the exhaustive optimum") {
    Rng rng = make_rng(2024);
    int optimal = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const double lambda = std::vector<double>{0, 1, 5, 20}[uniform_index(rng, 4)];
        const auto u = random_unaries(9, 3, rng);
        const auto m = make_energy(3, 3, 3, u, lambda);
        const auto init = random_labels(9, 3, rng);
        const auto r = alpha_expansion(m, init, 20);
        const double best = oracle::brute_force_min_cost(3, 3, u, 3, lambda);
        CHECK(cost(m, exhaustive_map(m)) == doctest::Approx(best).epsilon(1e-12));
        CHECK(r.cost_history.back() <= 2.0 * best + 1e-9);
        optimal += std::abs(r.cost_history.back() - best) <= 1e-9;
        for (std::size_t s = 1; s < r.cost_history.size(); ++s) CHECK(r.cost_history[s] <= r.cost_history[s - 1] + 1e-12);
        CHECK(r.cost_history.back() == doctest::Approx(cost(m, r.labels)).epsilon(1e-12));
        // local optimality at convergence
        if (r.sweeps < 20)
            for (int a = 1; a <= 3; ++a) CHECK(expansion_move(m, r.labels, a).cost >= r.cost_history.back() - 1e-9);
    }
    CHECK(optimal >= 54);
}

TEST_CASE("property: scaling the posteriors does not change the labeling") {
    Rng rng = make_rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const ProbMap p = random_probs(30, 3, rng);
        std::vector<double> scaled = p.values();
        const double c = 0.05 + unit_double(rng());
        for (double& v : scaled) v *= c;
        const ProbMap q(30, 3, scaled);
        const auto a = alpha_expansion(build_energy(p, 5, 6, 0.3), p.argmax(5, 6).labels());
        const auto b = alpha_expansion(build_energy(q, 5, 6, 0.3), p.argmax(5, 6).labels());
        CHECK(a.labels == b.labels);
    }
}

}
