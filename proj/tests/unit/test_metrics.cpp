#include <doctest.h>

#include <cmath>

#include "hsic/metrics.hpp"
#include "hsic/rng.hpp"

using namespace hsic;

TEST_SUITE("metrics") {

TEST_CASE("confusion examples") {
    std::vector<int> y = {1, 2, 3, 1, 2, 3, 1, 2, 3, 1};
    const LabelMap t(2, 5, 3, y);
    const auto cm = confusion(t, t, 3);
    CHECK(cm.total() == 10);
    CHECK(cm.trace() == 10);

    const LabelMap ones(1, 4, 2, {1, 1, 1, 1});
    const LabelMap twos(1, 4, 2, {2, 2, 2, 2});
    const auto c2 = confusion(ones, twos, 2);
    CHECK(c2.at(1, 2) == 4);
    CHECK(c2.total() == 4);

    const auto masked = confusion(LabelMap(1, 2, 2, {1, 0}), LabelMap(1, 2, 2, {1, 2}), 2);
    CHECK(masked.total() == 1);
    CHECK(masked.at(1, 1) == 1);

    CHECK_THROWS(confusion(LabelMap(1, 2, 2), LabelMap(2, 1, 2), 2));
    CHECK_THROWS(confusion(LabelMap(1, 1, 2, {1}), LabelMap(1, 1, 2, {0}), 2));
}

TEST_CASE("worked matrices") {
    const ConfusionMatrix perfect(2, {2, 0, 0, 2});
    CHECK(oa(perfect) == 1.0);
    CHECK(aa(perfect) == 1.0);
    CHECK(kappa(perfect) == 1.0);

    const ConfusionMatrix chance(2, {1, 1, 1, 1});
    CHECK(oa(chance) == 0.5);
    CHECK(kappa(chance) == 0.0);

    const ConfusionMatrix mixed(2, {3, 1, 2, 4});
    CHECK(std::abs(oa(mixed) - 0.7) <= 1e-12);
    CHECK(std::abs(aa(mixed) - (0.75 + 4.0 / 6.0) / 2.0) <= 1e-12);
    CHECK(std::abs(kappa(mixed) - 0.4) <= 1e-12);
    const auto pc = per_class_accuracy(mixed);
    CHECK(pc[0] == 0.75);
    CHECK(std::abs(pc[1] - 4.0 / 6.0) <= 1e-15);
}

TEST_CASE("empty classes and degenerate matrices") {
    const ConfusionMatrix cm(3, {2, 1, 0, 0, 0, 0, 0, 1, 3});
    std::vector<int> excluded;
    CHECK(std::abs(aa(cm, &excluded) - (2.0 / 3.0 + 0.75) / 2.0) <= 1e-15);
    CHECK(excluded == std::vector<int>{2});
    CHECK(std::isnan(per_class_accuracy(cm)[1]));

    // all mass on one cell: chance agreement is 1
    const ConfusionMatrix one(2, {5, 0, 0, 0});
    CHECK(kappa(one) == 0.0);
    CHECK_THROWS(oa(ConfusionMatrix(2)));
    CHECK_THROWS(aa(ConfusionMatrix(2)));
    CHECK_THROWS(kappa(ConfusionMatrix(2)));
}

TEST_CASE("property: bounds, kappa vs oa, and class permutation") {
    Rng rng = make_rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 2 + static_cast<int>(uniform_index(rng, 4));
        std::vector<int> truth(40), pred(40);
        for (int i = 0; i < 40; ++i) {
            truth[i] = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(k) + 1));
            pred[i] = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(k)));
            if (uniform_index(rng, 2) == 0 && truth[i] != 0) pred[i] = truth[i];
        }
        truth[0] = 1;
        const auto cm = confusion(LabelMap(5, 8, k, truth), LabelMap(5, 8, k, pred), k);
        const double o = oa(cm), a = aa(cm), kp = kappa(cm);
        CHECK(o >= 0.0);
        CHECK(o <= 1.0);
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);
        CHECK(kp <= o + 1e-12);
        CHECK((kp == 1.0) == (cm.trace() == cm.total()));

        std::vector<int> perm(static_cast<std::size_t>(k));
        for (int c = 0; c < k; ++c) perm[static_cast<std::size_t>(c)] = c + 1;
        shuffle(perm, rng);
        auto relabel = [&](std::vector<int> y) {
            for (int& v : y)
                if (v != 0) v = perm[static_cast<std::size_t>(v - 1)];
            return y;
        };
        const auto cp = confusion(LabelMap(5, 8, k, relabel(truth)), LabelMap(5, 8, k, relabel(pred)), k);
        CHECK(oa(cp) == doctest::Approx(o).epsilon(1e-14));
        CHECK(aa(cp) == doctest::Approx(a).epsilon(1e-14));
        CHECK(kappa(cp) == doctest::Approx(kp).epsilon(1e-12));
    }
}

}
