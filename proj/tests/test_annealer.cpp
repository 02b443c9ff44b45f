#include "doctest.h"

#include <cmath>
#include <random>

#include "slr/annealer.hpp"
#include "oracles.hpp"

using namespace slr;

namespace {

// two mirrored one-dimensional groups; the cap binds at the default (1.0, 0.5)
// so the walk has something real to improve
struct toy_problem {
    std::vector<group_summary> groups;
    Eigen::MatrixXd X;
    Eigen::VectorXd y;

    toy_problem() {
        group_summary a, b;
        a.mean = Eigen::VectorXd::Constant(1, 1.0);
        a.covariance = Eigen::MatrixXd::Constant(1, 1, 1.0);
        a.mean_score = 0.85;
        a.size = 2;
        b.mean = Eigen::VectorXd::Constant(1, -1.0);
        b.covariance = Eigen::MatrixXd::Constant(1, 1, 1.0);
        b.mean_score = 0.15;
        b.size = 2;
        groups = {a, b};
        X.resize(4, 1);
        X << 1.3, 0.7, -0.7, -1.3;
        y.resize(4);
        y << 1, 1, 0, 0;
    }

    double score(const chance_config& cfg) const {
        solver_report rep = solve_slr(assemble_reduced(groups, cfg));
        if (rep.status != solve_status::optimal)
            return std::numeric_limits<double>::infinity();
        return log_loss(rep.weights, X, y);
    }
};

anneal_schedule zero_step_schedule() {
    anneal_schedule s;
    s.step_alpha = 0.0;
    s.step_beta = 0.0;
    s.max_evals = 25;
    s.seed = 7;
    return s;
}

} // namespace

TEST_CASE("propose with zero steps returns the input and spends no randomness") {
    anneal_schedule s = zero_step_schedule();
    std::mt19937_64 a(42), b(42);
    chance_config cur{0.7, 0.3};
    chance_config next = propose(cur, s, a);
    CHECK(next.alpha == 0.7);
    CHECK(next.beta == 0.3);
    CHECK(a() == b()); // the generator never advanced
}

TEST_CASE("proposals stay inside the legal box over a long seeded stream") {
    anneal_schedule s;
    s.step_alpha = 2.0; // large steps to stress the reflection and the clamp
    s.step_beta = 0.6;
    std::mt19937_64 rng(99);
    chance_config cur{0.1, 0.5};
    bool reflected = false;
    for (int i = 0; i < 10000; ++i) {
        chance_config next = propose(cur, s, rng);
        CHECK(next.alpha >= 0.0);
        CHECK(next.beta >= 1e-4);
        CHECK(next.beta <= 1.0 - 1e-4);
        if (next.alpha > cur.alpha + 3.0 * s.step_alpha) reflected = true; // |large negative|
        cur = next;
    }
    CHECK(reflected); // the absolute-value fold actually fired somewhere in the stream
}

TEST_CASE("metropolis accepts improvements unconditionally without drawing") {
    std::mt19937_64 a(1), b(1);
    CHECK(metropolis_accept(-1.0, 0.5, a));
    CHECK(metropolis_accept(0.0, 0.5, a)); // boundary counts as improvement
    CHECK(a() == b());                     // no randomness consumed by either call
}

TEST_CASE("metropolis worsening moves consume exactly one draw") {
    std::mt19937_64 a(3), b(3);
    (void)metropolis_accept(1.0, 1.0, a);
    b.discard(1);
    CHECK(a() == b());
}

TEST_CASE("metropolis acceptance rate at delta == temp is about 1/e") {
    std::mt19937_64 rng(2024);
    int accepted = 0;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i)
        if (metropolis_accept(1.0, 1.0, rng)) ++accepted;
    double rate = double(accepted) / trials;
    CHECK(std::abs(rate - std::exp(-1.0)) <= 0.01);
}

TEST_CASE("a budget of one evaluation returns the initial solution") {
    toy_problem toy;
    anneal_schedule s;
    s.max_evals = 1;
    s.seed = 11;
    anneal_result res = anneal(toy.groups, toy.X, toy.y, s);
    CHECK(res.evals == 1);
    CHECK(res.best_config.alpha == s.initial.alpha);
    CHECK(res.best_config.beta == s.initial.beta);
    CHECK(res.best_loss == doctest::Approx(toy.score(s.initial)).epsilon(1e-12));
    REQUIRE(res.trace.size() == 1);
    CHECK(res.trace[0].accepted);
    CHECK(res.trace[0].temperature == s.initial_temp);
}

TEST_CASE("zero step sizes freeze the walk at the initial configuration") {
    toy_problem toy;
    anneal_result res = anneal(toy.groups, toy.X, toy.y, zero_step_schedule());
    CHECK(res.best_config.alpha == 1.0);
    CHECK(res.best_config.beta == 0.5);
    for (const auto& e : res.trace) {
        CHECK(e.config.alpha == 1.0);
        CHECK(e.config.beta == 0.5);
        CHECK(e.accepted); // identical candidate means delta == 0, always taken
    }
}

TEST_CASE("forty evaluations reach the grid-search optimum on the toy problem") {
    toy_problem toy;
    anneal_schedule s;
    s.max_evals = 40;
    s.seed = 5;

    // exhaustive oracle over the spec grid of candidate configurations
    double grid_best = std::numeric_limits<double>::infinity();
    for (int ia = 1; ia <= 50; ++ia)
        for (int ib = 1; ib <= 19; ++ib) {
            chance_config cfg{0.1 * ia, 0.05 * ib};
            grid_best = std::min(grid_best, toy.score(cfg));
        }

    anneal_result res = anneal(toy.groups, toy.X, toy.y, s);
    double initial_loss = toy.score(s.initial);
    CHECK(res.best_loss <= initial_loss + 1e-12);
    CHECK(std::abs(res.best_loss - grid_best) <= 0.05 * std::abs(grid_best));
}

TEST_CASE("best-so-far is the running minimum of accepted candidates") {
    toy_problem toy;
    anneal_schedule s;
    s.max_evals = 60;
    s.seed = 21;
    anneal_result res = anneal(toy.groups, toy.X, toy.y, s);

    double running = std::numeric_limits<double>::infinity();
    for (const auto& e : res.trace) {
        if (e.accepted) running = std::min(running, e.loss);
        CHECK(res.best_loss <= running + 1e-15); // final best under every prefix minimum
    }
    CHECK(res.best_loss == running); // and it equals the full minimum
    CHECK(res.best_loss <= res.trace.front().loss);

    // every visited configuration is legal
    for (const auto& e : res.trace) {
        CHECK(e.config.alpha >= 0.0);
        CHECK(e.config.beta > 0.0);
        CHECK(e.config.beta < 1.0);
    }
}

TEST_CASE("the temperature ladder is geometric in the cooling factor") {
    toy_problem toy;
    anneal_schedule s;
    s.max_evals = 80;
    s.steps_per_temp = 4;
    s.cooling = 0.8;
    s.seed = 31;
    anneal_result res = anneal(toy.groups, toy.X, toy.y, s);

    std::vector<double> ladder;
    for (const auto& e : res.trace)
        if (ladder.empty() || e.temperature != ladder.back()) ladder.push_back(e.temperature);
    REQUIRE(ladder.size() >= 3);
    CHECK(ladder[0] == s.initial_temp);
    for (std::size_t i = 1; i < ladder.size(); ++i)
        CHECK(ladder[i] == doctest::Approx(0.8 * ladder[i - 1]).epsilon(1e-12));

    // each rung hosts at most steps_per_temp evaluations (the first rung holds
    // the initial evaluation too)
    int run = 0;
    double cur = -1.0;
    for (const auto& e : res.trace) {
        run = (e.temperature == cur) ? run + 1 : 1;
        cur = e.temperature;
        CHECK(run <= s.steps_per_temp + 1);
    }
}

TEST_CASE("annealing is reproducible from the seed") {
    toy_problem toy;
    anneal_schedule s;
    s.max_evals = 50;
    s.seed = 77;
    anneal_result a = anneal(toy.groups, toy.X, toy.y, s);
    anneal_result b = anneal(toy.groups, toy.X, toy.y, s);
    CHECK(a.best_loss == b.best_loss);
    CHECK(a.best_config.alpha == b.best_config.alpha);
    CHECK(a.best_config.beta == b.best_config.beta);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].loss == b.trace[i].loss);
        CHECK(a.trace[i].accepted == b.trace[i].accepted);
    }

    s.seed = 78;
    anneal_result c = anneal(toy.groups, toy.X, toy.y, s);
    bool same = a.trace.size() == c.trace.size();
    if (same)
        for (std::size_t i = 0; i < a.trace.size(); ++i)
            if (a.trace[i].config.alpha != c.trace[i].config.alpha) same = false;
    CHECK_FALSE(same);
}

TEST_CASE("an unsolvable starting configuration is a hard error") {
    toy_problem toy;
    anneal_schedule s;
    s.initial = {-1.0, 0.5}; // invalid alpha: the very first solve cannot succeed
    CHECK_THROWS_AS((void)anneal(toy.groups, toy.X, toy.y, s), solver_error);

    anneal_schedule bad;
    bad.max_evals = 0;
    CHECK_THROWS_AS((void)anneal(toy.groups, toy.X, toy.y, bad), config_error);
    anneal_schedule warm;
    warm.cooling = 1.0;
    CHECK_THROWS_AS((void)anneal(toy.groups, toy.X, toy.y, warm), config_error);
}
