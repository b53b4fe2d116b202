// Exact order checks on replication laws and count vectors.
//
// First: a chain of mean-2 laws from the maximally concentrated to the
// heavy-tailed, each consecutive pair ordered by increasing convex order
// via stop-loss transforms. Second: count vectors from one rate table under
// the three driving models, compared through an exponential test battery.

#include <germgrain/stats.hpp>

#include <cstdio>

using namespace germgrain;

static const char* verdict_name(CxVerdict v) {
    switch (v) {
        case CxVerdict::a_le_b: return "a <= b";
        case CxVerdict::b_le_a: return "b >= a";
        case CxVerdict::equal: return "equal";
        default: return "incomparable";
    }
}

int main() {
    struct Law {
        const char* name;
        ReplicationKernel k;
    };
    const Law chain[] = {
        {"hypergeom(12,3,8)", HyperGeometricK{12, 3, 8}},
        {"binomial(4,1/2)", BinomialK{4, 0.5}},
        {"poisson(2)", PoissonK{2.0}},
        {"negbin(2,1/2)", NegBinomialK{2, 0.5}},
        {"geometric(1/3)", GeometricK{1.0 / 3.0}},
    };
    std::printf("convex-order chain, all means 2:\n");
    for (std::size_t i = 0; i + 1 < std::size(chain); ++i) {
        auto a = make_distribution(chain[i].k, 200);
        auto b = make_distribution(chain[i + 1].k, 200);
        auto res = cx_order_check(a, b, 1e-12);
        std::printf("  %-18s vs %-18s %s\n", chain[i].name, chain[i + 1].name,
                    verdict_name(res.verdict));
    }

    EigenTable table{{{0.3, 0.2}, {0.25, 0.35}, {0.1, 0.15}}};
    std::vector<TestFunction> battery;
    for (double si : {0.25, 1.0})
        for (double sj : {0.25, 1.0}) battery.push_back(ExpPlus{{si, sj}});

    auto root = RngStream::from_seed(7);
    auto ga = derive(root, "det");
    auto gb = derive(root, "poi");
    auto gc = derive(root, "perm");
    auto det = sample_count_vectors(CountModel::deterministic, table, 20000, ga);
    auto poi = sample_count_vectors(CountModel::poisson, table, 20000, gb);
    auto perm = sample_count_vectors(CountModel::permanental, table, 20000, gc);

    auto report = [&](const char* name, const auto& lo, const auto& hi) {
        auto rep = dcx_counts_check(lo, hi, battery);
        std::printf("%s: %s\n", name, rep.consistent ? "consistent" : "violated");
        for (const auto& row : rep.rows)
            std::printf("  %-14s mean_a %.4f  mean_b %.4f  z %+.2f\n", row.name.c_str(),
                        row.mean_a, row.mean_b, row.z);
    };
    report("deterministic <= poisson", det, poi);
    report("poisson <= permanental", poi, perm);
    return 0;
}
