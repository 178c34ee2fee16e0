// Builds one correlation network from synthetic prices and prints its
// core-periphery summary.
#include <cstdio>

#include "cpnet/cpnet.hpp"
#include "cpnet/synthetic.hpp"

int main() {
    cpnet::synthetic::PlantedMarket market;
    market.block = 5;
    market.independent = 15;
    market.days = 126;
    auto prices = cpnet::synthetic::planted_market(market);
    auto returns = cpnet::log_returns(prices);

    auto corr = cpnet::pearson_matrix(returns.returns, returns.symbols);
    auto pmfg = cpnet::build_pmfg(corr, "quickstart");
    std::printf("PMFG: %zu vertices, %zu edges\n", pmfg.graph.order(), pmfg.graph.size());

    auto affinity = cpnet::correlation_affinity(pmfg.graph);
    auto profile = cpnet::rossa_profile(affinity);
    std::printf("cp-centralization C = %.4f\n", cpnet::cp_centralization(profile));

    cpnet::RombachOptions opt;
    opt.samples = 200;
    opt.seed = 1;
    auto scores = cpnet::rombach_core_scores(affinity, opt);
    auto hybrid = cpnet::hybrid_measure(cpnet::centrality_bundle(pmfg.graph));

    std::printf("%-8s %8s %8s %8s\n", "symbol", "phi", "core", "P");
    for (std::size_t i = 0; i < returns.symbols.size(); ++i)
        std::printf("%-8s %8.4f %8.4f %8.4f\n", returns.symbols[i].c_str(), profile.coreness[i], scores.values[i],
                    hybrid.values[i]);
}
