// Writes the bundled synthetic daily dataset and its sector map.
#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "cpnet/csv.hpp"
#include "cpnet/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate a synthetic daily close file with a planted correlated core"};
    cpnet::synthetic::PlantedMarket m;
    m.factor_vol = 0.01;
    m.beta_low = 0.1;
    m.beta_high = 0.8;
    m.independent_vol = 0.006;
    std::string out = "data";
    app.add_option("--out", out, "Output directory")->capture_default_str();
    app.add_option("--block", m.block, "Symbols driven by the common factor")->capture_default_str();
    app.add_option("--independent", m.independent, "Independent symbols")->capture_default_str();
    app.add_option("--days", m.days, "Price rows")->capture_default_str();
    app.add_option("--factor-vol", m.factor_vol, "Daily factor volatility")->capture_default_str();
    app.add_option("--block-noise", m.block_noise, "Idiosyncratic volatility inside the block")->capture_default_str();
    app.add_option("--block-drift", m.block_drift, "Daily drift inside the block")->capture_default_str();
    app.add_option("--beta-low", m.beta_low, "Factor loading of the first independent symbol")->capture_default_str();
    app.add_option("--beta-high", m.beta_high, "Factor loading of the last independent symbol")->capture_default_str();
    app.add_option("--independent-vol", m.independent_vol, "Volatility of independent symbols")->capture_default_str();
    app.add_option("--independent-drift", m.independent_drift, "Drift of independent symbols")->capture_default_str();
    app.add_option("--seed", m.seed, "Generator seed")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    namespace fs = std::filesystem;
    fs::create_directories(out);
    auto pm = cpnet::synthetic::planted_market(m);
    {
        auto f = cpnet::csv::open_output((fs::path(out) / "synthetic_daily.csv").string());
        cpnet::synthetic::write_daily_closes(f, pm);
    }
    auto f = cpnet::csv::open_output((fs::path(out) / "sectors.csv").string());
    f << "symbol,sector\n";
    for (const auto& s : pm.symbols) f << s << ',' << (s.rfind(m.block_prefix, 0) == 0 ? "Financials" : "Other") << '\n';
    std::printf("%zu symbols x %zu days written to %s\n", pm.cols(), pm.rows(), out.c_str());
}
