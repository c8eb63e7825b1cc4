#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "qkr/experiments.hpp"

using namespace qkr;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("qkr-test-" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Io, KeyValueParsing)
{
    std::istringstream in("# comment\nell = 10, 20\n\n  K=0.1:0.5:0.1  # trailing\nseed = 7\n");
    const auto kv = io::parse_key_values(in, "mem");
    EXPECT_EQ(kv.at("ell"), "10, 20");
    EXPECT_EQ(io::parse_real_list(kv.at("K"), "K"), (std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5}));
    EXPECT_EQ(io::parse_integer_list(kv.at("ell"), "ell"), (std::vector<long>{10, 20}));
    std::istringstream bad("novalue\n");
    EXPECT_THROW(io::parse_key_values(bad, "mem"), Error);
    EXPECT_THROW(io::parse_real("1.5x", "K"), Error);
    EXPECT_THROW(io::parse_real_list("1:0:0.1", "K"), Error);
}

TEST(Io, RangeCoversFullKGrid)
{
    const auto k = io::parse_real_list("0.1:5:0.1", "K");
    ASSERT_EQ(k.size(), 50u);
    EXPECT_EQ(k.front(), 0.1);
    EXPECT_EQ(k[19], 2.0);
    EXPECT_EQ(k.back(), 5.0);
}

TEST(Io, RealFormatting)
{
    EXPECT_EQ(io::format_real(0.1), "0.10000000000000001");
    EXPECT_EQ(io::format_real(std::nan("")), "nan");
    EXPECT_EQ(std::stod(io::format_real(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Io, PgmLayout)
{
    std::vector<double> p(4, 0.0);
    p[1 * 2 + 0] = 0.75;  // X = 0, P = 1
    p[0 * 2 + 1] = 0.25;  // X = 1, P = 0
    const fs::path dir = scratch("pgm");
    fs::create_directories(dir);
    io::write_pgm(dir / "a.pgm", CellDistribution::torus(2, p));
    const std::string s = slurp(dir / "a.pgm");
    const std::string header = "P5\n# p_max 0.75\n2 2\n255\n";
    ASSERT_EQ(s.substr(0, header.size()), header);
    const std::string px = s.substr(header.size());
    ASSERT_EQ(px.size(), 4u);
    EXPECT_EQ((unsigned char)px[0], 255);  // top row = highest P
    EXPECT_EQ((unsigned char)px[1], 0);
    EXPECT_EQ((unsigned char)px[2], 0);
    EXPECT_EQ((unsigned char)px[3], 85);
}

TEST(Config, DefaultsAndValidation)
{
    auto cfg = make_config(Experiment::poincare, {});
    EXPECT_EQ(cfg.ell_values(), std::vector<long>{40});
    EXPECT_EQ(cfg.kick_count(), 5);
    EXPECT_NO_THROW(cfg.validate());
    cfg.ells = {7};
    EXPECT_THROW(cfg.validate(), Error);
    auto basis = make_config(Experiment::basis_check, {{"ell", "7"}});
    EXPECT_NO_THROW(basis.validate());
    EXPECT_THROW(make_config(Experiment::poincare, {{"bogus", "1"}}), Error);
    EXPECT_THROW(make_config(Experiment::poincare, {{"kicks", "-1"}}).validate(), Error);
    EXPECT_THROW(make_config(Experiment::poincare, {{"ensemble_size", "0"}}).validate(), Error);
    EXPECT_THROW(make_config(Experiment::poincare, {{"seed", "-3"}}), Error);
    EXPECT_EQ(make_config(Experiment::poincare, {{"seed", "18446744073709551615"}}).seed, 18446744073709551615ULL);
    EXPECT_THROW(make_config(Experiment::localization_scan, {{"L_list", "2000,1000"}}).validate(), Error);
    EXPECT_THROW(make_config(Experiment::localization_scan, {{"K", "0.5"}}).validate(), Error);
    EXPECT_NEAR(make_config(Experiment::localization_scan, {}).hbar(), 0.10603493933646378, 1e-15);
    EXPECT_EQ(parse_experiment("degeneracy-scan"), Experiment::degeneracy_scan);
    EXPECT_THROW(parse_experiment("nope"), Error);
}

TEST(Sweep, OrderedResults)
{
    const auto v = ordered_map<long>(100, [](std::size_t i) { return long(i * i); });
    for (std::size_t i = 0; i < v.size(); ++i)
        EXPECT_EQ(v[i], long(i * i));
    EXPECT_THROW(ordered_map<int>(5, [](std::size_t i) -> int {
                     if (i == 3)
                         throw Error("boom");
                     return 0;
                 }),
                 Error);
}

TEST(Poincare, InitialStatesMatch)
{
    const auto r = compute_poincare(20, 5.0, 0, 20, 200000, 11);
    EXPECT_NEAR(r.quantum.total(), 1.0, 1e-10);
    int occupied = 0;
    for (double p : r.quantum.values())
        if (p > 1e-12) {
            EXPECT_NEAR(p, 0.05, 1e-10);
            ++occupied;
        }
    EXPECT_EQ(occupied, 20);
    EXPECT_LT(r.total_variation, 0.05);
    EXPECT_NEAR(r.entropy_quantum, std::log(20.0), 1e-9);
}

TEST(Poincare, StrongKickSpreads)
{
    const auto weak = compute_poincare(20, 0.5, 14, 1, 10000, 3);
    const auto strong = compute_poincare(20, 5.0, 14, 1, 10000, 3);
    EXPECT_GT(strong.entropy_quantum, weak.entropy_quantum + 1.0);
}

TEST(Entropy, SingleCellStartsAtZero)
{
    const auto cells = entropy_start_cells(10, 8, 1);
    EXPECT_EQ(cells.size(), 8u);
    const auto s = compute_entropy_series(10, 5.0, 3, cells);
    ASSERT_EQ(s.mean.size(), 4u);
    EXPECT_NEAR(s.mean[0], 0.0, 1e-9);
    EXPECT_NEAR(s.stdev[0], 0.0, 1e-9);
    EXPECT_GT(s.mean[3], 1.0);
}

TEST(Degeneracy, RowRecordsErrors)
{
    const auto ok = compute_degeneracy(6, 5.0);
    EXPECT_TRUE(ok.error.empty());
    EXPECT_GT(ok.eta, 0.5);
    const auto bad = compute_degeneracy(5, 5.0);
    EXPECT_FALSE(bad.error.empty());
    EXPECT_TRUE(std::isnan(bad.eta));
}

TEST(Basis, SpreadScalingSlopes)
{
    const auto s = spread_scaling(spread_scaling_ells());
    EXPECT_NEAR(s.slope_l, -1.0, 0.05);
    EXPECT_NEAR(s.slope_theta, -2.5, 0.05);
    EXPECT_NEAR(seed_momentum_variance(7), 4.0, 1e-12);
}

TEST(Runner, BasisCheckFilesAndDeterminism)
{
    const fs::path dir = scratch("basis");
    auto cfg = make_config(Experiment::basis_check, {{"output_dir", dir.string()}});
    const auto files = run_experiment(cfg);
    ASSERT_EQ(files.size(), 5u);
    const std::string summary = slurp(dir / "basis_summary.csv");
    EXPECT_NE(summary.find("# experiment: basis-check"), std::string::npos);
    EXPECT_NE(summary.find("# generator: mt19937_64"), std::string::npos);
    EXPECT_NE(summary.find("\n7,4,4,"), std::string::npos);
    std::vector<std::string> first;
    for (const auto& f : files)
        first.push_back(slurp(f));
    run_experiment(cfg);
    for (std::size_t i = 0; i < files.size(); ++i)
        EXPECT_EQ(slurp(files[i]), first[i]) << files[i];
}

TEST(Runner, PoincareAndEntropyAreDeterministic)
{
    for (auto e : {Experiment::poincare, Experiment::entropy_evolution}) {
        const fs::path dir = scratch("det-" + experiment_name(e));
        auto cfg = make_config(e, {{"output_dir", dir.string()},
                                   {"ell", "10"},
                                   {"K", "0.5,5"},
                                   {"kicks", "3"},
                                   {"classical_points", "5000"},
                                   {"ensemble_size", "6"},
                                   {"seed", "99"}});
        const auto files = run_experiment(cfg);
        std::vector<std::string> first;
        for (const auto& f : files)
            first.push_back(slurp(f));
        const auto again = run_experiment(cfg);
        ASSERT_EQ(again, files);
        for (std::size_t i = 0; i < files.size(); ++i)
            EXPECT_EQ(slurp(files[i]), first[i]) << files[i];
    }
}

TEST(Runner, DegeneracyScanColumnsAndOrder)
{
    const fs::path dir = scratch("degen");
    auto cfg = make_config(Experiment::degeneracy_scan,
                           {{"output_dir", dir.string()}, {"ell", "6,8"}, {"K", "3,1,2"}});
    run_experiment(cfg);
    std::ifstream in(dir / "degeneracy_scan.csv");
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#')
            rows.push_back(line);
    ASSERT_EQ(rows.size(), 7u);
    EXPECT_EQ(rows[0], "ell,N,K,eta,eta_r2,zeta,zeta_r2,spacing_ratio");
    EXPECT_EQ(rows[1].substr(0, 7), "6,36,3,");
    EXPECT_EQ(rows[2].substr(0, 7), "6,36,1,");
    EXPECT_EQ(rows[6].substr(0, 7), "8,64,2,");
}

TEST(Runner, ObservableCheckRows)
{
    const auto rows = compute_observable_check(6, 5.0, 300, 2, 1);
    ASSERT_EQ(rows.size(), 2u + 2u * 3u);
    EXPECT_EQ(rows[0].observable, "identity");
    EXPECT_NEAR(rows[0].report.time_average, 1.0, 1e-12);
    EXPECT_NEAR(rows[0].report.diagonal_average, 1.0, 1e-12);
    EXPECT_EQ(rows[1].state, "floquet_0");
    EXPECT_LT(rows[1].report.fluctuation_sq, 1e-18);
    for (std::size_t i = 2; i < rows.size(); ++i)
        EXPECT_TRUE(rows[i].report.within_bound()) << rows[i].observable;
}
