#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>

#include "mlht/mc_engine.hpp"
#include "mlht/result_io.hpp"
#include "test_helpers.hpp"

using namespace mlht;
using namespace mlht::testing;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir()
    {
        path = std::filesystem::temp_directory_path() /
               ("mlht_test_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("reference json round trips the functional values")
{
    const SlabProblem p = one_region_problem();
    const GridHierarchy h = build_hierarchy(p, 4, 2, 1);
    const ReferenceSolution ref = aitken_reference(p, h.finest(), {4, {16, 32, 64}, 1e-11});

    TempDir dir;
    const std::string path = dir.file("reference.json");
    write_reference_json(ref, h, path);
    CHECK(read_reference_functional(path, FunctionalSpec::domain()) ==
          doctest::Approx(ref.functional_whole_domain()).epsilon(1e-12));
    CHECK(read_reference_functional(path, FunctionalSpec::coarse_cell(2)) ==
          doctest::Approx(ref.functional(FunctionalSpec::coarse_cell(2), h)).epsilon(1e-12));
}

TEST_CASE("mlmc result files feed the report writer")
{
    const SlabProblem p = one_region_problem();
    const GridHierarchy h = build_hierarchy(p, 4, 2, 2);
    MLMCConfig cfg;
    cfg.epsilon = 0.05;
    cfg.n_ini = 3;
    cfg.histories = {300};
    cfg.seed = 21;
    const MLMCResult res = run_mlmc(cfg, p, h);

    TempDir dir;
    write_mlmc_result_json(res, dir.file("result.json"));
    write_mlmc_levels_csv(res, dir.file("levels.csv"));
    write_flux_csv(res.flux, h.finest(), dir.file("flux.csv"));

    const ReferenceSolution ref = aitken_reference(p, h.finest(), {4, {16, 32, 64}, 1e-11});
    write_reference_json(ref, h, dir.file("reference.json"));
    write_report({dir.file("result.json")}, dir.file("reference.json"), dir.path.string());

    std::ifstream summary(dir.file("summary.csv"));
    REQUIRE(summary.good());
    std::string header, row;
    std::getline(summary, header);
    std::getline(summary, row);
    CHECK(header.find("alpha") != std::string::npos);
    CHECK(header.find("squared_error") != std::string::npos);
    CHECK(!row.empty());

    std::ifstream levels(dir.file("levels_long.csv"));
    REQUIRE(levels.good());
    std::getline(levels, header);
    int rows = 0;
    while (std::getline(levels, row))
        if (!row.empty()) ++rows;
    CHECK(rows == h.num_levels());
}

TEST_CASE("debug dumps: tallies, closures, vector-mode results")
{
    const SlabProblem p = one_region_problem();
    const GridHierarchy h = build_hierarchy(p, 4, 2, 2);
    TempDir dir;

    const TallySet t = run_ensemble(p, h.grid(0), 200, {12, 0, 1});
    t.write_csv(dir.file("tally.csv"));
    std::ifstream tally_csv(dir.file("tally.csv"));
    std::string header;
    std::getline(tally_csv, header);
    CHECK(header == "level,cell,T0,T1,T2");

    write_closure_csv(closures_from_tally(t), h.grid(0), dir.file("closures.csv"));
    std::ifstream closure_csv(dir.file("closures.csv"));
    std::getline(closure_csv, header);
    CHECK(header == "level,cell,x_mid,eddington,h");

    MLMCConfig cfg;
    cfg.epsilon = 0.05;
    cfg.n_ini = 3;
    cfg.histories = {200};
    cfg.functional = FunctionalSpec::all_cells();
    const MLMCResult res = run_mlmc(cfg, p, h);
    CHECK(res.vector_mode);
    CHECK(res.cells.size() == 4);
    write_mlmc_result_json(res, dir.file("vector_result.json"));
    std::ifstream json_in(dir.file("vector_result.json"));
    CHECK(json_in.good());
}
