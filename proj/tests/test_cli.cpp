#include <catch2/catch_amalgamated.hpp>

#include <germgrain/cli.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace germgrain;

namespace {

struct CliResult {
    int code = -1;
    std::string out, err;
};

CliResult invoke(const std::vector<std::string>& args) {
    std::ostringstream o, e;
    int code = cli::run(args, o, e);
    return {code, o.str(), e.str()};
}

std::string write_file(const std::string& name, const std::string& text) {
    std::string path = "/tmp/germgrain_cli_" + name;
    std::ofstream f(path);
    f << text;
    return path;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

// cell lookup by header name, first data row = index 1
std::string cell(const std::string& csv, std::size_t row, const std::string& col) {
    auto ls = lines_of(csv);
    REQUIRE(row < ls.size());
    auto header = split_csv_line(ls[0]);
    auto cells = split_csv_line(ls[row]);
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == col) return cells[i];
    FAIL("no column '" << col << "' in header '" << ls[0] << "'");
    return {};
}

}  // namespace

TEST_CASE("config parser handles sections, comments and whitespace", "[cli]") {
    auto cfg = Config::parse_text(
        "# leading comment\n"
        "top = 1\n"
        "[generator]\n"
        "  family = poisson  \n"
        "intensity=2.5\n"
        "; another comment\n"
        "[run]\n"
        "window = 10\n");
    CHECK(cfg.get_str("top") == "1");
    CHECK(cfg.get_str("generator.family") == "poisson");
    CHECK(cfg.get_num("generator.intensity") == 2.5);
    CHECK(cfg.get_int("run.window") == 10);
    CHECK(cfg.has_section("generator"));
    CHECK_FALSE(cfg.has_section("gen"));
    cfg.finish("test");
}

TEST_CASE("config parser rejects malformed input with line numbers", "[cli]") {
    auto message = [](const std::string& text) {
        try {
            Config::parse_text(text);
            return std::string("no error");
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
    };
    CHECK(message("a = 1\nb\n").find("line 2") != std::string::npos);
    CHECK(message("[run\nx = 1\n").find("unterminated") != std::string::npos);
    CHECK(message("[bad name]\n").find("bad section") != std::string::npos);
    CHECK(message("x = 1\nx = 2\n").find("duplicate key 'x'") != std::string::npos);
    CHECK(message("[s]\nk = 1\n[s]\nk = 2\n").find("duplicate key 's.k'") != std::string::npos);
    CHECK(message("a b = 1\n").find("bad key") != std::string::npos);
}

TEST_CASE("config typed getters report the offending key", "[cli]") {
    auto cfg = Config::parse_text("[a]\nx = oops\ny = 1.5\nz = 2 4 6\n");
    CHECK_THROWS_WITH(cfg.get_num("a.x"), Catch::Matchers::ContainsSubstring("'a.x'"));
    CHECK_THROWS_WITH(cfg.get_int("a.y"), Catch::Matchers::ContainsSubstring("'a.y'"));
    CHECK_THROWS_WITH(cfg.get_num("a.missing"), Catch::Matchers::ContainsSubstring("missing required"));
    CHECK(cfg.get_list("a.z") == std::vector<double>{2.0, 4.0, 6.0});
    CHECK(cfg.get_num("a.absent", 9.0) == 9.0);

    auto cfg2 = Config::parse_text("[a]\nused = 1\nunused = 2\n");
    CHECK(cfg2.get_int("a.used") == 1);
    CHECK_THROWS_WITH(cfg2.finish("test"), Catch::Matchers::ContainsSubstring("'a.unused'"));
}

TEST_CASE("config hash is canonical and ignores output plumbing", "[cli]") {
    auto a = Config::parse_text("[run]\nseed = 3\nwindow = 10\n");
    auto b = Config::parse_text("# comment\n[run]\nwindow = 10\nseed = 3\n");
    CHECK(a.hash("sweep-r") == b.hash("sweep-r"));
    CHECK(a.hash("sweep-r") != a.hash("kperc"));

    auto c = Config::parse_text("[run]\nseed = 4\nwindow = 10\n");
    CHECK(a.hash("sweep-r") != c.hash("sweep-r"));

    auto d = Config::parse_text("[run]\nseed = 3\nwindow = 10\nout = /tmp/x.csv\nthreads = 4\n");
    CHECK(a.hash("sweep-r") == d.hash("sweep-r"));
}

TEST_CASE("flag overrides land in the config before hashing", "[cli]") {
    std::string base =
        "[generator]\n"
        "family = poisson\n"
        "intensity = 1.0\n"
        "[grid]\n"
        "r_list = 0.5\n"
        "[run]\n"
        "window = 6\n"
        "reps = 5\n";
    auto with_seed = write_file("override_a.ini", base + "seed = 9\n");
    auto without = write_file("override_b.ini", base);
    auto r1 = invoke({"sweep-r", "--config", with_seed});
    auto r2 = invoke({"sweep-r", "--config", without, "--seed", "9"});
    REQUIRE(r1.code == 0);
    REQUIRE(r2.code == 0);
    CHECK(r1.out == r2.out);
    CHECK(cell(r1.out, 1, "seed") == "9");

    auto r3 = invoke({"sweep-r", "--config", without, "--seed=9"});
    CHECK(r3.out == r1.out);

    auto r4 = invoke({"sweep-r", "--config", without, "--seed", "10"});
    CHECK(r4.out != r1.out);
    CHECK(cell(r4.out, 1, "config_hash") != cell(r1.out, 1, "config_hash"));
}

TEST_CASE("bounds prints the analytic constants", "[cli]") {
    auto r = invoke({"bounds", "--lambda", "1.154701", "--d", "2"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("rc_lower") != std::string::npos);
    CHECK(r.out.find("rc_upper_tilde") != std::string::npos);

    auto ls = lines_of(r.out);
    std::size_t header = 0;
    for (std::size_t i = 0; i < ls.size(); ++i)
        if (ls[i].rfind("quantity,", 0) == 0) header = i;
    REQUIRE(header > 0);
    std::string csv;
    for (std::size_t i = header; i < ls.size(); ++i) csv += ls[i] + "\n";
    CHECK(std::stod(cell(csv, 1, "value")) == Catch::Approx(0.164508).margin(1e-4));
    CHECK(cell(csv, 1, "quantity") == "rc_lower");
    CHECK(std::stod(cell(csv, 2, "value")) == Catch::Approx(1.83585).margin(1e-4));
    CHECK(std::stod(cell(csv, 4, "value")) == Catch::Approx(std::stod(cell(csv, 2, "value"))));
}

TEST_CASE("cli rejects bad invocations with exit code 2", "[cli]") {
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
    CHECK(invoke({"sweep-r", "--bogus", "1"}).code == 2);
    CHECK(invoke({"sweep-r", "--seed"}).code == 2);
    CHECK(invoke({"sweep-r", "--seed", "1", "--seed", "2"}).code == 2);
    CHECK(invoke({"sweep-r", "--lambda", "2"}).code == 2);
    CHECK(invoke({"bounds", "--lambda", "1.0", "stray"}).code == 2);
    CHECK(invoke({"--help"}).code == 0);
    CHECK(invoke({"help"}).code == 0);

    auto cfgp = write_file("badkey.ini",
                           "[generator]\nfamily = poisson\nintensity = 1\ntypo_key = 3\n"
                           "[run]\nwindow = 5\nreps = 2\n[grid]\nr_list = 0.5\n");
    auto r = invoke({"sweep-r", "--config", cfgp});
    CHECK(r.code == 2);
    CHECK(r.err.find("generator.typo_key") != std::string::npos);

    auto r2 = invoke({"sweep-r", "--config", "/tmp/does_not_exist_germgrain.ini"});
    CHECK(r2.code == 2);
    CHECK(r2.err.find("cannot open") != std::string::npos);
}

TEST_CASE("subcommands a config does not use reject stray sections", "[cli]") {
    auto cfgp = write_file("stray.ini",
                           "[generator]\nfamily = poisson\nintensity = 1\n"
                           "[grid]\nr_list = 0.5\n[run]\nwindow = 5\nseed = 2\n");
    auto r = invoke({"generate", "--config", cfgp});
    CHECK(r.code == 2);
    CHECK(r.err.find("grid.r_list") != std::string::npos);
}

TEST_CASE("generate emits a loadable pattern with reproducibility sidecars", "[cli]") {
    auto cfgp = write_file("generate.ini",
                           "[generator]\nfamily = poisson\nintensity = 1.5\n"
                           "[run]\nwindow = 6\nseed = 11\n");
    auto out_path = "/tmp/germgrain_cli_pattern.csv";
    auto r = invoke({"generate", "--config", cfgp, "--out", out_path});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());

    std::ifstream f(out_path);
    REQUIRE(f.good());
    std::stringstream buf;
    buf << f.rdbuf();
    std::string text = buf.str();
    CHECK(text.rfind("# seed 11", 0) == 0);
    CHECK(text.find("# config_hash ") != std::string::npos);

    std::istringstream is(text);
    PointPattern pat = read_pattern_csv(is);
    CHECK(pat.window.dim() == 2);
    CHECK(pat.window.upper[0] == 6.0);
    CHECK(pat.size() > 0);

    auto again = invoke({"generate", "--config", cfgp});
    REQUIRE(again.code == 0);
    CHECK(again.out == text);
}

TEST_CASE("every tabular subcommand is rerun byte-identical", "[cli]") {
    const std::string gen2 =
        "[generator]\nfamily = perturbed\nlattice = hexagonal\nkernel = binomial\nn = 2\np = 0.5\n";
    struct Case {
        const char* name;
        std::vector<std::string> args;
    };
    std::vector<Case> cases;
    auto p_sweep = write_file("det_sweep.ini",
                              gen2 + "[grid]\nr_list = 0.45 0.55\n[run]\nwindow = 6\nreps = 4\n");
    cases.push_back({"sweep-r", {"sweep-r", "--config", p_sweep, "--seed", "5"}});
    auto p_perc = write_file("det_perc.ini",
                             gen2 + "[percolate]\nr = 0.5\n[run]\nwindow = 6\n");
    cases.push_back({"percolate", {"percolate", "--config", p_perc, "--seed", "5"}});
    auto p_rc = write_file("det_rc.ini",
                           "[generator]\nfamily = poisson\nintensity = 1.154701\n"
                           "[rc]\nr_lo = 0.3\nr_hi = 0.9\ntol = 0.1\n[run]\nwindow = 8\nreps = 12\n");
    cases.push_back({"estimate-rc", {"estimate-rc", "--config", p_rc, "--seed", "5"}});
    auto p_kperc = write_file("det_kperc.ini",
                              "[generator]\nfamily = poisson\nintensity = 4\n"
                              "[grid]\nr_list = 0.5\n[kperc]\nk = 1\n[run]\nwindow = 5\nreps = 6\n");
    cases.push_back({"kperc", {"kperc", "--config", p_kperc, "--seed", "5"}});
    auto p_rbar = write_file("det_rbar.ini",
                             "[generator]\nfamily = poisson\nintensity = 1.2\n"
                             "[grid]\nr_list = 0.3\n[rbar]\nscale = 1\nmax_len = 8\n[run]\nreps = 20\n");
    cases.push_back({"rbar", {"rbar", "--config", p_rbar, "--seed", "5"}});
    auto p_paths = write_file("det_paths.ini",
                              "[generator]\nfamily = poisson\nintensity = 1.2\n"
                              "[grid]\nr_list = 0.35\n[rpaths]\nm = 2\ncap = 50000\n[run]\nreps = 8\n");
    cases.push_back({"rpaths", {"rpaths", "--config", p_paths, "--seed", "5"}});
    auto p_sinr = write_file("det_sinr.ini",
                             "[nodes]\nfamily = poisson\nintensity = 1.2\n"
                             "[sinr]\nN = 0.03014081790123457\n[grid]\ngamma_list = 0 0.05\n"
                             "[run]\nwindow = 5\nreps = 6\n");
    cases.push_back({"sinr-sweep", {"sinr-sweep", "--config", p_sinr, "--seed", "5"}});
    auto p_cx = write_file("det_cx.ini",
                           "[dist_a]\nkernel = binomial\nn = 4\np = 0.5\n"
                           "[dist_b]\nkernel = poisson\nmean = 2\n");
    cases.push_back({"cx-check", {"cx-check", "--config", p_cx}});
    auto p_dcx = write_file("det_dcx.ini",
                            "[table]\nrow1 = 0.4 0.3\n[dcx]\nmodel_a = det\nmodel_b = poi\n"
                            "s_list = 0.5\n[run]\nreps = 400\n");
    cases.push_back({"counts-dcx", {"counts-dcx", "--config", p_dcx, "--seed", "5"}});
    auto p_stats = write_file("det_stats.ini",
                              gen2 + "[stats]\nmode = void\nbox = 1 1 2 2\n[run]\nwindow = 5\nreps = 40\n");
    cases.push_back({"stats", {"stats", "--config", p_stats, "--seed", "5"}});
    cases.push_back({"bounds", {"bounds", "--lambda", "2.0", "--d", "3"}});
    auto p_f2 = write_file("det_fig.ini", "[grid]\nr_list = 0.5 0.6\n[run]\nwindow = 5\nreps = 2\n");
    cases.push_back({"figure2", {"figure2", "--config", p_f2, "--seed", "5"}});
    cases.push_back({"figure4", {"figure4", "--config", p_f2, "--seed", "5"}});

    for (const auto& cs : cases) {
        INFO(cs.name);
        auto r1 = invoke(cs.args);
        auto r2 = invoke(cs.args);
        REQUIRE(r1.code == 0);
        CHECK(r1.err.empty());
        CHECK(r1.out == r2.out);
        CHECK(r1.out.find("config_hash") != std::string::npos);
    }
}

TEST_CASE("figure presets cover the advertised families", "[cli]") {
    auto p = write_file("fig_small.ini", "[grid]\nr_list = 0.5 0.6\n[run]\nwindow = 5\nreps = 2\n");
    auto r2 = invoke({"figure2", "--config", p, "--seed", "3"});
    REQUIRE(r2.code == 0);
    auto ls = lines_of(r2.out);
    CHECK(ls.size() == 1 + 7 * 2);
    CHECK(ls[0] == "family,n,r,mean_frac1,mean_frac2,p_span,ci_lo,ci_hi,reps,seed,config_hash");
    CHECK(split_csv_line(ls[1])[0] == "binomial");
    CHECK(split_csv_line(ls[1])[1] == "1");
    CHECK(split_csv_line(ls[13])[0] == "poisson");
    CHECK(split_csv_line(ls[13])[1] == "inf");

    auto r4 = invoke({"figure4", "--config", p, "--seed", "3"});
    REQUIRE(r4.code == 0);
    auto ls4 = lines_of(r4.out);
    CHECK(ls4.size() == 1 + 6 * 2);
    CHECK(split_csv_line(ls4[1])[0] == "nbinomial");
    CHECK(split_csv_line(ls4[11])[0] == "poisson");
}

TEST_CASE("estimator failures surface verbatim with exit code 1", "[cli]") {
    auto p = write_file("badbracket.ini",
                        "[generator]\nfamily = poisson\nintensity = 1.154701\n"
                        "[rc]\nr_lo = 2.0\nr_hi = 3.0\n[run]\nwindow = 8\nreps = 10\n");
    auto r = invoke({"estimate-rc", "--config", p});
    CHECK(r.code == 1);
    CHECK(r.err.find("bracket") != std::string::npos);

    auto p2 = write_file("badmodel.ini",
                         "[table]\nrow1 = 0.4 0.3\n[dcx]\nmodel_a = det\nmodel_b = nope\n"
                         "[run]\nreps = 100\n");
    auto r2 = invoke({"counts-dcx", "--config", p2});
    CHECK(r2.code == 2);
    CHECK(r2.err.find("dcx.model_b") != std::string::npos);

    auto p3 = write_file("badmode.ini",
                         "[generator]\nfamily = poisson\nintensity = 1\n"
                         "[stats]\nmode = wat\n[run]\nwindow = 5\n");
    auto r3 = invoke({"stats", "--config", p3});
    CHECK(r3.code == 2);
    CHECK(r3.err.find("stats.mode") != std::string::npos);
}

TEST_CASE("cx-check reports the exact verdict for a known pair", "[cli]") {
    auto p = write_file("cx_pair.ini",
                        "[dist_a]\nkernel = binomial\nn = 6\np = 0.33333333333333331\n"
                        "[dist_b]\nkernel = poisson\nmean = 1.9999999999999998\n");
    auto r = invoke({"cx-check", "--config", p});
    REQUIRE(r.code == 0);
    CHECK(cell(r.out, 1, "flag") == "a_le_b");
    CHECK(std::stod(cell(r.out, 1, "value_a")) == Catch::Approx(2.0).epsilon(1e-9));
    CHECK(cell(r.out, 1, "config_a").rfind("binomial;n=6", 0) == 0);

    auto p2 = write_file("cx_swap.ini",
                         "[dist_a]\nkernel = poisson\nmean = 1.9999999999999998\n"
                         "[dist_b]\nkernel = binomial\nn = 6\np = 0.33333333333333331\n");
    auto r2 = invoke({"cx-check", "--config", p2});
    CHECK(cell(r2.out, 1, "flag") == "b_le_a");
}

TEST_CASE("stats ripley flags a clustered process above the poisson reference", "[cli]") {
    auto p = write_file("ripley_nbin.ini",
                        "[generator]\nfamily = perturbed\nlattice = square\nspacing = 1\n"
                        "kernel = nbinomial\nr = 0.25\np = 0.8\n[stats]\nmode = ripley\n"
                        "[grid]\nr_list = 1.5\n[run]\nwindow = 12\nreps = 60\n");
    auto r = invoke({"stats", "--config", p, "--seed", "7"});
    REQUIRE(r.code == 0);
    CHECK(cell(r.out, 1, "flag") == "above");
    CHECK(std::stod(cell(r.out, 1, "value_a")) > std::stod(cell(r.out, 1, "value_b")));
}

TEST_CASE("stats moments matches the poisson product reference", "[cli]") {
    auto p = write_file("moments_poi.ini",
                        "[generator]\nfamily = poisson\nintensity = 2\n"
                        "[stats]\nmode = moments\nbox1 = 0 0 1 1\nbox2 = 3 3 4 4\n"
                        "[run]\nwindow = 6\nreps = 400\n");
    auto r = invoke({"stats", "--config", p, "--seed", "7"});
    REQUIRE(r.code == 0);
    CHECK(cell(r.out, 1, "statistic") == "factorial_moment");
    CHECK(std::stod(cell(r.out, 1, "value_b")) == Catch::Approx(4.0));
    CHECK(cell(r.out, 1, "flag") == "within_ci");
}

TEST_CASE("out flag writes the artifact to a file instead of stdout", "[cli]") {
    auto p = write_file("outfile.ini",
                        "[generator]\nfamily = poisson\nintensity = 1\n"
                        "[grid]\nr_list = 0.5\n[run]\nwindow = 5\nreps = 3\n");
    std::string out_path = "/tmp/germgrain_cli_sweep_out.csv";
    std::remove(out_path.c_str());
    auto r = invoke({"sweep-r", "--config", p, "--seed", "2", "--out", out_path});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream f(out_path);
    REQUIRE(f.good());
    std::stringstream buf;
    buf << f.rdbuf();
    auto direct = invoke({"sweep-r", "--config", p, "--seed", "2"});
    CHECK(buf.str() == direct.out);

    auto threaded = invoke({"sweep-r", "--config", p, "--seed", "2", "--threads", "3"});
    CHECK(threaded.out == direct.out);
    CHECK(invoke({"sweep-r", "--config", p, "--seed", "2", "--threads", "0"}).code == 2);
}
