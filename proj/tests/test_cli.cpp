#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <json.hpp>

// Black-box tests of the command line binary: exit codes, error channels,
// file contract, determinism. The binary path arrives as the first
// non-flag argument (CMake passes the build-tree location).

namespace {

std::string g_uswg;
std::filesystem::path g_work;

struct RunResult {
    int code = -1;
    std::string out, err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    static int seq = 0;
    const std::filesystem::path so = g_work / ("stdout." + std::to_string(seq));
    const std::filesystem::path se = g_work / ("stderr." + std::to_string(seq));
    ++seq;
    const std::string cmd = "'" + g_uswg + "' " + args + " > '" + so.string() +
                            "' 2> '" + se.string() + "'";
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(so);
    r.err = slurp(se);
    return r;
}

std::filesystem::path write_config(const std::string& name,
                                   const std::string& text) {
    const std::filesystem::path p = g_work / name;
    std::ofstream out(p);
    out << text;
    return p;
}

std::filesystem::path out_dir(const std::string& name) {
    return g_work / name;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> ls;
    std::istringstream ss(text);
    std::string l;
    while (std::getline(ss, l)) ls.push_back(l);
    return ls;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> f;
    std::istringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    return f;
}

} // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("").code == 2);                    // no subcommand
    CHECK(run_cli("frobnicate").code == 2);          // unknown subcommand
    CHECK(run_cli("spectral --no-such-flag").code == 2);
    const RunResult r = run_cli("ground-state --config " +
                                (g_work / "missing.json").string());
    CHECK(r.code == 2);
    CHECK(r.err.find("cannot open") != std::string::npos);
}

TEST_CASE("config validation names the offending key") {
    const auto bad = write_config("bad_key.json", R"({"alpha": 0.1, "bogus": 1})");
    RunResult r = run_cli("spectral --config " + bad.string());
    CHECK(r.code == 2);
    CHECK(r.err.find("unknown key 'bogus'") != std::string::npos);

    const auto nested = write_config("bad_nested.json",
                                     R"({"dynamics": {"foo": 1}})");
    r = run_cli("dynamics --config " + nested.string());
    CHECK(r.code == 2);
    CHECK(r.err.find("unknown key 'dynamics.foo'") != std::string::npos);

    const auto neg = write_config("neg_alpha.json", R"({"alpha": -0.25})");
    r = run_cli("spectral --config " + neg.string());
    CHECK(r.code == 2);
    CHECK(r.err.find("alpha must be >= 0") != std::string::npos);

    const auto even = write_config("even_n.json", R"({"N": 1000})");
    r = run_cli("spectral --config " + even.string());
    CHECK(r.code == 2);
    CHECK(r.err.find("N must be odd") != std::string::npos);

    const auto both = write_config("both_delta.json",
                                   R"({"delta": 1.0, "delta_over_omega_c": 0.2})");
    r = run_cli("spectral --config " + both.string());
    CHECK(r.code == 2);
    CHECK(r.err.find("only one of delta") != std::string::npos);

    const auto text = write_config("not_json.json", "alpha = 0.1");
    r = run_cli("spectral --config " + text.string());
    CHECK(r.code == 2);
    CHECK(r.err.find("invalid JSON") != std::string::npos);
}

TEST_CASE("flag validation") {
    RunResult r = run_cli("spectral --kernels sse");
    CHECK(r.code == 2);
    CHECK(r.err.find("auto|scalar|avx2") != std::string::npos);

    CHECK(run_cli("ground-state --alpha 0.1 --threads 0").code == 2);
    CHECK(run_cli("ground-state --x-sep pineapple").code == 2);
    CHECK(run_cli("ground-state --alpha 0.1 --sweep q=1:2:3").code == 2);
    CHECK(run_cli("ground-state --sweep alpha=1:2:3 --sweep alpha=1:2:3").code == 2);
    CHECK(run_cli("dde --alpha 0.01 --init eg").code == 2);
    CHECK(run_cli("dynamics --alpha 0.01 --x-sep far").code == 2);

    r = run_cli("recipe nope");
    CHECK(r.code == 2);
    CHECK(r.err.find("unknown recipe 'nope'") != std::string::npos);
    CHECK(r.err.find("fig1a") != std::string::npos);

    const auto empty = write_config("empty_alphas.json",
                                    R"({"recipe": {"alphas": []}})");
    r = run_cli("recipe fig2 --config " + empty.string());
    CHECK(r.code == 2);
    CHECK(r.err.find("recipe.alphas") != std::string::npos);
}

TEST_CASE("spectral writes the binned line") {
    const auto dir = out_dir("spec_run");
    const RunResult r = run_cli("spectral --alpha 0.1 --out " + dir.string());
    REQUIRE(r.code == 0);
    const auto ls = lines_of(slurp(dir / "spectral.csv"));
    REQUIRE(ls.size() == 11);  // header + default 10 bins
    CHECK(ls[0] == "omega,J_binned,J_analytic");
    for (std::size_t i = 1; i < ls.size(); ++i)
        CHECK(split_csv(ls[i]).size() == 3);
}

TEST_CASE("ground state runs and the manifest records the setup") {
    const auto dir = out_dir("gs_run");
    const RunResult r =
        run_cli("ground-state --alpha 0.1 --out " + dir.string());
    REQUIRE(r.code == 0);

    const auto ls = lines_of(slurp(dir / "ground_state.csv"));
    REQUIRE(ls.size() == 2);
    CHECK(ls[0] ==
          "alpha,x,delta_r,ising_J,theta,e_gs,magnetization,entropy,"
          "converged,iterations");
    const auto f = split_csv(ls[1]);
    REQUIRE(f.size() == 10);
    CHECK(std::stod(f[0]) == 0.1);
    CHECK(std::stod(f[8]) == 1.0);  // converged

    const nlohmann::json man = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(man.at("command") == "ground-state");
    const std::string kern = man.at("kernel");
    CHECK((kern == "scalar" || kern == "avx2"));
    const auto& files = man.at("files");
    CHECK(std::find(files.begin(), files.end(), "ground_state.csv") != files.end());
    CHECK(std::find(files.begin(), files.end(), "manifest.json") != files.end());
    const auto& cfg = man.at("config");
    CHECK(cfg.at("schema") == 1);
    CHECK(cfg.at("waveguide").at("alpha") == 0.1);
    CHECK(cfg.at("waveguide").at("N") == 1001);
    CHECK(cfg.at("x_sep").at("far") == false);
    CHECK(cfg.at("x_sep").at("defaulted") == true);
    CHECK(cfg.at("delta").at("from_ratio") == true);
    CHECK(cfg.at("dynamics").contains("dt"));
    CHECK(cfg.at("dde").contains("t_max"));
    CHECK(cfg.at("oracle").contains("n_modes"));
    CHECK(cfg.at("spectral").contains("n_bins"));
}

TEST_CASE("far separation row") {
    const auto dir = out_dir("far_run");
    const RunResult r =
        run_cli("ground-state --alpha 0.1 --x-sep far --out " + dir.string());
    REQUIRE(r.code == 0);
    const auto ls = lines_of(slurp(dir / "ground_state.csv"));
    REQUIRE(ls.size() == 2);
    CHECK(split_csv(ls[1])[1] == "-1");  // x column marks the limit

    const nlohmann::json man = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(man.at("config").at("x_sep").at("far") == true);
    CHECK(man.at("config").at("x_sep").at("value").is_null());
}

TEST_CASE("reruns are byte identical") {
    const auto d1 = out_dir("det_a"), d2 = out_dir("det_b");
    const std::string args = "ground-state --alpha 0.1 --sweep alpha=0.05:0.3:4 ";
    REQUIRE(run_cli(args + "--out " + d1.string()).code == 0);
    REQUIRE(run_cli(args + "--out " + d2.string()).code == 0);
    const std::string a = slurp(d1 / "ground_state.csv");
    const std::string b = slurp(d2 / "ground_state.csv");
    REQUIRE(a.size() > 0);
    CHECK(a == b);
    CHECK(lines_of(a).size() == 5);  // header + 4 sweep rows
}

TEST_CASE("minimal config file is enough") {
    const auto cfg = write_config("minimal.json", R"({"alpha": 0.1})");
    const auto dir = out_dir("min_run");
    const RunResult r = run_cli("spectral --config " + cfg.string() + " --out " +
                                dir.string());
    CHECK(r.code == 0);
    CHECK(std::filesystem::exists(dir / "spectral.csv"));
    CHECK(std::filesystem::exists(dir / "manifest.json"));
}

TEST_CASE("dynamics trajectory file") {
    const auto dir = out_dir("dyn_run");
    const RunResult r = run_cli(
        "dynamics --alpha 0.01 --init antisym --t-max 1 --stride 10 --out " +
        dir.string());
    REQUIRE(r.code == 0);
    const auto ls = lines_of(slurp(dir / "dynamics.csv"));
    REQUIRE(ls.size() > 10);
    CHECK(ls[0] ==
          "t,re_c1,im_c1,re_c2,im_c2,sz1_pol,sz2_pol,sz1_lab,sz2_lab,"
          "gamma1,gamma2,norm");
    const auto first = split_csv(ls[1]);
    REQUIRE(first.size() == 12);
    CHECK(std::stod(first[0]) == 0.0);
    // antisymmetric start: c1 = -c2 = 1/sqrt(2)
    CHECK(std::stod(first[1]) == doctest::Approx(0.70710678).epsilon(1e-7));
    CHECK(std::stod(first[3]) == doctest::Approx(-0.70710678).epsilon(1e-7));
}

TEST_CASE("dde run reports the steady state in the footer") {
    const auto dir = out_dir("dde_run");
    RunResult r = run_cli(
        "dde --alpha 0.01 --init antisym --t-max 1 --out " + dir.string());
    REQUIRE(r.code == 0);
    CHECK(r.out.find("gamma") != std::string::npos);
    auto ls = lines_of(slurp(dir / "dde.csv"));
    REQUIRE(ls.size() > 3);
    CHECK(ls[0] == "t,re_c1,im_c1,re_c2,im_c2,norm");
    auto f = split_csv(ls.back());
    REQUIRE(f.size() == 5);
    CHECK(f[0] == "# steady_state");
    CHECK(f[1] == "antisym");
    CHECK(std::stod(f[2]) == doctest::Approx(0.6441651).epsilon(1e-5));
    CHECK(std::stod(f[3]) == doctest::Approx(-0.1701027).epsilon(1e-5));
    CHECK(f[4] == "both");

    // off the delay resonance there is no closed form; the footer says so
    const auto dir2 = out_dir("dde_run_off");
    r = run_cli("dde --alpha 0.1 --init antisym --t-max 1 --out " + dir2.string());
    REQUIRE(r.code == 0);
    ls = lines_of(slurp(dir2 / "dde.csv"));
    CHECK(ls.back() == "# steady_state,none,nan,nan,off-resonant");
}

TEST_CASE("oracle summary file") {
    const auto dir = out_dir("orc_run");
    const RunResult r = run_cli("oracle --alpha 0.1 --out " + dir.string());
    REQUIRE(r.code == 0);
    CHECK(r.out.find("e_exact") != std::string::npos);
    const auto ls = lines_of(slurp(dir / "oracle.csv"));
    REQUIRE(ls.size() == 2);
    CHECK(ls[0] == "alpha,x,e_exact,e_polaron,gap,parity");
    const auto f = split_csv(ls[1]);
    REQUIRE(f.size() == 6);
    // brute force ground below the variational one
    CHECK(std::stod(f[2]) <= std::stod(f[3]));
    CHECK(std::stod(f[5]) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("scalar and auto kernels write identical physics") {
    const auto da = out_dir("kern_a"), ds = out_dir("kern_s");
    const std::string args = "dynamics --alpha 0.01 --t-max 1 --stride 10 ";
    REQUIRE(run_cli(args + "--kernels auto --out " + da.string()).code == 0);
    REQUIRE(run_cli(args + "--kernels scalar --out " + ds.string()).code == 0);
    const auto a = lines_of(slurp(da / "dynamics.csv"));
    const auto s = lines_of(slurp(ds / "dynamics.csv"));
    REQUIRE(a.size() == s.size());
    // equal up to rounding (bitwise when auto resolves to scalar)
    for (std::size_t i = 1; i < a.size(); ++i) {
        const auto fa = split_csv(a[i]), fs = split_csv(s[i]);
        REQUIRE(fa.size() == fs.size());
        for (std::size_t j = 0; j < fa.size(); ++j) {
            if (fa[j] == fs[j]) continue;  // also covers nan placeholders
            CHECK(std::stod(fa[j]) ==
                  doctest::Approx(std::stod(fs[j])).epsilon(1e-9));
        }
    }
}

int run_all(int argc, char** argv) {
    std::vector<char*> pass;
    for (int i = 0; i < argc; ++i) {
        if (i > 0 && g_uswg.empty() && argv[i][0] != '-' &&
            std::filesystem::exists(argv[i])) {
            g_uswg = std::filesystem::absolute(argv[i]).string();
            continue;
        }
        pass.push_back(argv[i]);
    }
    if (g_uswg.empty()) {
        std::fprintf(stderr, "usage: test_cli <path-to-uswg> [doctest args]\n");
        return 1;
    }
    char tmpl[] = "/tmp/uswg_cli_XXXXXX";
    if (!mkdtemp(tmpl)) {
        std::perror("mkdtemp");
        return 1;
    }
    g_work = tmpl;

    doctest::Context ctx;
    ctx.applyCommandLine(static_cast<int>(pass.size()), pass.data());
    const int rc = ctx.run();
    std::error_code ec;
    std::filesystem::remove_all(g_work, ec);
    return rc;
}

int main(int argc, char** argv) { return run_all(argc, argv); }
