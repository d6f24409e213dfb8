#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "khintype/cli/app.hpp"
#include "khintype/cli/config.hpp"

using namespace khintype::cli;

namespace {

struct Result {
    int status;
    std::string out, err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "khintype");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int status = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {status, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("khintype_test_" + name);
}

}  // namespace

TEST(Cli, NoArgumentsPrintsUsage) {
    const auto r = invoke({});
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("Usage"), std::string::npos);
    EXPECT_NE(r.out.find("typicality"), std::string::npos);
}

TEST(Cli, Catalog) {
    const auto r = invoke({"catalog"});
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("veronese5: surjective=yes det1=no rank2=no"), std::string::npos);
    EXPECT_NE(r.out.find("tracefree2: rank2=yes drv=no"), std::string::npos);
}

TEST(Cli, SeriesSummary) {
    const auto r = invoke({"series", "--d", "4", "--m", "1", "--k", "1", "--s", "5"});
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.err.find("Case 1 applies; CONVERGES"), std::string::npos);
    EXPECT_NE(r.out.find("\"summary\": \"Case 1 applies; CONVERGES\""), std::string::npos);
}

TEST(Cli, CountCsvHasHeaderAndHash) {
    const auto r = invoke({"count", "--manifold", "tracefree2", "--k", "2", "--q", "64..256x2", "--kappa", "phi",
                           "--theta", "0"});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(r.out.rfind("# khintype 0.1.0 config=", 0), 0u);
    EXPECT_NE(r.out.find("q,kappa_num,kappa_den,theta_id,A,envelope,ratio\n"), std::string::npos);
    EXPECT_NE(r.err.find("max ratio"), std::string::npos);
}

TEST(Cli, Errors) {
    EXPECT_EQ(invoke({"count", "--manifold", "nope"}).status, 1);
    EXPECT_EQ(invoke({"count", "--bogus"}).status, 1);
    EXPECT_EQ(invoke({"series", "--d", "2"}).status, 1);
    EXPECT_EQ(invoke({"count", "--config", "/nonexistent/file.ini"}).status, 1);
}

TEST(Cli, ConfigFileAndOverride) {
    const auto ini = temp_file("cfg.ini");
    {
        std::ofstream f(ini);
        f << "[run]\ncommand = series\nseed = 3\n[params]\nd = 4\nm = 1\n[sweep]\nk = 1\n[params2]\nx = 1\n";
    }
    EXPECT_EQ(invoke({"series", "--config", ini.string()}).status, 1);  // unknown section
    {
        std::ofstream f(ini);
        f << "[run]\ncommand = series\nseed = 3\n[params]\nd = 4\nm = 1\ns = 5\n[sweep]\nk = 1\n";
    }
    const auto a = invoke({"series", "--config", ini.string()});
    ASSERT_EQ(a.status, 0) << a.err;
    EXPECT_NE(a.err.find("Case 1 applies; CONVERGES"), std::string::npos);
    const auto b = invoke({"series", "--config", ini.string(), "--k", "2"});
    EXPECT_NE(b.out.find("\"k\": 2"), std::string::npos);
    EXPECT_EQ(invoke({"count", "--config", ini.string()}).status, 1);  // config names another command
    std::filesystem::remove(ini);
}

TEST(Cli, OutputFileAndDeterminism) {
    const auto f1 = temp_file("a.json"), f2 = temp_file("b.json");
    const auto r1 = invoke({"typicality", "--d", "2", "--m", "2", "--n", "40", "--seed", "7", "--threads", "1", "-o",
                            f1.string()});
    const auto r2 = invoke({"typicality", "--d", "2", "--m", "2", "--n", "40", "--seed", "7", "--threads", "2", "-o",
                            f2.string()});
    ASSERT_EQ(r1.status, 0) << r1.err;
    ASSERT_EQ(r2.status, 0) << r2.err;
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream f(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(f), {});
    };
    EXPECT_EQ(slurp(f1), slurp(f2));
    EXPECT_NE(slurp(f1).find("\"config\""), std::string::npos);
    EXPECT_NE(r1.out.find("all cells agree"), std::string::npos);
    std::filesystem::remove(f1);
    std::filesystem::remove(f2);
}

TEST(Config, HashIgnoresThreadsOnly) {
    RunConfig a;
    a.command = "count";
    RunConfig b = a;
    b.threads = 7;
    b.output = "elsewhere.csv";
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 64u);
    b.seed = 2;
    EXPECT_NE(config_hash(a), config_hash(b));
}
