#include <doctest.h>

#include <pressflow/pressflow.h>

#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

// These tests link only the shared library, so everything goes through the
// C surface the CLI uses.

namespace {

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static int counter = 0;
        path = std::filesystem::temp_directory_path() /
               ("pf_capi_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }

    std::string sub(const std::string& name) const { return (path / name).string(); }
};

struct OptionBag {
    pf_options* ptr;

    OptionBag() : ptr(pf_options_new()) { REQUIRE(ptr != nullptr); }
    ~OptionBag() { pf_options_free(ptr); }

    void set(const char* key, const std::string& value) {
        REQUIRE(pf_options_set(ptr, key, value.c_str()) == PF_OK);
    }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), ("missing file " + path).c_str());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void make_fixture(const TempDir& dir, const std::string& name) {
    OptionBag fixture;
    fixture.set("out-dir", dir.sub(name));
    fixture.set("years", "2012:2013");
    fixture.set("articles-per-cell", "2");
    REQUIRE(pf_run("generate-fixture", fixture.ptr) == PF_OK);
}

std::vector<std::string> g_log_lines;

void capture_log(const char* line, void* user) {
    static_cast<std::vector<std::string>*>(user)->push_back(line);
}

} // namespace

TEST_CASE("null arguments are usage errors, not crashes") {
    CHECK(pf_options_set(nullptr, "k", "v") == PF_USAGE_ERROR);
    CHECK(std::string(pf_last_error()).find("NULL") != std::string::npos);
    OptionBag bag;
    CHECK(pf_options_set(bag.ptr, nullptr, "v") == PF_USAGE_ERROR);
    CHECK(pf_run(nullptr, bag.ptr) == PF_USAGE_ERROR);
    CHECK(pf_run("score", nullptr) == PF_USAGE_ERROR);
    CHECK(pf_options_load_file(bag.ptr, nullptr) == PF_USAGE_ERROR);
    pf_options_free(nullptr); // no-op
}

TEST_CASE("status codes carry the error family and message") {
    TempDir dir;

    SUBCASE("unknown stage") {
        OptionBag bag;
        CHECK(pf_run("frobnicate", bag.ptr) == PF_USAGE_ERROR);
        CHECK(std::string(pf_last_error()).find("unknown stage") != std::string::npos);
    }
    SUBCASE("missing required option") {
        OptionBag bag;
        bag.set("input", dir.sub("articles.ndjson"));
        CHECK(pf_run("score", bag.ptr) == PF_USAGE_ERROR);
        CHECK(std::string(pf_last_error()).find("--out") != std::string::npos);
    }
    SUBCASE("missing input file") {
        OptionBag bag;
        bag.set("input", dir.sub("absent.ndjson"));
        bag.set("out", dir.sub("scores.csv"));
        CHECK(pf_run("score", bag.ptr) == PF_IO_ERROR);
        CHECK(pf_last_error()[0] != '\0');
    }
    SUBCASE("corrupt data") {
        std::ofstream(dir.sub("ckpt.json")) << "{ not json";
        OptionBag bag;
        bag.set("ckpt", dir.sub("ckpt.json"));
        bag.set("input", dir.sub("x.csv"));
        bag.set("out", dir.sub("y.csv"));
        CHECK(pf_run("predict", bag.ptr) == PF_DATA_ERROR);
        CHECK(std::string(pf_last_error()).find("corrupt checkpoint") != std::string::npos);
    }
    SUBCASE("success clears the error") {
        make_fixture(dir, "fixture");
        CHECK(std::string(pf_last_error()).empty());
    }
}

TEST_CASE("stages run end to end over the C surface") {
    TempDir dir;
    make_fixture(dir, "fixture");
    CHECK(std::filesystem::exists(dir.sub("fixture/articles.ndjson")));
    CHECK(std::filesystem::exists(dir.sub("fixture/flows_2012.csv")));
    CHECK(std::filesystem::exists(dir.sub("fixture/manifest.json")));
    CHECK(std::filesystem::exists(dir.sub("fixture/run_config_generate-fixture.txt")));

    OptionBag score;
    score.set("input", dir.sub("fixture/articles.ndjson"));
    score.set("out", dir.sub("scores.csv"));
    score.set("years", "2012:2013");
    REQUIRE(pf_run("score", score.ptr) == PF_OK);
    const std::string first = read_file(dir.sub("scores.csv"));

    SUBCASE("a run config reloads through pf_options_load_file") {
        OptionBag reloaded;
        REQUIRE(pf_options_load_file(reloaded.ptr,
                                     dir.sub("run_config_score.txt").c_str()) == PF_OK);
        REQUIRE(pf_run("score", reloaded.ptr) == PF_OK);
        CHECK(read_file(dir.sub("scores.csv")) == first);
    }
    SUBCASE("later entries override config values") {
        OptionBag reloaded;
        REQUIRE(pf_options_load_file(reloaded.ptr,
                                     dir.sub("run_config_score.txt").c_str()) == PF_OK);
        reloaded.set("out", dir.sub("scores2.csv"));
        REQUIRE(pf_run("score", reloaded.ptr) == PF_OK);
        CHECK(read_file(dir.sub("scores2.csv")) == first);
    }
    SUBCASE("a bad config file is a usage error") {
        std::ofstream(dir.sub("bad.cfg")) << "no equals sign\n";
        OptionBag bag;
        CHECK(pf_options_load_file(bag.ptr, dir.sub("bad.cfg").c_str()) == PF_USAGE_ERROR);
        CHECK(pf_options_load_file(bag.ptr, dir.sub("nope.cfg").c_str()) == PF_IO_ERROR);
    }
}

TEST_CASE("log handler receives stage summaries") {
    TempDir dir;
    g_log_lines.clear();
    pf_set_log_handler(&capture_log, &g_log_lines);
    make_fixture(dir, "fixture");
    pf_set_log_handler(nullptr, nullptr);

    REQUIRE(!g_log_lines.empty());
    bool saw_summary = false;
    for (const auto& line : g_log_lines) {
        if (line.find("generate-fixture:") != std::string::npos) saw_summary = true;
    }
    CHECK(saw_summary);

    // verbose toggling must not disturb the default sink
    pf_set_verbose(1);
    pf_set_verbose(0);
}

TEST_CASE("stage name list is null-terminated and complete") {
    const char* const* names = pf_stage_names();
    std::vector<std::string> seen;
    for (const char* const* it = names; *it != nullptr; ++it) seen.push_back(*it);
    CHECK(seen.size() == 10);
    CHECK(seen.front() == "score");
    CHECK(seen.back() == "pipeline");
}
