#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "helpers.hpp"
#include "vrinr/config.hpp"
#include "vrinr/trainer.hpp"

using namespace vrinr;
using vrinr::testing::TempDir;

TEST_CASE("parse: keys, comments, blank lines, whitespace") {
    const auto cfg = KvConfig::parse_string(
        "# a comment\n"
        "\n"
        "model.levels = 3\n"
        "  pea.alpha=5.0  \n"
        "train.loss=pea\n");
    CHECK(cfg.has("model.levels"));
    CHECK(cfg.get_int("model.levels", 0) == 3);
    CHECK(cfg.get_double("pea.alpha", 0.0) == 5.0);
    CHECK(cfg.get_string("train.loss", "") == "pea");
    CHECK(cfg.get_int("missing.key", 42) == 42);
}

TEST_CASE("parse errors carry origin and line number") {
    CHECK_THROWS_WITH_AS(KvConfig::parse_string("a=1\nnonsense\n", "demo.cfg"),
                         doctest::Contains("demo.cfg:2"), ConfigError);
    CHECK_THROWS_WITH_AS(KvConfig::parse_string("=5\n", "demo.cfg"),
                         doctest::Contains("demo.cfg:1"), ConfigError);
}

TEST_CASE("typed getters reject malformed values naming the key") {
    const auto cfg = KvConfig::parse_string("a=abc\nb=1.5x\nc=maybe\nd=1,2,x\n");
    CHECK_THROWS_WITH_AS(cfg.get_int("a", 0), doctest::Contains("'a'"), ConfigError);
    CHECK_THROWS_WITH_AS(cfg.get_double("b", 0.0), doctest::Contains("'b'"), ConfigError);
    CHECK_THROWS_WITH_AS(cfg.get_bool("c", false), doctest::Contains("'c'"), ConfigError);
    CHECK_THROWS_AS(cfg.get_int_list("d", {}), ConfigError);
}

TEST_CASE("bool and int-list round trips") {
    KvConfig cfg;
    cfg.set_bool("x", true);
    cfg.set_bool("y", false);
    cfg.set_int_list("l", {3, 5, 7});
    CHECK(cfg.get_bool("x", false));
    CHECK(!cfg.get_bool("y", true));
    CHECK(cfg.get_int_list("l", {}) == std::vector<int>{3, 5, 7});
    const auto reparsed = KvConfig::parse_string(cfg.serialize());
    CHECK(reparsed.get_int_list("l", {}) == std::vector<int>{3, 5, 7});
}

TEST_CASE("merge: later values win") {
    auto base = KvConfig::parse_string("a=1\nb=2\n");
    const auto over = KvConfig::parse_string("b=20\nc=30\n");
    base.merge(over);
    CHECK(base.get_int("a", 0) == 1);
    CHECK(base.get_int("b", 0) == 20);
    CHECK(base.get_int("c", 0) == 30);
}

TEST_CASE("parse_file: missing file error, round trip via disk") {
    CHECK_THROWS_AS(KvConfig::parse_file("/nonexistent/x.cfg"), ConfigError);
    TempDir dir;
    const std::string path = (dir.path / "t.cfg").string();
    {
        std::ofstream out(path);
        out << "train.epochs=7\nmodel.patch_sizes=3,5,7\n";
    }
    const auto cfg = KvConfig::parse_file(path);
    CHECK(cfg.get_int("train.epochs", 0) == 7);
    CHECK(cfg.get_int_list("model.patch_sizes", {}) == std::vector<int>{3, 5, 7});
}

TEST_CASE("TrainConfig round trips through KvConfig") {
    TrainConfig cfg;
    cfg.scale_train = 2.0;
    cfg.epochs = 13;
    cfg.batch_coords = 99;
    cfg.lr0 = 3e-4;
    cfg.seed = 777;
    cfg.use_pea = false;
    cfg.model.levels = 2;
    cfg.model.patch_sizes = {3, 5};
    cfg.model.grid_resolutions = {8, 4};
    cfg.model.table_log2 = 10;
    cfg.model.attention = false;
    const TrainConfig back = TrainConfig::from_kv(cfg.to_kv());
    CHECK(back.scale_train == cfg.scale_train);
    CHECK(back.epochs == cfg.epochs);
    CHECK(back.batch_coords == cfg.batch_coords);
    CHECK(back.lr0 == cfg.lr0);
    CHECK(back.seed == cfg.seed);
    CHECK(back.use_pea == cfg.use_pea);
    CHECK(back.model.levels == cfg.model.levels);
    CHECK(back.model.patch_sizes == cfg.model.patch_sizes);
    CHECK(back.model.grid_resolutions == cfg.model.grid_resolutions);
    CHECK(back.model.table_log2 == cfg.model.table_log2);
    CHECK(back.model.attention == cfg.model.attention);
}

TEST_CASE("TrainConfig rejects invalid loss and inconsistent model") {
    CHECK_THROWS_AS(TrainConfig::from_kv(KvConfig::parse_string("train.loss=huber\n")),
                    ConfigError);
    CHECK_THROWS_AS(TrainConfig::from_kv(KvConfig::parse_string("model.levels=2\n")), Error);
}
