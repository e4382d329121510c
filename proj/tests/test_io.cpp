#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "lgmd/io.hpp"
#include "lgmd/stimulus.hpp"

using namespace lgmd;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               fs::path("lgmd_io_test_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("pgm round-trips generated frames bit-exactly") {
    TempDir tmp;
    const auto seq = gen_grating(default_spec(StimulusKind::grating));
    for (int i = 0; i < 3; ++i) {
        const std::string p = tmp / ("f" + std::to_string(i) + ".pgm");
        write_pgm(seq[i], p);
        REQUIRE(read_pgm(p) == seq[i]);
    }
}

TEST_CASE("pgm reader accepts comments and rejects wide maxval") {
    TempDir tmp;
    {
        std::ofstream out(tmp / "c.pgm", std::ios::binary);
        out << "P5\n# a comment\n2 2\n255\n";
        out.write("\x01\x02\x03\x04", 4);
    }
    const Frame f = read_pgm(tmp / "c.pgm");
    CHECK(f.width == 2);
    CHECK(f.at(1, 1) == 4);

    {
        std::ofstream out(tmp / "wide.pgm", std::ios::binary);
        out << "P5\n2 2\n65535\n";
        out.write("\x01\x02\x03\x04\x05\x06\x07\x08", 8);
    }
    CHECK_THROWS_WITH(read_pgm(tmp / "wide.pgm"), Catch::Matchers::ContainsSubstring("maxval"));
}

TEST_CASE("truncated pgm reports the byte offset") {
    TempDir tmp;
    {
        std::ofstream out(tmp / "t.pgm", std::ios::binary);
        out << "P5\n4 4\n255\n";
        out.write("\x01\x02\x03", 3);
    }
    CHECK_THROWS_WITH(read_pgm(tmp / "t.pgm"), Catch::Matchers::ContainsSubstring("truncated"));
}

TEST_CASE("raw y8 needs the exact byte count") {
    TempDir tmp;
    {
        std::ofstream out(tmp / "a.y8", std::ios::binary);
        std::vector<char> bytes(99 * 72, 7);
        out.write(bytes.data(), std::streamsize(bytes.size()));
    }
    const Frame f = read_y8(tmp / "a.y8", 99, 72);
    CHECK(f.width == 99);
    CHECK(f.at(98, 71) == 7);

    {
        std::ofstream out(tmp / "b.y8", std::ios::binary);
        std::vector<char> bytes(99 * 72 + 1, 7);
        out.write(bytes.data(), std::streamsize(bytes.size()));
    }
    CHECK_THROWS_WITH(read_y8(tmp / "b.y8", 99, 72),
                      Catch::Matchers::ContainsSubstring("expected"));
}

TEST_CASE("read_frames returns directory entries in name order") {
    TempDir tmp;
    Frame a(99, 72, 10), b(99, 72, 20), c(99, 72, 30);
    write_pgm(b, tmp / "f_001.pgm");
    write_pgm(c, tmp / "f_002.pgm");
    write_pgm(a, tmp / "f_000.pgm");
    const auto frames = read_frames(tmp.path.string(), FrameFormat::pgm, 99, 72);
    REQUIRE(frames.size() == 3);
    CHECK(frames[0].at(0, 0) == 10);
    CHECK(frames[1].at(0, 0) == 20);
    CHECK(frames[2].at(0, 0) == 30);
}

TEST_CASE("read_frames accepts an explicit file list in the given order") {
    TempDir tmp;
    write_pgm(Frame(99, 72, 5), tmp / "b.pgm");
    write_pgm(Frame(99, 72, 9), tmp / "a.pgm");
    const std::vector<std::string> list = {tmp / "b.pgm", tmp / "a.pgm"};
    const auto frames = read_frames(list, FrameFormat::pgm, 99, 72);
    REQUIRE(frames.size() == 2);
    CHECK(frames[0].at(0, 0) == 5);
    CHECK(frames[1].at(0, 0) == 9);
    CHECK_THROWS_AS(read_frames(std::vector<std::string>{tmp / "missing.pgm"},
                                FrameFormat::pgm, 99, 72),
                    IoError);
}

TEST_CASE("oversized frames are routed through the downsampler") {
    TempDir tmp;
    write_pgm(Frame(198, 144, 77), tmp / "big.pgm");
    const auto frames = read_frames(tmp.path.string(), FrameFormat::pgm, 99, 72);
    REQUIRE(frames.size() == 1);
    CHECK(frames[0].width == 99);
    CHECK(frames[0].height == 72);
    for (auto v : frames[0].luminance) REQUIRE(v == 77);
}

TEST_CASE("downsample is an identity at equal size and averages blocks") {
    Frame f(99, 72, 55);
    CHECK(downsample(f, 99, 72) == f);

    Frame q(2, 2);
    q.at(0, 0) = 10;
    q.at(1, 0) = 20;
    q.at(0, 1) = 30;
    q.at(1, 1) = 40;
    const Frame one = downsample(q, 1, 1);
    CHECK(one.at(0, 0) == 25);

    CHECK_THROWS_AS(downsample(q, 4, 4), std::invalid_argument);
}

TEST_CASE("downsample preserves the global mean within rounding") {
    auto spec = default_spec(StimulusKind::looming);
    spec.width = 198;
    spec.height = 144;
    const Frame src = gen_looming(spec)[40];
    const Frame dst = downsample(src, 99, 72);
    auto mean = [](const Frame& f) {
        double s = 0.0;
        for (auto v : f.luminance) s += v;
        return s / f.size();
    };
    CHECK(std::abs(mean(src) - mean(dst)) <= 0.5);
}

TEST_CASE("trace csv round-trips values exactly") {
    TempDir tmp;
    std::vector<TraceRow> rows;
    rows.push_back({0, 0.0, 0.0, 0.0, false, false, false, "", std::nullopt, std::nullopt});
    rows.push_back({1, 123456.789, 35.854320001, 12.25, true, false, true, "cruise", 1.5,
                    2.0 / 3.0});
    const std::string p = tmp / "t.csv";
    write_trace(rows, p);
    const auto back = read_trace(p);
    REQUIRE(back.size() == 2);
    CHECK(back[1].k_raw == rows[1].k_raw);
    CHECK(back[1].kappa == rows[1].kappa);
    CHECK(back[1].ffi == rows[1].ffi);
    CHECK(back[1].spike == rows[1].spike);
    CHECK(back[1].task == "cruise");
    REQUIRE(back[1].x.has_value());
    CHECK(*back[1].x == 1.5);
    CHECK(*back[1].y == rows[1].y);
    CHECK_FALSE(back[0].x.has_value());
}

TEST_CASE("empty trace is a header-only file") {
    TempDir tmp;
    const std::string p = tmp / "empty.csv";
    write_trace({}, p);
    std::ifstream in(p);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == kTraceHeader);
    CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("empty config yields full defaults") {
    TempDir tmp;
    {
        std::ofstream out(tmp / "empty.conf");
        out << "# nothing but a comment\n\n";
    }
    const Config cfg = load_config(tmp / "empty.conf");
    CHECK(cfg.params.T_s == 35.0);
    CHECK(cfg.params.n_cell == 7128);
    CHECK(cfg.frame_width == 99);
    CHECK(cfg.sim.cruise_speed == 0.5);
}

TEST_CASE("explicit default override is a no-op") {
    TempDir tmp;
    {
        std::ofstream out(tmp / "ts.conf");
        out << "T_s = 35\n";
    }
    const Config cfg = load_config(tmp / "ts.conf");
    CHECK(cfg.params.T_s == 35.0);
}

TEST_CASE("invalid threshold values fail validation") {
    TempDir tmp;
    {
        std::ofstream out(tmp / "bad.conf");
        out << "T_s = -1\n";
    }
    CHECK_THROWS_WITH(load_config(tmp / "bad.conf"),
                      Catch::Matchers::ContainsSubstring("T_s"));
}

TEST_CASE("unknown keys are rejected with their line number") {
    TempDir tmp;
    {
        std::ofstream out(tmp / "unk.conf");
        out << "T_s = 35\nbogus_key = 1\n";
    }
    CHECK_THROWS_WITH(load_config(tmp / "unk.conf"), Catch::Matchers::ContainsSubstring(":2"));
}

TEST_CASE("config round-trips through save and load") {
    TempDir tmp;
    Params p = params_default();
    p.T_s = 42.5;
    p.W_I = 0.75;
    p.norm_mode = NormMode::literal;
    const std::string path = tmp / "rt.conf";
    save_config(p, 99, 72, path);
    const Config cfg = load_config(path);
    CHECK(cfg.params.T_s == 42.5);
    CHECK(cfg.params.W_I == 0.75);
    CHECK(cfg.params.norm_mode == NormMode::literal);
    CHECK(cfg.params.n_cell == 7128);
}

TEST_CASE("stimulus overrides apply on top of per-kind defaults") {
    TempDir tmp;
    {
        std::ofstream out(tmp / "st.conf");
        out << "stim_frames = 33\nstim_speed = 1.25\n";
    }
    const Config cfg = load_config(tmp / "st.conf");
    const StimulusSpec s = cfg.stim_overrides_applied_to(StimulusKind::translate);
    CHECK(s.frames == 33);
    CHECK(s.translate_speed_px == 1.25);
    CHECK(s.object_luminance == 0.0);  // kind default retained
}

TEST_CASE("arena files load and validate") {
    TempDir tmp;
    {
        std::ofstream out(tmp / "a.conf");
        out << "room_w = 6\nroom_h = 6\nbox_x = 3\nbox_y = 3\nbox_size = 0.5\n"
            << "start_x = 0.7\nstart_y = 3\ndest_x = 5.3\ndest_y = 3\n";
    }
    const ArenaWorld w = load_arena(tmp / "a.conf");
    CHECK(w.box_half == 0.25);
    CHECK(w.destination.x == 5.3);

    {
        std::ofstream out(tmp / "bad.conf");
        out << "dest_x = 3\ndest_y = 3\n";  // destination inside the obstacle
    }
    CHECK_THROWS_WITH(load_arena(tmp / "bad.conf"),
                      Catch::Matchers::ContainsSubstring("destination"));
}
