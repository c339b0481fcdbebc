#include "skelfuse/io.hpp"
#include "skelfuse/taxonomy.hpp"
#include "support.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace skelfuse;

namespace {

std::string person_text(double base) {
    std::string s;
    for (int j = 0; j < 17; ++j) {
        if (j) s += ',';
        s += std::to_string(static_cast<int>(base) + j) + ".5:" + std::to_string(j) + ":0.75";
    }
    return s;
}

std::vector<SkeletonFrame> parse_skel(const std::string& text) {
    std::istringstream in(text);
    return parse_skeleton_stream(in);
}

DetectionStream parse_det(const std::string& text) {
    std::istringstream in(text);
    return parse_detection_stream(in);
}

void write(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

} // namespace

TEST_CASE("skeleton stream: minimal line") {
    const auto frames = parse_skel("4|" + person_text(10) + "\n");
    REQUIRE(frames.size() == 1);
    CHECK(frames[0].frame_index == 4);
    REQUIRE(frames[0].persons.size() == 1);
    CHECK(frames[0].persons[0][0] == Keypoint2D{10.5, 0.0, 0.75});
    CHECK(frames[0].persons[0][16] == Keypoint2D{26.5, 16.0, 0.75});
}

TEST_CASE("skeleton stream: empty input, blank lines and empty frames") {
    CHECK(parse_skel("").empty());
    const auto frames = parse_skel("\n0|\n\n1|" + person_text(0) + ";" + person_text(5) + "\n");
    REQUIRE(frames.size() == 2);
    CHECK(frames[0].persons.empty());
    CHECK(frames[1].persons.size() == 2);
}

TEST_CASE("skeleton stream: errors carry the line number") {
    const auto line_of = [](const std::string& text) -> std::size_t {
        try {
            parse_skel(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    CHECK(line_of("0|" + person_text(0) + "\n1|1:2:3\n") == 2);
    CHECK(line_of("0|" + person_text(0) + "\n0|" + person_text(0) + "\n") == 2);
    CHECK(line_of("5|" + person_text(0) + "\n3|\n") == 2);
    CHECK(line_of("no separator\n") == 1);
    CHECK(line_of("x|\n") == 1);
    CHECK(line_of("0|1:2:abc" + person_text(0).substr(5) + "\n") == 1);
    CHECK(line_of("0|1e3:2:0.5" + person_text(0).substr(7) + "\n") == 1);
    auto over = person_text(0);
    over.replace(over.find("0.75"), 4, "1.50");
    CHECK(line_of("0|" + over + "\n") == 1);
}

TEST_CASE("skeleton stream round-trips a 3-frame, 2-person fixture") {
    Rng rng(3);
    std::vector<SkeletonFrame> frames;
    for (int f = 0; f < 3; ++f) {
        SkeletonFrame sf;
        sf.frame_index = f * 2;
        sf.persons = {testing::random_person(rng), testing::random_person(rng)};
        frames.push_back(sf);
    }
    std::ostringstream out;
    serialize_skeleton_stream(out, frames);
    CHECK(parse_skel(out.str()) == frames);
}

TEST_CASE("rle decodes the two-row square") {
    const auto m = decode_rle("0:0:2:0-2/0-2");
    CHECK(m.size() == 4);
    CHECK(m == Mask({{0, 0}, {1, 0}, {0, 1}, {1, 1}}));
}

TEST_CASE("rle handles gaps, empty rows and offsets") {
    const Mask m({{10, 5}, {11, 5}, {14, 5}, {12, 7}});
    const auto text = encode_rle(m);
    CHECK(text == "10:5:3:0-2+4-1/0-0/2-1");
    CHECK(decode_rle(text) == m);
}

TEST_CASE("rle rejects malformed bodies") {
    CHECK_THROWS_AS(decode_rle("0:0:2:0-2"), ParseError);
    CHECK_THROWS_AS(decode_rle("0:0:1:3"), ParseError);
    CHECK_THROWS_AS(decode_rle("0:0:1:-1-2"), ParseError);
    CHECK_THROWS_AS(decode_rle("0:0"), ParseError);
    CHECK_THROWS_AS(decode_rle("0:0:-1:"), ParseError);
}

TEST_CASE("rle round-trips random masks") {
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        const auto m = testing::random_mask(rng);
        CHECK(decode_rle(encode_rle(m)) == m);
    }
}

TEST_CASE("detection stream: one leg instance") {
    const auto d = parse_det("0|class=leg,score=0.93,rle=3:4:1:0-3\n");
    REQUIRE(d.size() == 1);
    REQUIRE(d.at(0).size() == 1);
    const auto& o = d.at(0)[0];
    CHECK(o.object_class() == ObjectClass::Leg);
    CHECK(o.score() == 0.93);
    CHECK(o.centroid() == Point2{4.0, 4.0});
}

TEST_CASE("detection stream: seven classes in one frame") {
    std::string line = "2|";
    for (std::size_t c = 0; c < kNumObjectClasses; ++c) {
        if (c) line += ';';
        line += "class=" + std::string(kObjectNames[c]) + ",score=0.5,rle=" + std::to_string(c * 10) + ":0:1:0-2";
    }
    const auto d = parse_det(line + "\n3|\n");
    REQUIRE(d.at(2).size() == 7);
    for (std::size_t c = 0; c < kNumObjectClasses; ++c) CHECK(index_of(d.at(2)[c].object_class()) == c);
    CHECK(d.at(3).empty());
}

TEST_CASE("detection stream errors") {
    CHECK_THROWS_AS(parse_det("0|class=chair,score=0.5,rle=0:0:1:0-1\n"), ParseError);
    CHECK_THROWS_AS(parse_det("0|class=leg,score=2,rle=0:0:1:0-1\n"), ParseError);
    CHECK_THROWS_AS(parse_det("0|class=leg,rle=0:0:1:0-1\n"), ParseError);
    CHECK_THROWS_AS(parse_det("0|class=leg,score=0.5,rle=0:0:1:0-0\n"), ParseError);
    CHECK_THROWS_AS(parse_det("1|\n1|\n"), ParseError);
}

TEST_CASE("detection stream round-trips") {
    Rng rng(9);
    DetectionStream s;
    for (std::int64_t f = 0; f < 6; ++f) s[f * 3] = testing::random_detections(rng, 2);
    std::ostringstream out;
    serialize_detection_stream(out, s);
    CHECK(parse_det(out.str()) == s);
}

TEST_CASE("manifest parsing, selection and duplicates") {
    std::istringstream in("a,top,pick up leg,a.skel,a.det,train\n"
                          "b,front,spin leg,/abs/b.skel,/abs/b.det,test\n"
                          "a,top,pick up leg,a.skel,a.det,test\n");
    const auto m = parse_manifest(in, "/data");
    REQUIRE(m.entries.size() == 3);
    CHECK(m.entries[0].skeleton_path == std::filesystem::path("/data/a.skel"));
    CHECK(m.entries[1].detection_path == std::filesystem::path("/abs/b.det"));
    CHECK(m.entries[1].view == View::Front);
    CHECK(m.select(Split::Test).size() == 2);
    CHECK(m.select(Split::Train).size() == 1);

    std::istringstream dup("a,top,x,a.skel,a.det,train\na,top,x,b.skel,b.det,train\n");
    CHECK_THROWS_AS(parse_manifest(dup), ParseError);
    std::istringstream few("a,top,x,a.skel,train\n");
    CHECK_THROWS_AS(parse_manifest(few), ParseError);
    std::istringstream bad_split("a,top,x,a.skel,a.det,val\n");
    CHECK_THROWS_AS(parse_manifest(bad_split), ParseError);

    std::ostringstream out;
    serialize_manifest(out, m);
    std::istringstream again(out.str());
    CHECK(parse_manifest(again).entries == m.entries);
}

TEST_CASE("class map parsing") {
    std::istringstream in("pick up leg,pick up\nspin leg,spin\n");
    const auto map = parse_class_map(in);
    CHECK(map.size() == 2);
    CHECK(map.class_id_of("spin leg") == 1);
    std::istringstream bad("fold leg,fold\n");
    CHECK_THROWS_AS(parse_class_map(bad), ParseError);

    std::ostringstream out;
    serialize_class_map(out, map);
    CHECK(out.str() == "pick up leg,pick up\nspin leg,spin\n");
}

TEST_CASE("load_clip joins both files and names missing frames") {
    testing::TempDir dir("io");
    std::string skel;
    for (int f = 0; f < 5; ++f) skel += std::to_string(f) + "|" + person_text(f) + "\n";
    write(dir.path() / "c.skel", skel);
    write(dir.path() / "c.det", "0|class=leg,score=0.9,rle=1:1:1:0-2\n1|\n2|\n3|\n4|\n");
    write(dir.path() / "gap.det", "0|\n1|\n2|\n4|\n");

    ManifestEntry e{"c", View::Top, "pick up leg", dir.path() / "c.skel", dir.path() / "c.det", Split::Train};
    const auto clip = load_clip(e, default_verb_map());
    CHECK(clip.length() == 5);
    CHECK(clip.frames[0].detections.size() == 1);
    CHECK(clip.frames[1].detections.empty());
    CHECK(clip.label.class_name == "pick up leg");
    CHECK(clip.label.verb_id == verb_id_of("pick up"));

    auto gap = e;
    gap.detection_path = dir.path() / "gap.det";
    try {
        load_clip(gap, default_verb_map());
        FAIL("expected an error");
    } catch (const ValidationError& err) {
        CHECK(std::string(err.what()).find("frame 3") != std::string::npos);
    }

    auto unknown = e;
    unknown.label_name = "juggle leg";
    CHECK_THROWS_AS(load_clip(unknown, default_verb_map()), LookupError);
}

TEST_CASE("load_manifest checks referenced files") {
    testing::TempDir dir("manifest");
    write(dir.path() / "m.csv", "a,top,pick up leg,a.skel,a.det,train\n");
    CHECK_THROWS_AS(load_manifest(dir.path() / "m.csv"), ValidationError);
    write(dir.path() / "a.skel", "");
    write(dir.path() / "a.det", "");
    CHECK(load_manifest(dir.path() / "m.csv").entries.size() == 1);
}

TEST_CASE("clip files round-trip through load_clip") {
    Rng rng(21);
    auto clip = testing::random_clip(rng, 6);
    clip.source_id = "r";
    clip.label = make_label("pick up leg", default_verb_map());
    testing::TempDir dir("clip");
    write_clip_files(clip, dir.path() / "r.skel", dir.path() / "r.det");
    const auto back = load_clip({"r", View::Top, "pick up leg", dir.path() / "r.skel", dir.path() / "r.det", Split::Test},
                                default_verb_map());
    CHECK(back == clip);
}
