#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "incidence/counting.hpp"
#include "incidence/families.hpp"
#include "incidence/serialize.hpp"

using namespace incidence;

TEST_CASE("jsonl round trip is exact") {
    const auto fam = families::lattice_family(8);
    const auto text = serialize::family_to_jsonl(fam);
    const auto back = serialize::family_from_jsonl(text);

    CHECK(back.kind == fam.kind);
    CHECK(back.delta == fam.delta);
    REQUIRE(back.size() == fam.size());
    for (size_t i = 0; i < fam.size(); ++i) {
        CHECK(back.circles[i].center.x == fam.circles[i].center.x);
        CHECK(back.circles[i].center.y == fam.circles[i].center.y);
        CHECK(back.circles[i].radius == fam.circles[i].radius);
        REQUIRE(back.circles[i].lattice.has_value());
        CHECK(*back.circles[i].lattice == *fam.circles[i].lattice);
    }
}

TEST_CASE("floating families survive with bit-exact doubles") {
    const auto fam =
        families::delta_net_family(0.07, families::unit_box(), families::NetMode::FullSeparation, 3);
    const auto back = serialize::family_from_jsonl(serialize::family_to_jsonl(fam));
    REQUIRE(back.size() == fam.size());
    for (size_t i = 0; i < fam.size(); ++i) {
        CHECK(back.circles[i].center.x == fam.circles[i].center.x);
        CHECK(back.circles[i].center.y == fam.circles[i].center.y);
        CHECK(back.circles[i].radius == fam.circles[i].radius);
        CHECK_FALSE(back.circles[i].lattice.has_value());
    }
    CHECK(back.seed == fam.seed);
}

TEST_CASE("serialization is deterministic") {
    const auto fam = families::knapp_family(1.0 / 32);
    CHECK(serialize::family_to_jsonl(fam) == serialize::family_to_jsonl(fam));
}

TEST_CASE("bad input is rejected") {
    CHECK_THROWS(serialize::family_from_jsonl(""));
    CHECK_THROWS(serialize::family_from_jsonl("{\"kind\":\"NoSuchKind\",\"delta\":0.1,\"box\":[0,1,0,1,0.5,1]}\n"));
}

TEST_CASE("incidence report serialization") {
    const auto fam = families::lattice_family(8);
    const auto report = counting::incidence_report(fam);
    CHECK(report.family_kind == "Lattice");
    CHECK(report.buckets.total == static_cast<int64_t>(fam.size() * (fam.size() - 1) / 2));

    const auto j = serialize::report_to_json(report);
    CHECK(j.find("\"total_pairs\"") != std::string::npos);

    const auto csv = serialize::report_bucket_csv(report);
    CHECK(csv.rfind("eps,t,pairs,rectangles,mu,nu\n", 0) == 0);
    // bucket rows sum back to the census total
    int64_t sum = 0;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line); // header
    while (std::getline(in, line)) {
        size_t p1 = line.find(',');
        size_t p2 = line.find(',', p1 + 1);
        size_t p3 = line.find(',', p2 + 1);
        sum += std::stoll(line.substr(p2 + 1, p3 - p2 - 1));
    }
    CHECK(sum == report.buckets.total);
}
