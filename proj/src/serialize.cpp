#include "incidence/serialize.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace incidence::serialize {

using nlohmann::json;

std::string kind_name(families::FamilyKind kind) {
    switch (kind) {
        case families::FamilyKind::Lattice: return "Lattice";
        case families::FamilyKind::DeltaNet: return "DeltaNet";
        case families::FamilyKind::RadiiSeparatedNet: return "RadiiSeparatedNet";
        case families::FamilyKind::Knapp: return "Knapp";
        case families::FamilyKind::Thinned: return "Thinned";
        case families::FamilyKind::Custom: return "Custom";
    }
    return "Custom";
}

families::FamilyKind kind_from_name(const std::string& name) {
    if (name == "Lattice") return families::FamilyKind::Lattice;
    if (name == "DeltaNet") return families::FamilyKind::DeltaNet;
    if (name == "RadiiSeparatedNet") return families::FamilyKind::RadiiSeparatedNet;
    if (name == "Knapp") return families::FamilyKind::Knapp;
    if (name == "Thinned") return families::FamilyKind::Thinned;
    if (name == "Custom") return families::FamilyKind::Custom;
    throw std::invalid_argument("unknown family kind: " + name);
}

std::string family_to_jsonl(const families::CircleFamily& family) {
    std::ostringstream out;
    json header = {
        {"kind", kind_name(family.kind)},
        {"delta", family.delta},
        {"box",
         {family.box.x_lo, family.box.x_hi, family.box.y_lo, family.box.y_hi, family.box.r_lo,
          family.box.r_hi}},
    };
    if (family.seed) header["seed"] = *family.seed;
    out << header.dump() << "\n";
    for (const auto& c : family.circles) {
        json line = {{"cx", c.center.x}, {"cy", c.center.y}, {"r", c.radius}};
        if (c.lattice) {
            line["j"] = (*c.lattice)[0];
            line["k"] = (*c.lattice)[1];
            line["l"] = (*c.lattice)[2];
        }
        out << line.dump() << "\n";
    }
    return out.str();
}

families::CircleFamily family_from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("family_from_jsonl: empty input");
    const json header = json::parse(line);
    families::CircleFamily fam;
    fam.kind = kind_from_name(header.at("kind").get<std::string>());
    fam.delta = header.at("delta").get<double>();
    const auto box = header.at("box");
    fam.box = {box[0].get<double>(), box[1].get<double>(), box[2].get<double>(),
               box[3].get<double>(), box[4].get<double>(), box[5].get<double>()};
    if (header.contains("seed")) fam.seed = header["seed"].get<uint64_t>();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json c = json::parse(line);
        geom::Circle circle({c.at("cx").get<double>(), c.at("cy").get<double>()},
                            c.at("r").get<double>());
        if (c.contains("j"))
            circle.lattice = {{c.at("j").get<int64_t>(), c.at("k").get<int64_t>(),
                               c.at("l").get<int64_t>()}};
        fam.circles.push_back(circle);
    }
    return fam;
}

std::string csv_double(double v) {
    // nlohmann prints shortest round-trip doubles; reuse that.
    return json(v).dump();
}

std::string report_to_json(const counting::IncidenceReport& report) {
    json buckets = json::array();
    for (const auto& [key, pairs] : report.buckets.counts)
        buckets.push_back({{"eps", report.delta * std::exp2(key.first)},
                           {"t", std::exp2(key.second)},
                           {"pairs", pairs}});
    json types = json::array();
    for (const auto& [type, count] : report.rectangle_types)
        types.push_back({{"mu", type.first}, {"nu", type.second}, {"count", count}});
    return json{{"family_kind", report.family_kind},
                {"delta", report.delta},
                {"family_size", report.family_size},
                {"total_pairs", report.buckets.total},
                {"buckets", buckets},
                {"rectangle_types", types},
                {"wall_seconds", report.wall_seconds},
                {"pairs_per_second", report.pairs_per_second}}
        .dump();
}

std::string report_bucket_csv(const counting::IncidenceReport& report) {
    std::ostringstream out;
    out << "eps,t,pairs,rectangles,mu,nu\n";
    for (const auto& [key, pairs] : report.buckets.counts) {
        const int tlev = key.second;
        const auto rect_it = report.rectangles_by_t.find(tlev);
        const auto peak_it = report.peak_type_by_t.find(tlev);
        out << csv_double(report.delta * std::exp2(key.first)) << "," << csv_double(std::exp2(tlev))
            << "," << pairs << "," << (rect_it == report.rectangles_by_t.end() ? 0 : rect_it->second)
            << "," << (peak_it == report.peak_type_by_t.end() ? 0 : peak_it->second.first) << ","
            << (peak_it == report.peak_type_by_t.end() ? 0 : peak_it->second.second) << "\n";
    }
    return out.str();
}

} // namespace incidence::serialize
