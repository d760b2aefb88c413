// JSON / JSONL / CSV serialization for every artifact the CLI emits.
#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "removal_lab/errors.hpp"
#include "removal_lab/instances.hpp"
#include "removal_lab/packing.hpp"
#include "removal_lab/partition.hpp"
#include "removal_lab/refine.hpp"
#include "removal_lab/regularity.hpp"
#include "removal_lab/shattering.hpp"
#include "removal_lab/tester.hpp"
#include "removal_lab/tower.hpp"

namespace removal_lab {

using Json = nlohmann::ordered_json;

inline Json density_json(const Density& d) {
    return Json{{"num", d.pairs},
                {"den", d.total.str()},
                {"value", d.total == 0 ? 0.0 : rat_to_double(d.value())}};
}

inline Json rat_json(const Rat& r) {
    return Json{{"num", rat_num(r).str()}, {"den", rat_den(r).str()}, {"value", rat_to_double(r)}};
}

inline Json partition_json(const Partition& p) { return Json{{"assignment", p.assignment()}}; }

inline Partition partition_from_json(const Json& j) {
    if (!j.contains("assignment") || !j["assignment"].is_array())
        throw ParseError("partition json: missing assignment array");
    return Partition::from_assignment(j["assignment"].get<std::vector<int>>());
}

inline Json packing_json(const Packing& p) {
    Json copies = Json::array();
    for (const auto& image : p.copies) copies.push_back(image);
    return Json{{"size", p.size()}, {"copies", copies}};
}

inline Json edge_list_json(const std::vector<std::pair<int, int>>& edges) {
    Json out = Json::array();
    for (auto [u, v] : edges) out.push_back(Json::array({u, v}));
    return out;
}

inline Json superregularity_json(const SuperregularityReport& r) {
    Json j{{"verdict", r.superregular ? "superregular" : "witness"},
           {"certified", r.certified},
           {"mode", r.mode == SearchMode::exhaustive ? "exhaustive" : "randomized"},
           {"alpha", rat_json(r.alpha)},
           {"beta", rat_json(r.beta)}};
    if (!r.superregular) {
        j["witness"] = r.witness;
        j["witness_density"] = density_json(r.witness_density);
    }
    if (r.mode == SearchMode::randomized) j["samples"] = r.samples_used;
    return j;
}

inline Json epsilon_regularity_json(const EpsilonRegularityReport& r) {
    Json j{{"verdict", r.regular ? "regular" : "witness"},
           {"certified", r.certified},
           {"epsilon", rat_json(r.epsilon)},
           {"density", density_json(r.pair_density)}};
    if (!r.regular) {
        j["witness_x"] = r.witness_x;
        j["witness_y"] = r.witness_y;
        j["witness_density"] = density_json(r.witness_density);
    }
    return j;
}

inline Json extraction_json(const ExtractionResult& r) {
    Json rounds = Json::array();
    for (const auto& round : r.trace)
        rounds.push_back(Json{{"tuple", round.tuple}, {"density", density_json(round.density)}});
    return Json{{"tuple", r.tuple}, {"rounds", rounds}, {"certified", r.certified}};
}

inline Json matching_json(const MatchingResult& m) {
    Json classes = Json::array();
    for (std::size_t j = 0; j < m.classes.size(); ++j)
        classes.push_back(Json{{"blocks", m.classes[j]}, {"certified", bool(m.certified[j])}});
    return Json{{"classes", classes}, {"residual", m.residual}, {"completed", m.completed}};
}

inline Json shattering_json(const Graph& g, const Shattering& s) {
    auto part_block_json = [&](const std::vector<int>& side_set, const SetPartition& sp) {
        (void)side_set;
        Json parts = Json::array();
        for (const auto& block : sp.parts) parts.push_back(block);
        return parts;
    };
    Json block_densities = Json::array();
    for (const auto& a : s.part_a.parts) {
        Json row = Json::array();
        for (const auto& b : s.part_b.parts) row.push_back(density_json(density(g, a, b)));
        block_densities.push_back(row);
    }
    return Json{{"pattern_edge", Json::array({s.pattern_edge.first, s.pattern_edge.second})},
                {"set_a", s.set_a},
                {"set_b", s.set_b},
                {"partition_a", part_block_json(s.set_a, s.part_a)},
                {"partition_b", part_block_json(s.set_b, s.part_b)},
                {"alpha", rat_json(s.alpha)},
                {"c_achieved", rat_json(s.c_achieved)},
                {"t", s.t},
                {"block_densities", block_densities}};
}

inline Json shatter_outcome_json(const Graph& g, const ShatterOutcome& o) {
    Json j{{"outcome", o.shattered() ? "shattering" : "failure-certificate"}, {"log", o.log}};
    if (o.shattered()) j["shattering"] = shattering_json(g, *o.shattering);
    if (o.failure) {
        Json copies = Json::array();
        for (const auto& c : o.failure->copies) copies.push_back(c);
        j["failure"] = Json{{"copies", copies}, {"threshold", rat_json(o.failure->threshold)}};
    }
    return j;
}

inline Json tower_json(const TowerExpr& t) {
    auto shape = t.shape();
    if (!shape) return Json{{"value", "unrepresentable"}};
    if (shape->depth == 0 && !shape->reciprocal)
        return Json{{"value", rat_string(shape->top)}};
    Json levels = Json::array();
    for (long long i = 0; i < shape->depth; ++i) levels.push_back("2");
    levels.push_back(rat_string(shape->top));
    Json j{{"tower", levels}};
    if (shape->reciprocal) j["reciprocal"] = true;
    return j;
}

inline Json theoretical_constants_json(const TheoreticalConstants& c) {
    return Json{{"d_h", tower_json(c.d_h)},      {"t", tower_json(c.t)},
                {"s", tower_json(c.s)},          {"gamma_floor", tower_json(c.gamma_floor)},
                {"tower_height", c.tower_height}, {"delta", tower_json(c.delta)}};
}

inline Json verdict_json(const TestVerdict& v) {
    Json j{{"verdict", v.accept ? "accept" : "reject"},
           {"samples", v.samples_used},
           {"delta", rat_json(v.delta)},
           {"seed", v.seed}};
    if (!v.accept) j["witness"] = v.witness;
    return j;
}

inline Json rejection_estimate_json(const RejectionEstimate& e) {
    return Json{{"trials", e.trials},
                {"rejections", e.rejections},
                {"rate", e.rate},
                {"half_width", e.half_width}};
}

inline Json deletion_json(const DeletionAccounting& d) {
    return Json{{"intra", d.intra},
                {"off_size", d.off_size},
                {"low_density", d.low_density},
                {"total", d.total()}};
}

inline Json shattered_pair_json(const ShatteredPairLog& s) {
    return Json{{"pair", Json::array({s.part_i, s.part_j})},
                {"pattern_edge", Json::array({s.pattern_edge.first, s.pattern_edge.second})},
                {"c_achieved", rat_json(s.c_achieved)},
                {"t", s.t},
                {"edges", s.pair_edges},
                {"qualifies", s.qualifies},
                {"claimed_gain", s.claimed_gain}};
}

inline Json trace_record_json(const TraceRecord& r) {
    Json shattered = Json::array();
    for (const auto& s : r.shattered) shattered.push_back(shattered_pair_json(s));
    return Json{{"step", r.step},
                {"parts", r.parts},
                {"entropy", r.entropy},
                {"gain", r.gain},
                {"claimed_gain", r.claimed_gain},
                {"r", r.r},
                {"shattered", shattered},
                {"deleted", deletion_json(r.deletions)},
                {"assignment", r.assignment}};
}

// JSON-lines trace: one record per line, then a terminal status line.
inline std::string trace_jsonl(const RemovalProcessResult& result) {
    std::ostringstream out;
    for (const auto& rec : result.records) out << trace_record_json(rec).dump() << '\n';
    Json status{{"status", terminal_status_name(result.status)},
                {"message", result.message},
                {"eps0", rat_json(result.eps0)},
                {"n0", result.n0},
                {"alpha", rat_json(result.alpha)},
                {"packing_size", result.packing.size()},
                {"theory", theoretical_constants_json(result.theory)}};
    if (result.status == TerminalStatus::removable)
        status["certificate"] = edge_list_json(result.removable_certificate);
    if (result.failure) {
        Json copies = Json::array();
        for (const auto& c : result.failure->copies) copies.push_back(c);
        status["failure"] = Json{{"copies", copies},
                                 {"threshold", rat_json(result.failure->threshold)}};
    }
    out << status.dump() << '\n';
    return out.str();
}

// CSV summary of a JSONL trace; verifies the entropy column is nondecreasing
// and rejects malformed input.
inline std::string summarize_trace(std::istream& in) {
    std::ostringstream csv;
    csv << "step,parts,entropy,gain,claimed_gain,r,shattered_pairs,deleted_intra,"
           "deleted_off_size,deleted_low_density,deleted_total,status,certificate_size\n";
    std::string line;
    double last_entropy = -1e300;
    bool saw_status = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Json j;
        try {
            j = Json::parse(line);
        } catch (const std::exception& e) {
            throw ParseError(std::string("trace: malformed line: ") + e.what());
        }
        if (j.contains("status")) {
            saw_status = true;
            long long cert = j.contains("certificate") ? static_cast<long long>(j["certificate"].size())
                             : j.contains("failure") ? static_cast<long long>(j["failure"]["copies"].size())
                                                     : 0;
            csv << ",,,,,,,,,,," << j["status"].get<std::string>() << ',' << cert << '\n';
            continue;
        }
        try {
            if (!j.contains("step") || !j.contains("entropy") || !j.contains("parts"))
                throw ParseError("trace: record missing required fields");
            double entropy = j["entropy"].get<double>();
            if (entropy < last_entropy - 1e-9)
                throw ParseError("trace: entropy column decreases");
            last_entropy = entropy;
            csv << j["step"].get<int>() << ',' << j["parts"].get<long long>() << ',' << entropy
                << ',' << (j.contains("gain") ? j["gain"].get<double>() : 0.0) << ','
                << (j.contains("claimed_gain") ? j["claimed_gain"].get<double>() : 0.0) << ','
                << (j.contains("r") ? j["r"].get<long long>() : 1) << ','
                << (j.contains("shattered") ? j["shattered"].size() : 0) << ','
                << j["deleted"]["intra"].get<long long>() << ','
                << j["deleted"]["off_size"].get<long long>() << ','
                << j["deleted"]["low_density"].get<long long>() << ','
                << j["deleted"]["total"].get<long long>() << ",,\n";
        } catch (const Json::exception& e) {
            throw ParseError(std::string("trace: malformed record: ") + e.what());
        }
    }
    (void)saw_status;
    return csv.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open output file: " + path);
    out << content;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace removal_lab
