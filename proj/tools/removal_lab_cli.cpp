// removal-lab: batch experiments around H-freeness — generate instances,
// count and pack copies, compute removal distances, shatter part tuples, run
// the entropy-increment refinement loop, and test H-freeness by sampling.
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "removal_lab/count.hpp"
#include "removal_lab/entropy.hpp"
#include "removal_lab/errors.hpp"
#include "removal_lab/graph.hpp"
#include "removal_lab/instances.hpp"
#include "removal_lab/io.hpp"
#include "removal_lab/packing.hpp"
#include "removal_lab/pattern.hpp"
#include "removal_lab/refine.hpp"
#include "removal_lab/shattering.hpp"
#include "removal_lab/tester.hpp"
#include "removal_lab/tower.hpp"

namespace rl = removal_lab;

namespace {

rl::Graph load_graph(const std::string& path) {
    return rl::parse_edge_list(rl::read_text_file(path));
}

// A pattern is either a preset name or a path to an edge-list file.
rl::Pattern load_pattern(const std::string& spec) {
    try {
        return rl::Pattern::preset(spec);
    } catch (const rl::ParseError&) {
    }
    rl::Graph g = rl::parse_edge_list(rl::read_text_file(spec));
    std::vector<std::pair<int, int>> edges = g.edges();
    return rl::Pattern::from_edges(g.vertex_count(), std::move(edges));
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty())
        std::cout << content;
    else
        rl::write_text_file(out_path, content);
}

void emit_json(const std::string& out_path, const rl::Json& j) {
    emit(out_path, j.dump(2) + "\n");
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::string token;
    std::istringstream ss(text);
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        out.push_back(std::stoi(token));
    }
    return out;
}

// d-ladder overrides as "level=value" items; empty means theoretical mode.
rl::ShatterConstants make_constants(const std::vector<std::string>& ladder_specs,
                                    const std::string& mode, long long samples,
                                    std::uint64_t seed, const std::string& beta) {
    rl::WitnessSearchConfig witness;
    witness.mode = mode == "exhaustive" ? rl::SearchMode::exhaustive : rl::SearchMode::randomized;
    witness.samples = samples;
    witness.seed = seed;
    rl::ShatterConstants constants;
    if (ladder_specs.empty()) {
        constants = rl::ShatterConstants::theoretical_mode(witness);
    } else {
        std::map<int, rl::Rat> ladder;
        for (const auto& spec : ladder_specs) {
            auto eq = spec.find('=');
            if (eq == std::string::npos)
                throw rl::ParseError("constants: expected level=value, got '" + spec + "'");
            ladder[std::stoi(spec.substr(0, eq))] = rl::parse_rat(spec.substr(eq + 1));
        }
        constants = rl::ShatterConstants::override_mode(std::move(ladder), witness);
    }
    if (!beta.empty()) constants.beta_override = rl::parse_rat(beta);
    return constants;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"removal-lab: experiments around the graph removal lemma"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    std::string graph_path, pattern_spec, out_path, trace_path, mode = "randomized";
    std::string eps_str, delta_str, alpha_str, p_str, beta_str;
    std::vector<std::string> ladder_specs;
    std::uint64_t seed = 0;
    bool have_seed = false;
    long long budget = 0, samples = 10000, trials = 0, max_iters = 32, part_size = 0;
    int n = 0, m_param = 0, copies = 0, h_param = 0;
    long long big_n = 0;
    std::string family, sizes_str, strategy = "sphere", set_str, base_path;

    auto add_seed = [&](CLI::App* cmd, bool required) {
        auto* opt = cmd->add_option_function<std::uint64_t>(
            "--seed",
            [&](const std::uint64_t& v) {
                seed = v;
                have_seed = true;
            },
            "random seed (required for randomized commands)");
        if (required) opt->required();
        return opt;
    };

    auto* gen = app.add_subcommand("gen", "generate an instance");
    gen->add_option("--family", family, "random | blowup | behrend | rs | planted")->required();
    gen->add_option("--n", n, "vertex count (random)");
    gen->add_option("--p", p_str, "edge probability (random), exact rational or decimal");
    gen->add_option("--pattern", pattern_spec, "pattern preset or edge-list file");
    gen->add_option("--sizes", sizes_str, "comma list of class sizes (blowup)");
    gen->add_option("--N", big_n, "range bound (behrend)");
    gen->add_option("--strategy", strategy, "sphere | exhaustive (behrend)");
    gen->add_option("--m", m_param, "side parameter (rs)");
    gen->add_option("--set", set_str, "comma list: explicit 3-AP-free set (rs)");
    gen->add_option("--base", base_path, "base graph file (planted)");
    gen->add_option("--copies", copies, "number of planted copies");
    gen->add_option("--out", out_path, "output edge list path (sidecar json alongside)");
    add_seed(gen, false);

    auto* count = app.add_subcommand("count", "exact copy counts");
    count->add_option("--graph", graph_path)->required();
    count->add_option("--pattern", pattern_spec)->required();
    count->add_option("--out", out_path);

    auto* pack = app.add_subcommand("pack", "edge-disjoint packing");
    pack->add_option("--graph", graph_path)->required();
    pack->add_option("--pattern", pattern_spec)->required();
    bool exact_mode = false;
    pack->add_flag("--exact", exact_mode, "maximum packing by branch and bound");
    pack->add_option("--budget", budget, "copy budget in exact mode");
    pack->add_option("--out", out_path);
    add_seed(pack, false);

    auto* remove = app.add_subcommand("remove", "exact removal distance");
    remove->add_option("--graph", graph_path)->required();
    remove->add_option("--pattern", pattern_spec)->required();
    remove->add_option("--budget", budget, "edge budget");
    remove->add_option("--out", out_path);

    auto* shatter = app.add_subcommand("shatter", "shatter a part tuple");
    shatter->add_option("--graph", graph_path)->required();
    shatter->add_option("--pattern", pattern_spec)->required();
    shatter->add_option("--alpha", alpha_str)->required();
    shatter->add_option("--blocks", sizes_str, "comma list of consecutive block sizes");
    shatter->add_option("--dk", ladder_specs, "d-ladder override, level=value (repeatable)");
    shatter->add_option("--beta", beta_str, "matching beta override");
    shatter->add_option("--mode", mode, "exhaustive | randomized witness search");
    shatter->add_option("--samples", samples, "randomized witness samples");
    shatter->add_option("--out", out_path);
    add_seed(shatter, true);

    auto* refine = app.add_subcommand("refine", "run the removal process loop");
    refine->add_option("--graph", graph_path)->required();
    refine->add_option("--pattern", pattern_spec)->required();
    refine->add_option("--eps", eps_str, "removal threshold eps")->required();
    refine->add_option("--alpha", alpha_str, "alpha override (default eps0/20)");
    refine->add_option("--part-size", part_size, "part size floor override");
    refine->add_option("--dk", ladder_specs, "d-ladder override, level=value (repeatable)");
    refine->add_option("--beta", beta_str, "matching beta override");
    refine->add_option("--mode", mode, "exhaustive | randomized witness search");
    refine->add_option("--samples", samples, "randomized witness samples");
    refine->add_option("--max-iters", max_iters);
    refine->add_option("--out", out_path, "trace output path (json lines)");
    add_seed(refine, true);

    auto* test = app.add_subcommand("test", "sampling H-freeness tester");
    test->add_option("--graph", graph_path)->required();
    test->add_option("--pattern", pattern_spec)->required();
    test->add_option("--delta", delta_str)->required();
    test->add_option("--trials", trials, "estimate the rejection rate over this many runs");
    test->add_option("--out", out_path);
    add_seed(test, true);

    auto* constants_cmd = app.add_subcommand("constants", "theoretical constants");
    constants_cmd->set_help_flag("--help", "print help");
    constants_cmd->add_option("--h", h_param)->required();
    constants_cmd->add_option("--eps", eps_str)->required();
    constants_cmd->add_option("--alpha", alpha_str)->required();
    constants_cmd->add_option("--out", out_path);

    auto* report = app.add_subcommand("report", "summarize a trace as CSV");
    report->add_option("--trace", trace_path)->required();
    report->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) {
            rl::Json sidecar{{"family", family}};
            rl::Graph g;
            if (family == "random") {
                if (!have_seed) throw rl::PreconditionError("gen random: --seed is required");
                if (p_str.empty()) throw rl::PreconditionError("gen random: --p is required");
                g = rl::gen_random(n, rl::parse_rat(p_str), seed);
                sidecar["n"] = n;
                sidecar["p"] = p_str;
                sidecar["seed"] = seed;
            } else if (family == "blowup") {
                rl::Pattern f = load_pattern(pattern_spec);
                g = rl::gen_blowup(f, parse_int_list(sizes_str));
                sidecar["sizes"] = parse_int_list(sizes_str);
            } else if (family == "behrend") {
                auto strat = strategy == "exhaustive" ? rl::BehrendStrategy::exhaustive
                                                      : rl::BehrendStrategy::sphere;
                rl::BehrendSet s = rl::gen_behrend_set(big_n, strat);
                sidecar["N"] = s.range;
                sidecar["set"] = s.elements;
                sidecar["size"] = s.elements.size();
                emit_json(out_path, sidecar);
                return 0;
            } else if (family == "rs") {
                rl::BehrendSet s;
                s.range = m_param;
                if (set_str.empty())
                    s = rl::gen_behrend_set(m_param, rl::BehrendStrategy::sphere);
                else
                    s.elements = parse_int_list(set_str);
                auto inst = rl::gen_ruzsa_szemeredi(m_param, s);
                g = inst.graph;
                sidecar["m"] = m_param;
                sidecar["set"] = inst.progressions;
                sidecar["tripartition"] = inst.sides;
                sidecar["planted_triangles"] = inst.planted_triangles;
            } else if (family == "planted") {
                if (!have_seed) throw rl::PreconditionError("gen planted: --seed is required");
                rl::Graph base = load_graph(base_path);
                rl::Pattern h = load_pattern(pattern_spec);
                auto inst = rl::gen_planted(base, h, copies, seed);
                g = inst.graph;
                sidecar["copies"] = copies;
                sidecar["placements"] = inst.placements;
                sidecar["seed"] = seed;
            } else {
                throw rl::PreconditionError("gen: unknown family '" + family + "'");
            }
            emit(out_path, rl::format_edge_list(g));
            if (!out_path.empty()) rl::write_text_file(out_path + ".json", sidecar.dump(2) + "\n");
            return 0;
        }

        if (count->parsed()) {
            rl::Graph g = load_graph(graph_path);
            rl::Pattern h = load_pattern(pattern_spec);
            long long labeled = rl::count_labeled_copies(g, h);
            long long aut = h.automorphism_count();
            emit_json(out_path, rl::Json{{"labeled", labeled},
                                         {"unlabeled", labeled / aut},
                                         {"automorphisms", aut}});
            return 0;
        }

        if (pack->parsed()) {
            rl::Graph g = load_graph(graph_path);
            rl::Pattern h = load_pattern(pattern_spec);
            rl::Packing p;
            if (exact_mode) {
                p = rl::packing_exact(g, h, budget > 0 ? budget : 200000);
            } else {
                if (!have_seed) throw rl::PreconditionError("pack greedy: --seed is required");
                p = rl::packing_greedy(g, h, seed);
            }
            rl::Json j = rl::packing_json(p);
            j["mode"] = exact_mode ? "exact" : "greedy";
            j["union_edges"] = p.size() * h.edge_count();
            emit_json(out_path, j);
            return 0;
        }

        if (remove->parsed()) {
            rl::Graph g = load_graph(graph_path);
            rl::Pattern h = load_pattern(pattern_spec);
            rl::RemovalResult r = rl::removal_distance_exact(g, h, budget > 0 ? budget : 64);
            emit_json(out_path, rl::Json{{"distance", r.distance},
                                         {"certificate", rl::edge_list_json(r.deleted)}});
            return 0;
        }

        if (shatter->parsed()) {
            rl::Graph g = load_graph(graph_path);
            rl::Pattern h = load_pattern(pattern_spec);
            std::vector<std::vector<int>> blocks;
            std::vector<int> sizes =
                sizes_str.empty()
                    ? std::vector<int>(static_cast<std::size_t>(h.vertex_count()),
                                       g.vertex_count() / h.vertex_count())
                    : parse_int_list(sizes_str);
            int at = 0;
            for (int sz : sizes) {
                std::vector<int> block;
                for (int i = 0; i < sz; ++i) block.push_back(at++);
                blocks.push_back(std::move(block));
            }
            auto constants = make_constants(ladder_specs, mode, samples, seed, beta_str);
            auto outcome =
                rl::shatter_pair(g, h, blocks, rl::parse_rat(alpha_str), constants, seed);
            emit_json(out_path, rl::shatter_outcome_json(g, outcome));
            return 0;
        }

        if (refine->parsed()) {
            rl::Graph g = load_graph(graph_path);
            rl::Pattern h = load_pattern(pattern_spec);
            rl::DriverConstants dc;
            dc.shatter = make_constants(ladder_specs, mode, samples, seed, beta_str);
            if (!alpha_str.empty()) dc.alpha_override = rl::parse_rat(alpha_str);
            if (part_size > 0) dc.part_size_floor = part_size;
            dc.max_iters = max_iters;
            auto result = rl::run_removal_process(g, h, rl::parse_rat(eps_str), dc, seed);
            emit(out_path, rl::trace_jsonl(result));
            return 0;
        }

        if (test->parsed()) {
            rl::Graph g = load_graph(graph_path);
            rl::Pattern h = load_pattern(pattern_spec);
            rl::Rat delta = rl::parse_rat(delta_str);
            if (trials > 0) {
                auto est = rl::estimate_rejection_rate(g, h, delta, trials, seed);
                emit_json(out_path, rl::rejection_estimate_json(est));
            } else {
                auto verdict = rl::test_h_freeness(g, h, delta, seed);
                emit_json(out_path, rl::verdict_json(verdict));
            }
            return 0;
        }

        if (constants_cmd->parsed()) {
            auto c = rl::theoretical_constants(h_param, rl::parse_rat(eps_str),
                                               rl::parse_rat(alpha_str));
            emit_json(out_path, rl::theoretical_constants_json(c));
            return 0;
        }

        if (report->parsed()) {
            std::istringstream in(rl::read_text_file(trace_path));
            emit(out_path, rl::summarize_trace(in));
            return 0;
        }
    } catch (const rl::BudgetError& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 2;
    } catch (const rl::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const rl::PreconditionError& e) {
        std::cerr << "precondition error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
