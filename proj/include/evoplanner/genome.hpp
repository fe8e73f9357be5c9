#pragma once

#include <array>
#include <cstdint>
#include <sstream>
#include <string>

#include "evoplanner/codebook.hpp"
#include "evoplanner/errors.hpp"
#include "evoplanner/operators.hpp"
#include "evoplanner/rng.hpp"
#include "evoplanner/smoothers.hpp"

namespace evoplanner {

// ---------------------------------------------------------------------------
// 64-bit planner genome
// ---------------------------------------------------------------------------

/// Bit 0 is the most significant bit of `bits`, so the string form reads
/// left to right in field order.
struct PlannerGenome {
    std::uint64_t bits = 0;

    bool operator==(const PlannerGenome&) const = default;

    std::string to_string() const {
        std::string s(64, '0');
        for (int i = 0; i < 64; ++i) {
            if (bits >> (63 - i) & 1u) s[static_cast<std::size_t>(i)] = '1';
        }
        return s;
    }

    static PlannerGenome from_string(const std::string& s) {
        if (s.size() != 64) throw ConfigError("genome literal must be 64 characters");
        PlannerGenome g;
        for (int i = 0; i < 64; ++i) {
            const char c = s[static_cast<std::size_t>(i)];
            if (c == '1') {
                g.bits |= 1ull << (63 - i);
            } else if (c != '0') {
                throw ConfigError("genome literal must contain only 0 and 1");
            }
        }
        return g;
    }
};

struct GenomeField {
    const char* name;
    int offset;
    int width;
};

inline constexpr std::array<GenomeField, 32> kGenomeFields = {{
    {"control_points", 0, 2},  {"populations", 2, 2},    {"individuals", 4, 3},
    {"diversity", 7, 2},       {"curve", 9, 2},          {"sort", 11, 2},
    {"sort_param", 13, 3},     {"elitism", 16, 2},       {"rank", 18, 2},
    {"selection", 20, 2},      {"selection_param", 22, 2}, {"exploit", 24, 3},
    {"exploit_param", 27, 2},  {"twins", 29, 1},         {"explore", 30, 3},
    {"explore_param", 33, 2},  {"keep_inferior", 35, 1}, {"end_mode", 36, 1},
    {"end_param", 37, 3},      {"case1", 40, 2},         {"case1_param", 42, 2},
    {"case2", 44, 2},          {"case2_param", 46, 2},   {"case3", 48, 1},
    {"cellular", 49, 1},       {"injection", 50, 2},     {"repair", 52, 2},
    {"migration", 54, 2},      {"antibody", 56, 2},      {"forbid_clones", 58, 1},
    {"decay", 59, 2},          {"pfih", 61, 3},
}};

inline unsigned get_field(const PlannerGenome& g, int offset, int width) {
    return static_cast<unsigned>(g.bits >> (64 - offset - width) &
                                 ((1ull << width) - 1));
}

inline void set_field(PlannerGenome& g, int offset, int width, unsigned value) {
    if (value >= 1u << width) throw ConfigError("genome field value out of range");
    const std::uint64_t mask = ((1ull << width) - 1) << (64 - offset - width);
    g.bits = (g.bits & ~mask) |
             (static_cast<std::uint64_t>(value) << (64 - offset - width));
}

// ---------------------------------------------------------------------------
// Decoded planner configuration
// ---------------------------------------------------------------------------

enum class DiversityModel { Single, Island, StructuredGrid, CompetingLayers };
enum class ExploitOp { NPointX, UniformX, ArithmeticX, Cipso, Safari, Commensalism, DeRand, DeBest };
enum class ExploreOp { Uniform, NonUniform, Gaussian, Cauchy, Pus, Sgwo, Cinf, None };

inline const char* diversity_name(DiversityModel d) {
    switch (d) {
        case DiversityModel::Single: return "single";
        case DiversityModel::Island: return "island";
        case DiversityModel::StructuredGrid: return "structured-grid";
        case DiversityModel::CompetingLayers: return "competing-layers";
    }
    return "?";
}

inline const char* exploit_name(ExploitOp op) {
    switch (op) {
        case ExploitOp::NPointX: return "n-point-crossover";
        case ExploitOp::UniformX: return "uniform-crossover";
        case ExploitOp::ArithmeticX: return "arithmetic-crossover";
        case ExploitOp::Cipso: return "pso";
        case ExploitOp::Safari: return "safari";
        case ExploitOp::Commensalism: return "commensalism";
        case ExploitOp::DeRand: return "de-rand";
        case ExploitOp::DeBest: return "de-best";
    }
    return "?";
}

inline const char* explore_name(ExploreOp op) {
    switch (op) {
        case ExploreOp::Uniform: return "uniform-mutation";
        case ExploreOp::NonUniform: return "non-uniform-mutation";
        case ExploreOp::Gaussian: return "gaussian-mutation";
        case ExploreOp::Cauchy: return "cauchy-mutation";
        case ExploreOp::Pus: return "population-update";
        case ExploreOp::Sgwo: return "grey-wolf";
        case ExploreOp::Cinf: return "collective-information";
        case ExploreOp::None: return "none";
    }
    return "?";
}

/// Concrete planner settings decoded from a genome against a codebook. Every
/// parameter reading of a shared code is filled in, whether or not the
/// selected operator uses it; this keeps decode/encode exact inverses.
struct PlannerConfig {
    int control_points = 6;
    int populations = 1;
    int individuals = 16;
    DiversityModel diversity = DiversityModel::Single;
    Smoother curve = Smoother::Bezier;

    SortStrategy sort = SortStrategy::Penalty;
    double penalty_base = 1.0;
    double alpha0 = 2.0;
    double elitism_percent = 0.0;
    RankScheme rank = RankScheme::Linear;
    SelectionPolicy selection = SelectionPolicy::Tournament;
    int tournament_candidates = 2;
    double truncation_fraction = 0.2;

    ExploitOp exploit = ExploitOp::NPointX;
    int crossover_points = 1;
    double crossover_rate = 0.3;
    double blend_lambda = 0.25;
    double pso_inertia = 0.4;
    double safari_step = 0.5;
    double de_f = 0.4;
    double de_cr = 0.5;
    bool twins = false;

    ExploreOp explore = ExploreOp::Uniform;
    double mutation_rate = 0.02;
    double pus_a = 0.5;
    int cinf_threshold = 3;
    bool keep_inferior = false;

    bool end_walltime = false;
    int end_generations = 50;
    double end_walltime_s = 0.1;
    PrematurityRule case1 = PrematurityRule::None;
    int stagnation_generations = 10;
    double homogenization_fraction = 0.7;
    double goal_fitness = 0.6;
    SimilarPopulationAction case2 = SimilarPopulationAction::None;
    double similarity_threshold = 0.7;
    bool restart_on_early_stop = false;

    bool cellular = false;
    double injection_percent = 0.0;
    int repair_iterations = 0;
    int migration_interval = 0;
    double antibody_factor = 0.0;
    bool forbid_clones = false;
    double decay_factor = 1.0;
    int pfih_iterations = 0;

    bool operator==(const PlannerConfig&) const = default;
};

/// Total: every 64-bit pattern decodes to a valid configuration.
inline PlannerConfig decode(const PlannerGenome& g, const Codebook& cb) {
    auto f = [&](int idx) {
        return get_field(g, kGenomeFields[static_cast<std::size_t>(idx)].offset,
                         kGenomeFields[static_cast<std::size_t>(idx)].width);
    };
    PlannerConfig c;
    c.control_points = cb.control_points[f(0)];
    c.populations = cb.populations[f(1)];
    c.individuals = cb.individuals[f(2)];
    c.diversity = static_cast<DiversityModel>(f(3));
    c.curve = static_cast<Smoother>(f(4));

    c.sort = static_cast<SortStrategy>(f(5));
    const unsigned sp = f(6);
    c.penalty_base = cb.penalty_base[sp];
    c.alpha0 = cb.alpha0[sp];
    c.elitism_percent = cb.elitism_percent[f(7)];
    c.rank = static_cast<RankScheme>(f(8));
    c.selection = static_cast<SelectionPolicy>(f(9));
    const unsigned selp = f(10);
    c.tournament_candidates = cb.tournament_candidates[selp];
    c.truncation_fraction = cb.truncation_fraction[selp];

    c.exploit = static_cast<ExploitOp>(f(11));
    const unsigned xp = f(12);
    c.crossover_points = cb.crossover_points[xp];
    c.crossover_rate = cb.crossover_rate[xp];
    c.blend_lambda = cb.blend_lambda[xp];
    c.pso_inertia = cb.pso_inertia[xp];
    c.safari_step = cb.safari_step[xp];
    c.de_f = cb.de_f[xp];
    c.de_cr = cb.de_cr[xp];
    c.twins = f(13) != 0;

    c.explore = static_cast<ExploreOp>(f(14));
    const unsigned ep = f(15);
    c.mutation_rate = cb.mutation_rate[ep];
    c.pus_a = cb.pus_a[ep];
    c.cinf_threshold = cb.cinf_threshold[ep];
    c.keep_inferior = f(16) != 0;

    c.end_walltime = f(17) != 0;
    const unsigned endp = f(18);
    c.end_generations = cb.end_generations[endp];
    c.end_walltime_s = cb.end_walltime_s[endp];
    c.case1 = static_cast<PrematurityRule>(f(19));
    const unsigned c1p = f(20);
    c.stagnation_generations = cb.stagnation_generations[c1p];
    c.homogenization_fraction = cb.homogenization_fraction[c1p];
    c.goal_fitness = cb.goal_fitness[c1p];
    c.case2 = static_cast<SimilarPopulationAction>(f(21));
    c.similarity_threshold = cb.similarity_threshold[f(22)];
    c.restart_on_early_stop = f(23) != 0;

    c.cellular = f(24) != 0;
    c.injection_percent = cb.injection_percent[f(25)];
    c.repair_iterations = cb.repair_iterations[f(26)];
    c.migration_interval = cb.migration_interval[f(27)];
    c.antibody_factor = cb.antibody_factor[f(28)];
    c.forbid_clones = f(29) != 0;
    c.decay_factor = cb.decay_factor[f(30)];
    c.pfih_iterations = cb.pfih_iterations[f(31)];
    return c;
}

namespace detail {

template <typename T>
unsigned table_index(const std::vector<T>& table, T value, const char* field) {
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table[i] == value) return static_cast<unsigned>(i);
    }
    throw ConfigError(std::string("encode: '") + field + "' value not in codebook");
}

}  // namespace detail

/// Exact inverse of decode. Shared parameter codes are recovered from the
/// reading whose table has distinct entries (penalty_base, crossover_points,
/// mutation_rate, end_generations, stagnation_generations).
inline PlannerGenome encode(const PlannerConfig& c, const Codebook& cb) {
    PlannerGenome g;
    auto put = [&](int idx, unsigned value) {
        set_field(g, kGenomeFields[static_cast<std::size_t>(idx)].offset,
                  kGenomeFields[static_cast<std::size_t>(idx)].width, value);
    };
    put(0, detail::table_index(cb.control_points, c.control_points, "control_points"));
    put(1, detail::table_index(cb.populations, c.populations, "populations"));
    put(2, detail::table_index(cb.individuals, c.individuals, "individuals"));
    put(3, static_cast<unsigned>(c.diversity));
    put(4, static_cast<unsigned>(c.curve));
    put(5, static_cast<unsigned>(c.sort));
    put(6, detail::table_index(cb.penalty_base, c.penalty_base, "sort_param"));
    put(7, detail::table_index(cb.elitism_percent, c.elitism_percent, "elitism"));
    put(8, static_cast<unsigned>(c.rank));
    put(9, static_cast<unsigned>(c.selection));
    put(10, detail::table_index(cb.tournament_candidates, c.tournament_candidates,
                                "selection_param"));
    put(11, static_cast<unsigned>(c.exploit));
    put(12, detail::table_index(cb.crossover_points, c.crossover_points, "exploit_param"));
    put(13, c.twins ? 1u : 0u);
    put(14, static_cast<unsigned>(c.explore));
    put(15, detail::table_index(cb.mutation_rate, c.mutation_rate, "explore_param"));
    put(16, c.keep_inferior ? 1u : 0u);
    put(17, c.end_walltime ? 1u : 0u);
    put(18, detail::table_index(cb.end_generations, c.end_generations, "end_param"));
    put(19, static_cast<unsigned>(c.case1));
    put(20, detail::table_index(cb.stagnation_generations, c.stagnation_generations,
                                "case1_param"));
    put(21, static_cast<unsigned>(c.case2));
    put(22, detail::table_index(cb.similarity_threshold, c.similarity_threshold,
                                "case2_param"));
    put(23, c.restart_on_early_stop ? 1u : 0u);
    put(24, c.cellular ? 1u : 0u);
    put(25, detail::table_index(cb.injection_percent, c.injection_percent, "injection"));
    put(26, detail::table_index(cb.repair_iterations, c.repair_iterations, "repair"));
    put(27, detail::table_index(cb.migration_interval, c.migration_interval, "migration"));
    put(28, detail::table_index(cb.antibody_factor, c.antibody_factor, "antibody"));
    put(29, c.forbid_clones ? 1u : 0u);
    put(30, detail::table_index(cb.decay_factor, c.decay_factor, "decay"));
    put(31, detail::table_index(cb.pfih_iterations, c.pfih_iterations, "pfih"));
    return g;
}

// ---------------------------------------------------------------------------
// Genome-level variation
// ---------------------------------------------------------------------------

inline PlannerGenome random_genome(Rng& rng) {
    PlannerGenome g;
    g.bits = rng();
    return g;
}

inline PlannerGenome mutate_genome(const PlannerGenome& g, double p_bit, Rng& rng) {
    PlannerGenome out = g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 64; ++i) {
        if (u(rng) < p_bit) out.bits ^= 1ull << i;
    }
    return out;
}

/// Single-point crossover; the cut falls strictly inside the word.
inline std::pair<PlannerGenome, PlannerGenome> crossover_genomes(const PlannerGenome& a,
                                                                 const PlannerGenome& b,
                                                                 Rng& rng) {
    std::uniform_int_distribution<int> u(1, 63);
    const int cut = u(rng);
    const std::uint64_t low_mask = (1ull << (64 - cut)) - 1;  // bits after the cut
    PlannerGenome ca, cb;
    ca.bits = (a.bits & ~low_mask) | (b.bits & low_mask);
    cb.bits = (b.bits & ~low_mask) | (a.bits & low_mask);
    return {ca, cb};
}

// ---------------------------------------------------------------------------
// Human-readable description
// ---------------------------------------------------------------------------

/// One line per field: `name raw=<bits> value=<reading>`. The raw column is
/// authoritative and lets parse_describe rebuild the exact genome.
inline std::string describe(const PlannerGenome& g, const Codebook& cb) {
    const PlannerConfig c = decode(g, cb);
    std::ostringstream out;
    out << "genome " << g.to_string() << '\n';
    auto raw_bits = [&](int idx) {
        const GenomeField& fld = kGenomeFields[static_cast<std::size_t>(idx)];
        const unsigned v = get_field(g, fld.offset, fld.width);
        std::string s(static_cast<std::size_t>(fld.width), '0');
        for (int i = 0; i < fld.width; ++i) {
            if (v >> (fld.width - 1 - i) & 1u) s[static_cast<std::size_t>(i)] = '1';
        }
        return s;
    };
    auto line = [&](int idx, const std::string& value) {
        out << kGenomeFields[static_cast<std::size_t>(idx)].name << " raw=" << raw_bits(idx)
            << " value=" << value << '\n';
    };
    auto num = [](auto v) { return std::to_string(v); };
    line(0, num(c.control_points));
    line(1, num(c.populations));
    line(2, num(c.individuals));
    line(3, diversity_name(c.diversity));
    line(4, smoother_name(c.curve));
    const char* sorts[] = {"penalty", "non-dominated", "alpha-level", "violation-count"};
    line(5, sorts[static_cast<int>(c.sort)]);
    line(6, "penalty_base=" + num(c.penalty_base) + ",alpha0=" + num(c.alpha0));
    line(7, num(c.elitism_percent) + "%");
    const char* ranks[] = {"linear", "logarithmic", "exponential", "identity"};
    line(8, ranks[static_cast<int>(c.rank)]);
    const char* sels[] = {"tournament", "truncation", "roulette", "sus"};
    line(9, sels[static_cast<int>(c.selection)]);
    line(10, "candidates=" + num(c.tournament_candidates) +
              ",fraction=" + num(c.truncation_fraction));
    line(11, exploit_name(c.exploit));
    line(12, "points=" + num(c.crossover_points) + ",cr=" + num(c.crossover_rate) +
              ",f=" + num(c.de_f));
    line(13, c.twins ? "on" : "off");
    line(14, explore_name(c.explore));
    line(15, "p_m=" + num(c.mutation_rate) + ",a=" + num(c.pus_a));
    line(16, c.keep_inferior ? "keep" : "greedy");
    line(17, c.end_walltime ? "walltime" : "generations");
    line(18, "generations=" + num(c.end_generations) + ",seconds=" + num(c.end_walltime_s));
    const char* case1s[] = {"none", "stagnation", "homogenization", "goal"};
    line(19, case1s[static_cast<int>(c.case1)]);
    line(20, "stagnation=" + num(c.stagnation_generations));
    const char* case2s[] = {"none", "reset", "kill", "adjust"};
    line(21, case2s[static_cast<int>(c.case2)]);
    line(22, "similarity=" + num(c.similarity_threshold));
    line(23, c.restart_on_early_stop ? "restart" : "stop");
    line(24, c.cellular ? "on" : "off");
    line(25, num(c.injection_percent) + "%");
    line(26, num(c.repair_iterations));
    line(27, num(c.migration_interval));
    line(28, num(c.antibody_factor));
    line(29, c.forbid_clones ? "on" : "off");
    line(30, num(c.decay_factor));
    line(31, num(c.pfih_iterations));
    return out.str();
}

/// Rebuilds a genome from describe() output using the raw= columns.
inline PlannerGenome parse_describe(const std::string& text) {
    std::istringstream in(text);
    std::string token;
    PlannerGenome g;
    std::size_t field = 0;
    while (in >> token) {
        if (token.rfind("raw=", 0) != 0) continue;
        if (field >= kGenomeFields.size()) throw ConfigError("parse_describe: too many fields");
        const std::string bits = token.substr(4);
        const GenomeField& fld = kGenomeFields[field];
        if (static_cast<int>(bits.size()) != fld.width)
            throw ConfigError("parse_describe: field width mismatch");
        unsigned v = 0;
        for (char c : bits) {
            if (c != '0' && c != '1') throw ConfigError("parse_describe: bad raw bits");
            v = v << 1 | static_cast<unsigned>(c == '1');
        }
        set_field(g, fld.offset, fld.width, v);
        ++field;
    }
    if (field != kGenomeFields.size()) throw ConfigError("parse_describe: missing fields");
    return g;
}

}  // namespace evoplanner
