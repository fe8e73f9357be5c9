#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "evoplanner/errors.hpp"
#include "evoplanner/geometry.hpp"
#include "evoplanner/rng.hpp"
#include "evoplanner/terrain.hpp"

namespace evoplanner {

enum class ThreatKind { Radar, Missile, Nfz };

/// Radar, missile, or no-fly-zone obstacle. Radars and missiles are circular
/// soft barriers; NFZs are axis-aligned rectangles treated as hard constraints
/// at any altitude.
struct Threat {
    ThreatKind kind = ThreatKind::Radar;
    double cx = 0.0;  // center, meters (circular threats)
    double cy = 0.0;
    double radius = 0.0;  // R_Rmax for radar, R_M for missile
    double zeta1 = 1.0;   // radar detector exponent
    double zeta2 = 1.0;   // radar detector gain
    double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;  // NFZ rectangle

    bool contains_horizontal(double x, double y) const {
        if (kind == ThreatKind::Nfz) {
            return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
        }
        const double dx = x - cx;
        const double dy = y - cy;
        return dx * dx + dy * dy <= radius * radius;
    }

    void validate() const {
        if (kind == ThreatKind::Nfz) {
            if (!(x_min < x_max) || !(y_min < y_max))
                throw SchemaError("threat rectangle is degenerate");
        } else {
            if (!(radius > 0.0)) throw SchemaError("threat field 'radius' must be positive");
            if (kind == ThreatKind::Radar && (!(zeta1 > 0.0) || !(zeta2 > 0.0)))
                throw SchemaError("radar fields 'zeta1'/'zeta2' must be positive");
        }
    }
};

/// Ellipsoid approximation of the airframe used for the radar cross section.
struct UavShape {
    double a = 0.3;
    double b = 0.3;
    double c = 0.1;

    void validate() const {
        if (!(a > 0.0 && b > 0.0 && c > 0.0))
            throw SchemaError("uav semi-axes must be positive");
    }
};

struct Scenario {
    Terrain terrain;
    std::vector<Threat> threats;
    Vec3 start;
    Vec3 target;
    double mission_x = 150.0;  // mission space [0, mission_x] x [0, mission_y]
    double mission_y = 100.0;
    UavShape uav;
    double safe_height = 2.0;

    std::vector<Threat> radars() const { return of_kind(ThreatKind::Radar); }
    std::vector<Threat> missiles() const { return of_kind(ThreatKind::Missile); }
    std::vector<Threat> nfzs() const { return of_kind(ThreatKind::Nfz); }

    bool point_in_any_nfz(double x, double y) const {
        for (const Threat& t : threats) {
            if (t.kind == ThreatKind::Nfz && t.contains_horizontal(x, y)) return true;
        }
        return false;
    }

    bool point_in_any_missile(double x, double y) const {
        for (const Threat& t : threats) {
            if (t.kind == ThreatKind::Missile && t.contains_horizontal(x, y)) return true;
        }
        return false;
    }

    void validate() const {
        if (!(mission_x > 0.0 && mission_y > 0.0)) throw SchemaError("mission space is degenerate");
        if (safe_height < 0.0) throw SchemaError("safe_height must be non-negative");
        uav.validate();
        for (const Threat& t : threats) t.validate();
        if (start.x == target.x && start.y == target.y && start.z == target.z)
            throw SchemaError("start and target coincide");
        for (const Vec3* p : {&start, &target}) {
            if (p->x < 0.0 || p->x > mission_x || p->y < 0.0 || p->y > mission_y)
                throw SchemaError("endpoint outside mission space");
            if (point_in_any_nfz(p->x, p->y)) throw SchemaError("endpoint inside no-fly zone");
            if (point_in_any_missile(p->x, p->y)) throw SchemaError("endpoint inside missile radius");
        }
    }

private:
    std::vector<Threat> of_kind(ThreatKind k) const {
        std::vector<Threat> out;
        for (const Threat& t : threats) {
            if (t.kind == k) out.push_back(t);
        }
        return out;
    }
};

/// Density and relief knobs for random scenario generation.
struct ScenarioParams {
    int n_radars = 2;
    int n_missiles = 1;
    int n_nfzs = 1;
    double relief_amplitude = 12.0;  // dominant octave height, meters
    double relief_frequency = 0.015;
    double mission_x = 150.0;
    double mission_y = 100.0;
    double safe_height = 2.0;
    std::optional<Vec3> fixed_start;   // z component ignored; ground height is used
    std::optional<Vec3> fixed_target;

    static ScenarioParams density_preset(const std::string& name) {
        ScenarioParams p;
        if (name == "sparse") {
            p.n_radars = 1;
            p.n_missiles = 1;
            p.n_nfzs = 1;
        } else if (name == "medium") {
            p.n_radars = 2;
            p.n_missiles = 2;
            p.n_nfzs = 2;
        } else if (name == "more") {
            p.n_radars = 3;
            p.n_missiles = 3;
            p.n_nfzs = 3;
        } else if (name == "dense") {
            p.n_radars = 4;
            p.n_missiles = 4;
            p.n_nfzs = 5;
        } else {
            throw ConfigError("unknown density preset: " + name);
        }
        return p;
    }

    static ScenarioParams relief_preset(const std::string& name) {
        ScenarioParams p;
        p.n_radars = 0;
        p.n_missiles = 0;
        p.n_nfzs = 0;
        if (name == "basic") {
            p.relief_amplitude = 12.0;
            p.relief_frequency = 0.015;
        } else if (name == "mountain") {
            p.relief_amplitude = 40.0;
            p.relief_frequency = 0.012;
        } else if (name == "canyon") {
            p.relief_amplitude = 25.0;
            p.relief_frequency = 0.03;
        } else if (name == "hills") {
            p.relief_amplitude = 18.0;
            p.relief_frequency = 0.05;
        } else {
            throw ConfigError("unknown relief preset: " + name);
        }
        return p;
    }
};

namespace detail {

inline std::vector<NoiseOctave> relief_octaves(double amplitude, double frequency) {
    return {
        {frequency, amplitude, 1, 0.0},
        {frequency * 2.7, amplitude * 0.45, 2, 0.0},
        {frequency * 6.1, amplitude * 0.18, 3, 0.0},
    };
}

}  // namespace detail

/// Builds a full random scenario: terrain, threats, and safe endpoints.
/// Deterministic per seed. Throws PlacementError if no valid start/target
/// pair is found after bounded retries.
inline Scenario generate_scenario(std::uint64_t seed, const ScenarioParams& params) {
    Scenario s;
    s.mission_x = params.mission_x;
    s.mission_y = params.mission_y;
    s.safe_height = params.safe_height;
    s.terrain = generate_terrain(derive_seed(seed, 0xA11CE),
                                 params.mission_x, params.mission_y,
                                 detail::relief_octaves(params.relief_amplitude,
                                                        params.relief_frequency));

    Rng rng = make_rng(derive_seed(seed, 0x7123EA75));
    std::uniform_real_distribution<double> ux(0.1 * params.mission_x, 0.9 * params.mission_x);
    std::uniform_real_distribution<double> uy(0.1 * params.mission_y, 0.9 * params.mission_y);
    std::uniform_real_distribution<double> uradius(6.0, 16.0);
    std::uniform_real_distribution<double> unfz(5.0, 18.0);

    for (int i = 0; i < params.n_radars; ++i) {
        Threat t;
        t.kind = ThreatKind::Radar;
        t.cx = ux(rng);
        t.cy = uy(rng);
        t.radius = uradius(rng) * 1.5;
        s.threats.push_back(t);
    }
    for (int i = 0; i < params.n_missiles; ++i) {
        Threat t;
        t.kind = ThreatKind::Missile;
        t.cx = ux(rng);
        t.cy = uy(rng);
        t.radius = uradius(rng);
        s.threats.push_back(t);
    }
    for (int i = 0; i < params.n_nfzs; ++i) {
        Threat t;
        t.kind = ThreatKind::Nfz;
        const double cx = ux(rng);
        const double cy = uy(rng);
        const double wx = unfz(rng);
        const double wy = unfz(rng);
        t.x_min = std::max(0.0, cx - wx / 2);
        t.x_max = std::min(params.mission_x, cx + wx / 2);
        t.y_min = std::max(0.0, cy - wy / 2);
        t.y_max = std::min(params.mission_y, cy + wy / 2);
        s.threats.push_back(t);
    }

    auto safe_point = [&](double x, double y) {
        return !s.point_in_any_nfz(x, y) && !s.point_in_any_missile(x, y);
    };
    auto place = [&](std::optional<Vec3> fixed) -> std::optional<Vec3> {
        if (fixed) {
            if (!safe_point(fixed->x, fixed->y)) return std::nullopt;
            return Vec3{fixed->x, fixed->y, s.terrain.height_at(fixed->x, fixed->y)};
        }
        for (int attempt = 0; attempt < 200; ++attempt) {
            const double x = ux(rng);
            const double y = uy(rng);
            if (safe_point(x, y)) return Vec3{x, y, s.terrain.height_at(x, y)};
        }
        return std::nullopt;
    };

    for (int attempt = 0; attempt < 50; ++attempt) {
        const auto a = place(params.fixed_start);
        const auto b = place(params.fixed_target);
        if (a && b && distance2d(*a, *b) > 1.0) {
            s.start = *a;
            s.target = *b;
            s.validate();
            return s;
        }
        if (params.fixed_start && params.fixed_target) break;
    }
    throw PlacementError("could not place safe start/target after bounded retries");
}

// ---------------------------------------------------------------------------
// Scenario file schema (JSON, versioned)
// ---------------------------------------------------------------------------

inline constexpr int kScenarioSchemaVersion = 1;

namespace detail {

inline double require_number(const nlohmann::json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_number())
        throw SchemaError(std::string("scenario schema: missing or non-numeric field '") + field +
                          "'");
    return j[field].get<double>();
}

}  // namespace detail

inline nlohmann::json scenario_to_json(const Scenario& s) {
    nlohmann::json j;
    j["version"] = kScenarioSchemaVersion;
    j["terrain"] = {{"cell_size", s.terrain.cell_size()},
                    {"width", s.terrain.cols()},
                    {"height", s.terrain.rows()},
                    {"heights", s.terrain.grid()}};
    j["threats"] = nlohmann::json::array();
    for (const Threat& t : s.threats) {
        nlohmann::json tj;
        switch (t.kind) {
            case ThreatKind::Radar:
                tj["kind"] = "radar";
                tj["center"] = {t.cx, t.cy};
                tj["radius"] = t.radius;
                tj["zeta1"] = t.zeta1;
                tj["zeta2"] = t.zeta2;
                break;
            case ThreatKind::Missile:
                tj["kind"] = "missile";
                tj["center"] = {t.cx, t.cy};
                tj["radius"] = t.radius;
                break;
            case ThreatKind::Nfz:
                tj["kind"] = "nfz";
                tj["rect"] = {t.x_min, t.x_max, t.y_min, t.y_max};
                break;
        }
        j["threats"].push_back(tj);
    }
    j["start"] = {s.start.x, s.start.y, s.start.z};
    j["target"] = {s.target.x, s.target.y, s.target.z};
    j["mission_space"] = {s.mission_x, s.mission_y};
    j["uav"] = {{"a", s.uav.a}, {"b", s.uav.b}, {"c", s.uav.c}};
    j["safe_height"] = s.safe_height;
    return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
    if (!j.contains("version") || j["version"].get<int>() != kScenarioSchemaVersion)
        throw SchemaError("scenario schema: missing or unsupported 'version'");
    Scenario s;
    const auto& tj = j.at("terrain");
    const auto cols = tj.at("width").get<std::size_t>();
    const auto rows = tj.at("height").get<std::size_t>();
    const double cell = detail::require_number(tj, "cell_size");
    auto heights = tj.at("heights").get<std::vector<double>>();
    try {
        s.terrain = Terrain(std::move(heights), cols, rows, cell);
    } catch (const InvalidSpecError& e) {
        throw SchemaError(std::string("scenario schema: terrain: ") + e.what());
    }
    for (const auto& t : j.at("threats")) {
        Threat th;
        const std::string kind = t.at("kind").get<std::string>();
        if (kind == "radar" || kind == "missile") {
            th.kind = kind == "radar" ? ThreatKind::Radar : ThreatKind::Missile;
            th.cx = t.at("center").at(0).get<double>();
            th.cy = t.at("center").at(1).get<double>();
            th.radius = detail::require_number(t, "radius");
            if (th.radius <= 0.0) throw SchemaError("scenario schema: field 'radius' must be positive");
            if (kind == "radar") {
                th.zeta1 = detail::require_number(t, "zeta1");
                th.zeta2 = detail::require_number(t, "zeta2");
            }
        } else if (kind == "nfz") {
            th.kind = ThreatKind::Nfz;
            th.x_min = t.at("rect").at(0).get<double>();
            th.x_max = t.at("rect").at(1).get<double>();
            th.y_min = t.at("rect").at(2).get<double>();
            th.y_max = t.at("rect").at(3).get<double>();
        } else {
            throw SchemaError("scenario schema: unknown threat kind '" + kind + "'");
        }
        th.validate();
        s.threats.push_back(th);
    }
    auto vec3 = [](const nlohmann::json& a) {
        return Vec3{a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>()};
    };
    s.start = vec3(j.at("start"));
    s.target = vec3(j.at("target"));
    s.mission_x = j.at("mission_space").at(0).get<double>();
    s.mission_y = j.at("mission_space").at(1).get<double>();
    s.uav.a = detail::require_number(j.at("uav"), "a");
    s.uav.b = detail::require_number(j.at("uav"), "b");
    s.uav.c = detail::require_number(j.at("uav"), "c");
    s.safe_height = detail::require_number(j, "safe_height");
    s.validate();
    return s;
}

inline void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open scenario file for writing: " + path);
    out << scenario_to_json(s).dump(2) << "\n";
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("scenario schema: parse failure: ") + e.what());
    }
    try {
        return scenario_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("scenario schema: ") + e.what());
    }
}

}  // namespace evoplanner
