#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "evdrive/config.hpp"
#include "evdrive/world.hpp"

namespace evdrive {

enum class InfractionType {
    CollisionPedestrian,
    CollisionVehicle,
    CollisionLayout,
    RedLight,
    StopSign,
    RouteDeviation,
    RouteTimeout,
    VehicleBlocked,
};
inline constexpr int kInfractionTypeCount = 8;

const char* to_string(InfractionType type);

struct InfractionEvent {
    std::int64_t tick = 0;
    InfractionType type = InfractionType::CollisionVehicle;
    Vec2 position;
};

// Chronological event list; one record per continuous violation episode.
struct InfractionLog {
    std::vector<InfractionEvent> events;

    int count(InfractionType type) const;
};

// Scans a completed state trace for rule violations. Collisions are typed by
// the struck actor's kind (statics count as vehicle collisions); red-light and
// stop-sign checks fire when the ego's route arc length crosses the marker's.
// Timeouts are appended by the caller, which knows why the run ended.
InfractionLog detect_infractions(const std::vector<WorldState>& trace,
                                 const std::vector<Vec2>& stop_signs,
                                 const PhysicsParams& phys, const ScoringParams& scoring);

double penalty_coefficient(InfractionType type, const ScoringParams& scoring);

struct ScoreReport {
    double route_completion = 0.0;  // percent
    double infraction_score = 1.0;  // multiplicative, in (0, 1]
    double driving_score = 0.0;     // route_completion * infraction_score
    double distance_km = 0.0;
    bool rates_valid = false;  // false when distance is zero
    std::array<int, kInfractionTypeCount> counts{};
    std::array<double, kInfractionTypeCount> rates_per_km{};
};

ScoreReport score(const InfractionLog& log, double route_completion_percent,
                  double distance_km, const ScoringParams& scoring);

// Two-column CSV (metric,value) using the leaderboard row names, followed by
// the distance, rate-validity flag, and the penalty coefficients in force.
std::string report_csv(const ScoreReport& report, const ScoringParams& scoring);
std::string report_json(const ScoreReport& report, const ScoringParams& scoring);

// Total ego path length over a trace, in kilometres.
double driven_distance_km(const std::vector<WorldState>& trace);

}  // namespace evdrive
