#ifndef HETBENCH_SIMKERNEL_HPP
#define HETBENCH_SIMKERNEL_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hetbench/vec3.hpp"

namespace hetbench {

/// Workload classes in strictly increasing per-step cost order.
enum class ModelKind { Box, BoxAndBall, ArmWithRope, Humanoid };

constexpr ModelKind kAllModels[] = {ModelKind::Box, ModelKind::BoxAndBall,
                                    ModelKind::ArmWithRope, ModelKind::Humanoid};

const char* to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

/// Number of point masses for a model; fixed per kind.
constexpr std::size_t body_count(ModelKind kind) {
    switch (kind) {
        case ModelKind::Box: return 1;
        case ModelKind::BoxAndBall: return 2;
        case ModelKind::ArmWithRope: return 12;
        case ModelKind::Humanoid: return 32;
    }
    return 0;
}

struct Constraint {
    std::size_t a = 0;
    std::size_t b = 0;
    double rest_length = 0.0; // meters
    double stiffness = 0.0;   // 1/s^2
};

/// Full state of one simulation variant: unit point masses joined by
/// distance constraints above a ground plane at z = 0.
struct WorldState {
    std::vector<Vec3> positions;  // meters
    std::vector<Vec3> velocities; // m/s
    std::vector<Constraint> constraints;
    double damping = 0.0; // 1/s
    double time = 0.0;    // seconds
    std::uint64_t seed = 0;
};

struct VariantResult {
    std::uint64_t seed = 0;
    double fitness = 0.0; // horizontal displacement of body 0, meters
    std::uint64_t checksum = 0;
    std::uint64_t steps_executed = 0;

    friend bool operator==(const VariantResult&, const VariantResult&) = default;
};

/// Thrown when the integrator leaves the stable regime (coordinate beyond
/// 1e6 m or non-finite).
class numerical_blowup : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr double kSimDt = 0.002;            // seconds, fixed integrator timestep
constexpr double kGravity = 9.81;           // m/s^2, on -z
constexpr int kProjectionIterations = 8;    // constraint solver sweeps per step
constexpr double kContactTolerance = 1e-6;  // meters
constexpr double kBlowupLimit = 1e6;        // meters

/// Builds a world for `kind` whose initial drop height and lateral launch
/// velocity are derived purely from `seed`. Deterministic.
WorldState build_model(ModelKind kind, std::uint64_t seed);

/// Advances the world by one semi-implicit Euler step with velocity damping,
/// 8 position-projection sweeps over the constraints and ground contact with
/// zero restitution. Throws numerical_blowup on instability.
void step(WorldState& state, double dt);

/// FNV-1a 64 over the little-endian bytes of positions then velocities.
std::uint64_t state_checksum(const WorldState& state);

/// build_model + `steps` fixed-dt steps. steps must be >= 1.
VariantResult simulate(ModelKind kind, std::uint64_t seed, std::uint64_t steps);

} // namespace hetbench

#endif
