#include "hetbench/simkernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "hetbench/rng.hpp"

namespace hetbench {

namespace {

constexpr double kStiffLink = 2.5e5; // 1/s^2, rigid at dt = 0.002
constexpr double kSoftLink = 1.25e5; // 1/s^2, slightly compliant (rope)

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

void fnv_absorb(std::uint64_t& h, double value) {
    std::uint64_t bits;
    std::memcpy(&bits, &value, sizeof(bits));
    for (int i = 0; i < 8; ++i) { // little-endian byte order
        h ^= (bits >> (8 * i)) & 0xffu;
        h *= kFnvPrime;
    }
}

bool coordinate_ok(const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z) &&
           std::abs(v.x) <= kBlowupLimit && std::abs(v.y) <= kBlowupLimit &&
           std::abs(v.z) <= kBlowupLimit;
}

void add_chain(WorldState& w, std::size_t from, std::size_t to, double stiffness) {
    for (std::size_t i = from; i < to; ++i) {
        const double rest = (w.positions[i + 1] - w.positions[i]).norm();
        w.constraints.push_back({i, i + 1, rest, stiffness});
    }
}

} // namespace

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::Box: return "box";
        case ModelKind::BoxAndBall: return "box_and_ball";
        case ModelKind::ArmWithRope: return "arm_with_rope";
        case ModelKind::Humanoid: return "humanoid";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& name) {
    for (ModelKind k : kAllModels)
        if (name == to_string(k)) return k;
    throw std::invalid_argument("unknown model kind: " + name);
}

WorldState build_model(ModelKind kind, std::uint64_t seed) {
    WorldState w;
    w.seed = seed;
    w.damping = 0.8;
    w.time = 0.0;

    RngStream rs(seed);
    const double drop_height = rs.next_range(0.5, 2.0);
    const Vec3 launch{rs.next_range(-1.0, 1.0), rs.next_range(-1.0, 1.0), 0.0};
    const double heading = rs.next_range(0.0, 2.0 * 3.14159265358979323846);

    const std::size_t n = body_count(kind);
    w.positions.resize(n);
    w.velocities.assign(n, launch);

    // Bodies laid out along a gentle ascending arc from the anchor point;
    // the per-body jitter breaks symmetry between seeds.
    const double spacing = (kind == ModelKind::Humanoid) ? 0.12 : 0.25;
    const bool twin_rails = kind == ModelKind::Humanoid;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = twin_rails ? i % 16 : i;
        const double a = heading + 0.15 * static_cast<double>(j);
        Vec3 p{spacing * static_cast<double>(j) * std::cos(a),
               spacing * static_cast<double>(j) * std::sin(a),
               drop_height + 0.05 * static_cast<double>(j)};
        if (twin_rails && i >= 16) {
            // Rail B sits one link width to the side of rail A.
            p.x -= spacing * std::sin(a);
            p.y += spacing * std::cos(a);
        }
        p.x += 1e-3 * rs.next_range(-1.0, 1.0);
        p.y += 1e-3 * rs.next_range(-1.0, 1.0);
        p.z += 1e-3 * rs.next_unit();
        w.positions[i] = p;
    }

    switch (kind) {
        case ModelKind::Box:
            break;
        case ModelKind::BoxAndBall:
            add_chain(w, 0, 1, kStiffLink);
            break;
        case ModelKind::ArmWithRope:
            add_chain(w, 0, 5, kStiffLink); // arm segments
            add_chain(w, 5, 11, kSoftLink); // rope
            break;
        case ModelKind::Humanoid: {
            // Two parallel 16-body rails joined by rungs: 46 constraints with
            // only quad cycles. Near-collinear triples (degenerate triangles)
            // make the projection solver thrash, so the braces are rungs, not
            // chain skips.
            add_chain(w, 0, 15, kStiffLink);   // rail A: bodies 0..15
            add_chain(w, 16, 31, kStiffLink);  // rail B: bodies 16..31
            for (std::size_t i = 0; i < 16; ++i) {
                const double rest = (w.positions[16 + i] - w.positions[i]).norm();
                w.constraints.push_back({i, 16 + i, rest, kStiffLink});
            }
            break;
        }
    }
    return w;
}

void step(WorldState& state, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
    const std::size_t n = state.positions.size();

    // Semi-implicit Euler: gravity, then damping, then position prediction.
    const double damp = 1.0 - state.damping * dt;
    for (std::size_t i = 0; i < n; ++i) {
        Vec3& v = state.velocities[i];
        v.z -= kGravity * dt;
        v *= damp;
    }

    std::vector<Vec3> pred(n);
    for (std::size_t i = 0; i < n; ++i)
        pred[i] = state.positions[i] + state.velocities[i] * dt;

    // Gauss-Seidel position projection; the per-sweep correction fraction is
    // the constraint stiffness folded over dt^2, capped at full projection.
    for (int it = 0; it < kProjectionIterations; ++it) {
        for (const Constraint& c : state.constraints) {
            Vec3 d = pred[c.b] - pred[c.a];
            const double dist = d.norm();
            if (dist < 1e-12) continue;
            const double k = std::min(1.0, c.stiffness * dt * dt);
            const double corr = 0.5 * k * (dist - c.rest_length) / dist;
            pred[c.a] += d * corr;
            pred[c.b] -= d * corr;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (pred[i].z < 0.0) pred[i].z = 0.0;
    }

    // New velocities follow the realized displacement; projected contact
    // therefore absorbs the impact (restitution 0).
    const double inv_dt = 1.0 / dt;
    for (std::size_t i = 0; i < n; ++i) {
        state.velocities[i] = (pred[i] - state.positions[i]) * inv_dt;
        state.positions[i] = pred[i];
        if (state.positions[i].z <= 0.0 && state.velocities[i].z < 0.0)
            state.velocities[i].z = 0.0;
    }
    state.time += dt;

    for (std::size_t i = 0; i < n; ++i) {
        if (!coordinate_ok(state.positions[i]) || !coordinate_ok(state.velocities[i]))
            throw numerical_blowup("coordinate left the stable regime at t=" +
                                   std::to_string(state.time));
    }
}

std::uint64_t state_checksum(const WorldState& state) {
    std::uint64_t h = kFnvOffset;
    for (const Vec3& p : state.positions) {
        fnv_absorb(h, p.x);
        fnv_absorb(h, p.y);
        fnv_absorb(h, p.z);
    }
    for (const Vec3& v : state.velocities) {
        fnv_absorb(h, v.x);
        fnv_absorb(h, v.y);
        fnv_absorb(h, v.z);
    }
    return h;
}

VariantResult simulate(ModelKind kind, std::uint64_t seed, std::uint64_t steps) {
    if (steps < 1) throw std::invalid_argument("simulate: steps must be >= 1");
    WorldState w = build_model(kind, seed);
    const Vec3 start = w.positions[0];
    try {
        for (std::uint64_t s = 0; s < steps; ++s) step(w, kSimDt);
    } catch (const numerical_blowup& e) {
        throw numerical_blowup(std::string(e.what()) + " (seed " + std::to_string(seed) + ")");
    }
    const Vec3 d = w.positions[0] - start;
    VariantResult r;
    r.seed = seed;
    r.fitness = std::sqrt(d.x * d.x + d.y * d.y);
    r.checksum = state_checksum(w);
    r.steps_executed = steps;
    return r;
}

} // namespace hetbench
