#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dirsol/fitting.hpp"
#include "dirsol/symplectic_geometry.hpp"

namespace dirsol {

class NumericalAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One Strang step: drift q by dt/2, exact flow of the field Hamiltonian
// (1/2)<psi, D psi> + Re<psi, rho(. - q)> for dt (q frozen; psi and p move), drift by dt/2.
// The field is kept in Fourier representation.
PhaseState step(const PhaseState& Y, double dt, const ChargeDensity& rho);

// H = (1/2) Re<psi, (-i alpha.grad + beta m) psi> + Re<psi, rho(. - q)> + sqrt(1 + p^2).
double hamiltonian(const PhaseState& Y, const ChargeDensity& rho);

// Force Re<psi, grad rho(. - q)>.
Vec3 particle_force(const SpinorField& psi, const Vec3& q, const ChargeDensity& rho);

struct TrackingOptions {
    bool enabled = true;
    double stride = 0.2;
    double nu = 3.0;
    ProjectionOptions projection;
};

struct SimulationConfig {
    GridSpec grid;
    ChargeDensity rho;
    double dt = 0.02;
    double T = 10.0;
    TrackingOptions tracking;
    double snapshot_stride = 0.0;  // 0 disables field snapshots
    // Optional hook fed with every tracked sample (time, state).
    std::function<void(double, const PhaseState&)> on_sample;
};

struct ModulationSample {
    double t = 0.0;
    SolitonParams sigma;
    double z_norm = 0.0;    // ||Z||_{-nu} + |Q| + |P|, field weight centred at b(t)
    double majorant = 0.0;  // sup_{s <= t} (1 + s)^{3/2} ||Z(s)||_{-nu}
    int iterations = 0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec3> q, p;
    std::vector<ModulationSample> modulation;
    std::vector<std::pair<double, PhaseState>> snapshots;
    std::optional<double> tracking_lost_at;
    PhaseState final_state;
};

Trajectory simulate(const PhaseState& Y0, const SimulationConfig& cfg);

struct ScatteringData {
    Vec3 v_plus = Vec3::Zero();
    Vec3 a_plus = Vec3::Zero();
    std::optional<FitResult> velocity_fit;  // log |qdot - v_plus| vs log t
    std::optional<FitResult> z_fit;         // log ||Z||_{-nu} vs log t
};

// Tail statistics over t >= t_min (fits are skipped when the window has too few usable samples).
ScatteringData extract_scattering_data(const Trajectory& traj, double t_min);

// ||Z||_{-nu} as recorded along trajectories.
double transversal_norm(const PhaseState& Z, const Vec3& centre, double nu);

}  // namespace dirsol
