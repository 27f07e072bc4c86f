#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dirsol/coupled_dynamics.hpp"

namespace dirsol {

enum class ExperimentKind { Simulate, Soliton, Decay, Scatter };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

struct RunConfig {
    GridSpec grid;
    ChargeDensity rho;
    double nu = 3.0;
    double dt = 0.02;
    double T = 10.0;
    ExperimentKind kind = ExperimentKind::Simulate;

    // Soliton parameters of the initial data (and frame velocity for free decay).
    Vec3 b = Vec3::Zero();
    Vec3 v = Vec3::Zero();

    double epsilon = 0.05;        // perturbation size, measured in the energy norm
    double packet_width = 1.5;    // Gaussian width of the free packet and of the perturbation bump
    double sample_stride = 0.5;   // free decay sampling
    double track_stride = 0.2;    // projection cadence along coupled runs
    double fit_t_min = 5.0;
    double fit_t_max = 25.0;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir;

    void validate() const;
    // Last time at which wrap-around cannot reach the weighted norm: L/2 - R_support.
    double validity_time() const;
    double support_radius() const;
};

// Centred Gaussian packet with a unit spinor drawn from the seed.
SpinorField gaussian_packet(const GridSpec& g, double width, const Vec3& centre, std::uint64_t seed);

struct DecayReport {
    std::vector<double> times;
    std::vector<double> norms;  // ||W_v(t) Phi||_{-nu}
    FitResult fit;
};

DecayReport run_free_decay(const RunConfig& cfg);

struct PersistenceReport {
    std::vector<double> times;
    std::vector<double> field_error;     // ||psi(t) - psi_v(. - b - vt)||_0 / ||psi_v||_0
    std::vector<double> velocity_error;  // |qdot(t) - v|
    std::vector<double> z_norm;
    double max_field_error = 0.0;
    double max_velocity_error = 0.0;
    double final_velocity_error = 0.0;
    double max_z_norm = 0.0;
    Trajectory trajectory;
};

PersistenceReport run_soliton_persistence(const RunConfig& cfg);

// S(b, v) + Z0 with Z0 the symplectic-orthogonal part of eps (bump, 0, dp), scaled to energy norm eps.
PhaseState perturbed_soliton(const RunConfig& cfg);

struct PhiEstimate {
    double t = 0.0;
    SolitonParams sigma;
    SpinorField phi;  // W_0(-t)(psi(t) - psi_v(. - b)), Fourier representation
};

struct ScatterReport {
    Vec3 v_plus = Vec3::Zero();
    Vec3 a_plus = Vec3::Zero();
    std::optional<FitResult> z_fit;
    double fit_t_max = 0.0;  // window end actually used (clipped to the validity time)
    // |qdot - v_plus| averaged over consecutive quarters of the tail window.
    std::vector<double> velocity_deviation;
    // Cauchy differences ||phi(T/2) - phi(T/4)||_0 and ||phi(T) - phi(T/2)||_0.
    double cauchy_half = 0.0;
    double cauchy_full = 0.0;
    // ||psi(T) - psi_{v_plus}(. - v_plus T - a_plus) - W_0(T) phi(T/2)||_0.
    double remainder = 0.0;
    bool captured = true;  // false when projection left the tube
    std::optional<double> tracking_lost_at;
    Trajectory trajectory;
};

ScatterReport run_scattering(const RunConfig& cfg);

// Pass/fail predicates shared by the CLI and the acceptance binary.
bool decay_exponent_ok(const FitResult& f);
bool scattering_ok(const ScatterReport& r);

}  // namespace dirsol
